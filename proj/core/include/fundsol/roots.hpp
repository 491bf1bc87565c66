#pragma once

#include <cmath>
#include <optional>

namespace fundsol {

/// Bracketing bisection. `g(lo)` and `g(hi)` must have opposite signs (or one
/// of them vanish). Stops when the bracket is narrower than `xtol`.
template <class G>
double bisect(const G& g, double lo, double hi, double xtol = 1e-13,
              int max_iter = 200) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  double ghi = g(hi);
  if (ghi == 0.0) return hi;
  const bool lo_negative = glo < 0.0;
  for (int i = 0; i < max_iter && std::abs(hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Largest x in [lo,hi] with pred(x) true, given pred(lo) true and pred
/// monotone (true then false). Used for signature and time bisection.
template <class Pred>
double bisect_predicate(const Pred& pred, double lo, double hi, double xtol,
                        int max_iter = 200) {
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace fundsol

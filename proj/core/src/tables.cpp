#include "fundsol/tables.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fundsol/errors.hpp"

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace fundsol {

struct TableInterpolant::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

double TableInterpolant::operator()(double u) const { return impl_->spline(clamp(u)); }
double TableInterpolant::derivative(double u) const { return impl_->spline.prime(clamp(u)); }

TableInterpolant::TableInterpolant(const std::vector<double>& x, const std::vector<double>& y)
    : x_(x) {
  if (x.size() != y.size() || x.size() < 4) throw DomainError("table interpolant: need at least four matching samples");
  lo_ = x.front();
  hi_ = x.back();
  impl_ = std::make_shared<const Impl>(
      Impl{boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(x), std::vector<double>(y))});
}

double TableInterpolant::integral_to(double b) const {
  b = clamp(b);
  const auto& p = impl_->spline;
  // Three-point Gauss-Legendre is exact on each cubic Hermite cell.
  static constexpr std::array<double, 3> node{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weight{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  auto cell = [&](double a, double c) {
    const double mid = 0.5 * (a + c);
    const double half = 0.5 * (c - a);
    double s = 0;
    for (int q = 0; q < 3; ++q) s += weight[q] * p(mid + half * node[q]);
    return s * half;
  };
  double total = 0.0;
  const auto end = std::upper_bound(x_.begin(), x_.end(), b);
  for (auto it = x_.begin(); it + 1 < end; ++it) total += cell(*it, *(it + 1));
  if (end != x_.begin() && *(end - 1) < b) total += cell(*(end - 1), b);
  return total;
}

}  // namespace fundsol

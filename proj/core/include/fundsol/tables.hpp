#pragma once

#include <memory>
#include <vector>

namespace fundsol {

/// Monotone cubic (PCHIP) interpolant of a table sampled on an increasing
/// grid. Flat runs of data stay flat, which keeps shock plateaus exact.
class TableInterpolant {
 public:
  TableInterpolant(const std::vector<double>& x, const std::vector<double>& y);

  double operator()(double u) const;
  double derivative(double u) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// Exact integral of the interpolant over [lo(), b].
  double integral_to(double b) const;

 private:
  double clamp(double u) const { return u < lo_ ? lo_ : (u > hi_ ? hi_ : u); }

  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::vector<double> x_;
  double lo_;
  double hi_;
};

}  // namespace fundsol

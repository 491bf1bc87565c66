#pragma once

#include <span>
#include <vector>

namespace fundsol {

/// Real polynomial with coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double x) const;
  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial integral() const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(double s) const;
  Polynomial operator*(const Polynomial& other) const;

  /// Roots of odd multiplicity in the open interval (lo, hi), strictly
  /// increasing. Isolation recurses on the derivative's roots; each monotone
  /// bracket with a sign change is refined by bisection to `xtol`.
  std::vector<double> sign_change_roots(double lo, double hi,
                                        double xtol = 1e-13) const;

  /// All distinct real roots in [lo, hi] including even-multiplicity ones
  /// (touching roots are found as local extrema with |p| below `ztol`).
  std::vector<double> roots(double lo, double hi, double xtol = 1e-13,
                            double ztol = 1e-12) const;

  static Polynomial from_roots(std::span<const double> roots, double lead = 1);

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace fundsol

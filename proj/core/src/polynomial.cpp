#include "fundsol/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "fundsol/roots.hpp"

namespace fundsol {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::integral() const {
  std::vector<double> c(coeffs_.size() + 1, 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    c[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<double> c(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) c[k] += other.coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + other * -1.0;
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (is_zero() || other.is_zero()) return {};
  std::vector<double> c(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j)
      c[i + j] += coeffs_[i] * other.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(std::span<const double> roots, double lead) {
  Polynomial p({lead});
  for (double r : roots) p = p * Polynomial({-r, 1.0});
  return p;
}

std::vector<double> Polynomial::sign_change_roots(double lo, double hi,
                                                  double xtol) const {
  std::vector<double> out;
  if (degree() <= 0 || !(hi > lo)) return out;
  if (degree() == 1) {
    const double r = -coeffs_[0] / coeffs_[1];
    if (r > lo && r < hi) out.push_back(r);
    return out;
  }
  std::vector<double> breaks{lo};
  for (double c : derivative().sign_change_roots(lo, hi, xtol)) breaks.push_back(c);
  breaks.push_back(hi);
  const auto& self = *this;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    const double pa = self(a);
    const double pb = self(b);
    if ((pa < 0.0 && pb > 0.0) || (pa > 0.0 && pb < 0.0)) {
      out.push_back(bisect(self, a, b, xtol));
    }
  }
  // A root may land exactly on an interior extremum only without a sign
  // change, so the monotone brackets above are exhaustive.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [xtol](double x, double y) { return std::abs(x - y) <= xtol; }),
            out.end());
  return out;
}

std::vector<double> Polynomial::roots(double lo, double hi, double xtol,
                                      double ztol) const {
  std::vector<double> out = sign_change_roots(lo, hi, xtol);
  if (degree() >= 2) {
    for (double c : derivative().sign_change_roots(lo, hi, xtol))
      if (std::abs((*this)(c)) <= ztol) out.push_back(c);
  }
  for (double e : {lo, hi})
    if (std::abs((*this)(e)) <= ztol) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [xtol](double x, double y) { return std::abs(x - y) <= 10 * xtol; }),
            out.end());
  return out;
}

}  // namespace fundsol

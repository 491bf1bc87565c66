#pragma once

#include <utility>
#include <vector>

#include "fundsol/polynomial.hpp"

namespace fundsol {

/// One polynomial piece of the flux, valid on [lo, hi]. Coefficients are in
/// the global variable u, ascending degree.
struct FluxPiece {
  double lo = 0;
  double hi = 0;
  Polynomial value;
  Polynomial slope;
  Polynomial curvature;
};

/// Constant and linear part removed from a raw flux. A normalized solution
/// v(x,t) maps back to the original law as u(x,t) = v(x - drift*t, t).
struct NormalizationRecord {
  double offset = 0;
  double drift = 0;

  double to_original_x(double x, double t) const { return x + drift * t; }
  double to_normalized_x(double x, double t) const { return x - drift * t; }
};

enum class Curvature { convex, concave, affine };

struct CurvatureInterval {
  double lo;
  double hi;
  Curvature kind;
};

/// Sign-change roots of f'' plus the extent of affine (f'' = 0) pieces.
struct InflectionSet {
  std::vector<double> points;
  std::vector<std::pair<double, double>> affine_bands;
};

/// Piecewise-polynomial, C^1 flux on [0, domain_max]. Immutable.
class Flux {
 public:
  static constexpr double kJoinTolerance = 1e-9;

  /// Throws DomainError when pieces are not contiguous from 0 or the joins
  /// are not C^1 within kJoinTolerance (relative to the local magnitude).
  Flux(std::vector<std::pair<std::pair<double, double>, std::vector<double>>> pieces);
  static Flux polynomial(std::vector<double> coeffs, double domain_max);

  double operator()(double u) const { return piece(u).value(u); }
  double slope(double u) const { return piece(u).slope(u); }
  double curvature(double u) const { return piece(u).curvature(u); }

  double domain_max() const { return domain_max_; }
  const std::vector<FluxPiece>& pieces() const { return pieces_; }

  InflectionSet inflections(double u_max) const;
  /// Maximal intervals of constant curvature sign covering [0, u_max].
  std::vector<CurvatureInterval> curvature_intervals(double u_max) const;

  /// Minimum of f on [0, u_max]; negative iff f([0,u_max]) leaves [0,inf).
  double min_value(double u_max) const;
  double max_abs_slope(double lo, double hi) const;

  /// f(domain_max)/domain_max > max_chord_slope.
  bool superlinear_witness(double max_chord_slope) const;

  /// Same flux with every piece shifted by the affine map a + b*u.
  Flux minus_affine(double a, double b) const;

 private:
  Flux() = default;
  const FluxPiece& piece(double u) const;

  std::vector<FluxPiece> pieces_;
  double domain_max_ = 0;
};

/// f~(u) = f(u) - f(0) - f'(0) u.
std::pair<Flux, NormalizationRecord> normalize(const Flux& raw);

/// Rankine-Hugoniot speed (f(u1)-f(u2))/(u1-u2). Throws
/// DegenerateChordError when |u1-u2| < 1e-12 max(1,|u1|,|u2|).
double rh_speed(const Flux& f, double u1, double u2);

/// Sign-change roots of f'' on (0, u_max).
std::vector<double> inflection_points(const Flux& f, double u_max);

}  // namespace fundsol

#include "fundsol/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fundsol/errors.hpp"

namespace fundsol {

namespace {

FluxPiece make_piece(double lo, double hi, Polynomial p) {
  FluxPiece fp;
  fp.lo = lo;
  fp.hi = hi;
  fp.slope = p.derivative();
  fp.curvature = fp.slope.derivative();
  fp.value = std::move(p);
  return fp;
}

}  // namespace

Flux::Flux(std::vector<std::pair<std::pair<double, double>, std::vector<double>>> pieces) {
  if (pieces.empty()) throw DomainError("flux: no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first.first < b.first.first; });
  if (pieces.front().first.first != 0.0)
    throw DomainError("flux: first piece must start at u=0");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto [lo, hi] = pieces[i].first;
    if (!(hi > lo)) throw DomainError("flux: empty piece interval");
    if (i > 0 && std::abs(pieces[i - 1].first.second - lo) > 0.0) {
      std::ostringstream os;
      os << "flux: gap or overlap between pieces at u=" << lo;
      throw DomainError(os.str());
    }
    pieces_.push_back(make_piece(lo, hi, Polynomial(pieces[i].second)));
  }
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double u = pieces_[i].lo;
    const auto& l = pieces_[i - 1];
    const auto& r = pieces_[i];
    const double scale_v = 1.0 + std::abs(l.value(u));
    const double scale_d = 1.0 + std::abs(l.slope(u));
    if (std::abs(l.value(u) - r.value(u)) > kJoinTolerance * scale_v ||
        std::abs(l.slope(u) - r.slope(u)) > kJoinTolerance * scale_d) {
      std::ostringstream os;
      os.precision(17);
      os << "flux: not C1 at breakpoint u=" << u;
      throw DomainError(os.str());
    }
  }
  domain_max_ = pieces_.back().hi;
}

Flux Flux::polynomial(std::vector<double> coeffs, double domain_max) {
  return Flux({{{0.0, domain_max}, std::move(coeffs)}});
}

const FluxPiece& Flux::piece(double u) const {
  if (pieces_.size() == 1) return pieces_.front();
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), u,
                             [](const FluxPiece& p, double x) { return p.hi < x; });
  if (it == pieces_.end()) return pieces_.back();
  return *it;
}

InflectionSet Flux::inflections(double u_max) const {
  InflectionSet out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (p.lo >= u_max) break;
    const double hi = std::min(p.hi, u_max);
    if (p.curvature.is_zero()) {
      out.affine_bands.emplace_back(p.lo, hi);
      continue;
    }
    for (double r : p.curvature.sign_change_roots(p.lo, hi)) out.points.push_back(r);
    if (i + 1 < pieces_.size() && p.hi < u_max) {
      const auto& q = pieces_[i + 1];
      if (q.curvature.is_zero()) continue;
      const double span_l = p.hi - p.lo;
      const double span_r = q.hi - q.lo;
      const double left = p.curvature(p.hi - 1e-9 * span_l);
      const double right = q.curvature(q.lo + 1e-9 * span_r);
      if ((left < 0 && right > 0) || (left > 0 && right < 0)) out.points.push_back(p.hi);
    }
  }
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::remove_if(out.points.begin(), out.points.end(),
                                  [u_max](double x) { return x <= 0.0 || x >= u_max; }),
                   out.points.end());
  return out;
}

std::vector<CurvatureInterval> Flux::curvature_intervals(double u_max) const {
  const InflectionSet inf = inflections(u_max);
  std::vector<double> cuts{0.0};
  for (double x : inf.points) cuts.push_back(x);
  for (auto [a, b] : inf.affine_bands) {
    cuts.push_back(a);
    cuts.push_back(b);
  }
  for (const auto& p : pieces_)
    if (p.lo > 0 && p.lo < u_max) cuts.push_back(p.lo);
  cuts.push_back(u_max);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<CurvatureInterval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    const auto& pc = piece(mid);
    Curvature kind;
    if (pc.curvature.is_zero())
      kind = Curvature::affine;
    else
      kind = pc.curvature(mid) >= 0 ? Curvature::convex : Curvature::concave;
    if (!out.empty() && out.back().kind == kind)
      out.back().hi = b;
    else
      out.push_back({a, b, kind});
  }
  return out;
}

double Flux::min_value(double u_max) const {
  double m = std::min((*this)(0.0), (*this)(u_max));
  for (const auto& p : pieces_) {
    if (p.lo >= u_max) break;
    const double hi = std::min(p.hi, u_max);
    m = std::min({m, p.value(p.lo), p.value(hi)});
    for (double c : p.slope.sign_change_roots(p.lo, hi)) m = std::min(m, p.value(c));
  }
  return m;
}

double Flux::max_abs_slope(double lo, double hi) const {
  double m = std::max(std::abs(slope(lo)), std::abs(slope(hi)));
  for (const auto& p : pieces_) {
    const double a = std::max(lo, p.lo);
    const double b = std::min(hi, p.hi);
    if (!(b > a)) continue;
    m = std::max({m, std::abs(p.slope(a)), std::abs(p.slope(b))});
    for (double c : p.curvature.sign_change_roots(a, b)) m = std::max(m, std::abs(p.slope(c)));
  }
  return m;
}

bool Flux::superlinear_witness(double max_chord_slope) const {
  return (*this)(domain_max_) / domain_max_ > max_chord_slope;
}

Flux Flux::minus_affine(double a, double b) const {
  Flux out;
  out.domain_max_ = domain_max_;
  const Polynomial affine({a, b});
  for (const auto& p : pieces_) out.pieces_.push_back(make_piece(p.lo, p.hi, p.value - affine));
  return out;
}

std::pair<Flux, NormalizationRecord> normalize(const Flux& raw) {
  NormalizationRecord rec{raw(0.0), raw.slope(0.0)};
  return {raw.minus_affine(rec.offset, rec.drift), rec};
}

double rh_speed(const Flux& f, double u1, double u2) {
  const double floor = 1e-12 * std::max({1.0, std::abs(u1), std::abs(u2)});
  if (std::abs(u1 - u2) < floor) throw DegenerateChordError(u1, u2);
  return (f(u1) - f(u2)) / (u1 - u2);
}

std::vector<double> inflection_points(const Flux& f, double u_max) {
  if (u_max > f.domain_max()) throw DomainError("inflection_points: u_max beyond domain");
  return f.inflections(u_max).points;
}

}  // namespace fundsol

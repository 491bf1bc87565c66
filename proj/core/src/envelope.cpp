#include "fundsol/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fundsol/errors.hpp"
#include "fundsol/roots.hpp"

namespace fundsol {

namespace {

// g = s * f, so that both envelopes reduce to a lower convex hull of g.
struct SignedFlux {
  const Flux& f;
  double s;
  double v(double u) const { return s * f(u); }
  double d(double u) const { return s * f.slope(u); }
};

struct Arc {
  double l;
  double r;
};

struct Bridge {
  double p;  // leaves the left object here
  double q;  // lands on the right object here
  double m;  // slope in g-space
};

// Lower common tangent between the convex arc [la, ra] and the convex arc
// [lb, rb] lying to its right; either may be a single point.
Bridge lower_bridge(const SignedFlux& g, double la, double ra, double lb, double rb) {
  auto land = [&](double p) {
    if (lb == rb) return lb;
    // N(q) = g'(q)(q-p) - (g(q)-g(p)) is nondecreasing on a convex arc, so
    // the minimal chord slope from p is attained at its unique zero.
    auto N = [&](double q) { return g.d(q) * (q - p) - g.v(q) + g.v(p); };
    if (N(lb) >= 0) return lb;
    if (N(rb) <= 0) return rb;
    return bisect(N, lb, rb, 0.0);
  };
  auto chord = [&](double p, double q) { return (g.v(q) - g.v(p)) / (q - p); };
  auto psi = [&](double p) { return g.d(p) - chord(p, land(p)); };
  double p;
  if (la == ra || psi(la) >= 0)
    p = la;
  else if (psi(ra) <= 0)
    p = ra;
  else
    p = bisect(psi, la, ra, 0.0);
  const double q = land(p);
  return {p, q, chord(p, q)};
}

Envelope hull_envelope(const Flux& f, double rho_bar, EnvelopeKind kind,
                       const EnvelopeOptions& opt) {
  if (!(rho_bar > 0) || rho_bar > f.domain_max() * (1 + 1e-12))
    throw DomainError("envelope: rho_bar must lie in (0, domain_max]");
  const double s = kind == EnvelopeKind::convex ? 1.0 : -1.0;
  const SignedFlux g{f, s};
  const Curvature arc_kind = kind == EnvelopeKind::convex ? Curvature::convex : Curvature::concave;

  std::vector<Arc> objects;
  const auto intervals = f.curvature_intervals(rho_bar);
  for (const auto& iv : intervals) {
    const bool on_arc = iv.kind == arc_kind || iv.kind == Curvature::affine;
    if (on_arc) {
      if (!objects.empty() && objects.back().r == iv.lo && objects.back().r > objects.back().l)
        objects.back().r = iv.hi;
      else
        objects.push_back({iv.lo, iv.hi});
    }
  }
  if (objects.empty() || objects.front().l > 0.0) objects.insert(objects.begin(), {0.0, 0.0});
  if (objects.back().r < rho_bar) objects.push_back({rho_bar, rho_bar});

  struct Node {
    Arc arc;
    double entry;
    double exit;
    double in_slope;
  };
  std::vector<Node> stack;
  stack.push_back({objects[0], objects[0].l, objects[0].r, -INFINITY});
  for (std::size_t k = 1; k < objects.size(); ++k) {
    const Arc& b = objects[k];
    for (;;) {
      Node& top = stack.back();
      const Bridge br = lower_bridge(g, top.entry, top.arc.r, b.l, b.r);
      if (stack.size() > 1 && br.p <= top.entry && br.m <= top.in_slope) {
        stack.pop_back();
        continue;
      }
      top.exit = br.p;
      stack.push_back({b, br.q, b.r, br.m});
      break;
    }
  }

  const double width_floor = opt.min_width * std::max(1.0, rho_bar);
  std::vector<Segment> raw;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (i > 0) {
      Segment lin;
      lin.u_lo = stack[i - 1].exit;
      lin.u_hi = stack[i].entry;
      lin.shape = SegmentShape::linear;
      raw.push_back(lin);
    }
    if (stack[i].exit - stack[i].entry > width_floor) {
      Segment fol;
      fol.u_lo = stack[i].entry;
      fol.u_hi = stack[i].exit;
      fol.shape = SegmentShape::follows_flux;
      raw.push_back(fol);
    }
  }

  Envelope env;
  env.rho_bar = rho_bar;
  env.kind = kind;
  for (const Segment& seg : raw) {
    if (seg.u_hi - seg.u_lo <= width_floor && seg.is_linear()) continue;
    if (!env.segments.empty() && env.segments.back().shape == seg.shape)
      env.segments.back().u_hi = seg.u_hi;
    else
      env.segments.push_back(seg);
  }
  if (env.segments.empty()) {
    env.segments.push_back({0.0, rho_bar, SegmentShape::follows_flux, 0, 0});
  }
  env.segments.front().u_lo = 0.0;
  env.segments.back().u_hi = rho_bar;
  for (Segment& seg : env.segments) {
    if (!seg.is_linear()) continue;
    seg.slope = (f(seg.u_hi) - f(seg.u_lo)) / (seg.u_hi - seg.u_lo);
    seg.intercept = f(seg.u_lo) - seg.slope * seg.u_lo;
  }
  env.partition.push_back(0.0);
  for (const Segment& seg : env.segments) env.partition.push_back(seg.u_hi);

  for (std::size_t i = 1; i + 1 < env.partition.size(); ++i) {
    const double a = env.partition[i];
    const Segment& lin = env.segments[i - 1].is_linear() ? env.segments[i - 1] : env.segments[i];
    const double resid = std::abs(lin.slope - f.slope(a));
    // The chord slope itself carries cancellation error on short segments.
    const double chord_noise = 64 * std::numeric_limits<double>::epsilon() *
                               (std::abs(f(lin.u_lo)) + std::abs(f(lin.u_hi))) / (lin.u_hi - lin.u_lo);
    if (resid > opt.tangency_tol * (1.0 + std::abs(lin.slope)) + chord_noise) {
      std::ostringstream os;
      os.precision(17);
      os << "envelope: tangency refinement failed on [" << lin.u_lo << ", " << lin.u_hi
         << "], residual " << resid;
      throw DomainError(os.str());
    }
  }
  return env;
}

Signature signature_of(const Envelope& conv, const Envelope& conc) {
  return {conv.shape_string(), conc.shape_string()};
}

}  // namespace

std::size_t Envelope::segment_index(double u) const {
  if (u <= segments.front().u_hi) return 0;
  auto it = std::lower_bound(segments.begin(), segments.end(), u,
                             [](const Segment& s, double x) { return s.u_hi < x; });
  if (it == segments.end()) return segments.size() - 1;
  return static_cast<std::size_t>(it - segments.begin());
}

double Envelope::value(const Flux& f, double u) const {
  const Segment& s = segment_at(u);
  return s.is_linear() ? s.intercept + s.slope * u : f(u);
}

double Envelope::derivative(const Flux& f, double u) const {
  const Segment& s = segment_at(u);
  return s.is_linear() ? s.slope : f.slope(u);
}

std::string Envelope::shape_string() const {
  std::string out;
  for (const auto& s : segments) out.push_back(s.is_linear() ? 'L' : 'F');
  return out;
}

std::size_t Envelope::linear_count() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const Segment& s) { return s.is_linear(); }));
}

Envelope convex_envelope(const Flux& f, double rho_bar, const EnvelopeOptions& opt) {
  return hull_envelope(f, rho_bar, EnvelopeKind::convex, opt);
}

Envelope concave_envelope(const Flux& f, double rho_bar, const EnvelopeOptions& opt) {
  return hull_envelope(f, rho_bar, EnvelopeKind::concave, opt);
}

Envelope envelope_oracle(const Flux& f, double rho_bar, int n_samples, EnvelopeKind kind) {
  if (n_samples < 64) throw DomainError("envelope_oracle: need at least 64 samples");
  const double s = kind == EnvelopeKind::convex ? 1.0 : -1.0;
  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<double> u(n + 1), y(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    u[i] = rho_bar * static_cast<double>(i) / static_cast<double>(n);
    y[i] = s * f(u[i]);
  }
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i <= n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (u[b] - u[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (u[i] - u[a]);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  Envelope env;
  env.rho_bar = rho_bar;
  env.kind = kind;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t a = hull[k];
    const std::size_t b = hull[k + 1];
    const SegmentShape shape = b - a == 1 ? SegmentShape::follows_flux : SegmentShape::linear;
    if (shape == SegmentShape::follows_flux && !env.segments.empty() &&
        !env.segments.back().is_linear()) {
      env.segments.back().u_hi = u[b];
      continue;
    }
    Segment seg{u[a], u[b], shape, 0, 0};
    if (shape == SegmentShape::linear) {
      seg.slope = (f(u[b]) - f(u[a])) / (u[b] - u[a]);
      seg.intercept = f(u[a]) - seg.slope * u[a];
    }
    env.segments.push_back(seg);
  }
  env.partition.push_back(0.0);
  for (const auto& seg : env.segments) env.partition.push_back(seg.u_hi);
  return env;
}

Signature signature_at(const Flux& f, double rho_bar, const EnvelopeOptions& opt) {
  return signature_of(convex_envelope(f, rho_bar, opt), concave_envelope(f, rho_bar, opt));
}

const CriticalLevel* CriticalLevelCatalogue::next_below(double rho) const {
  for (const auto& l : levels)
    if (l.rho < rho) return &l;
  return nullptr;
}

namespace {

LevelClass classify_level(const Signature& above, const Signature& below) {
  const bool below_double = !below.convex.empty() && !below.concave.empty() &&
                            below.convex.back() == 'L' && below.concave.back() == 'L';
  const bool above_double = above.convex.back() == 'L' && above.concave.back() == 'L';
  if (below_double && !above_double) return LevelClass::merging_candidate;
  auto side_change = [](const std::string& a, const std::string& b) -> LevelClass {
    if (a == b) return LevelClass::other;
    if (b.size() == a.size() + 2 && a.back() == 'L' && b.compare(0, a.size() - 1, a, 0, a.size() - 1) == 0 &&
        b.substr(a.size() - 1) == "LFL")
      return LevelClass::branching;
    if (b.size() == a.size() + 1 && a.front() == 'L' && b.front() == 'F' && b.substr(1) == a)
      return LevelClass::transforming;
    return LevelClass::other;
  };
  const LevelClass cv = side_change(above.convex, below.convex);
  const LevelClass cc = side_change(above.concave, below.concave);
  if (above.convex == below.convex) return cc;
  if (above.concave == below.concave) return cv;
  return LevelClass::other;
}

double largest_interior_point(const Envelope& a, const Envelope& b) {
  double best = 0.0;
  for (const Envelope* e : {&a, &b})
    for (std::size_t i = 1; i + 1 < e->partition.size(); ++i) best = std::max(best, e->partition[i]);
  return best;
}

}  // namespace

CriticalLevelCatalogue critical_levels(const Flux& f, double rho_max, const CatalogueOptions& opt) {
  if (rho_max > f.domain_max() * (1 + 1e-12)) throw DomainError("critical_levels: rho_max beyond domain");
  CriticalLevelCatalogue cat;
  cat.rho_max = rho_max;
  const auto infl = f.inflections(rho_max);
  if (infl.points.empty() && infl.affine_bands.empty()) {
    cat.signatures.push_back(signature_at(f, rho_max, opt.envelope));
    return cat;
  }
  double first = rho_max;
  if (!infl.points.empty()) first = std::min(first, infl.points.front());
  if (!infl.affine_bands.empty()) first = std::min(first, std::max(infl.affine_bands.front().first, 1e-6 * rho_max));
  const double rho_min = 0.5 * first;
  const int n = std::max(opt.sweep_levels, 8);

  auto sig = [&](double r) { return signature_at(f, r, opt.envelope); };
  struct Change {
    double rho;
    Signature above;
    Signature below;
  };
  std::vector<Change> changes;
  // Recursive refinement of [lo, hi] where sig(lo) != sig(hi).
  auto refine = [&](auto&& self, double lo, double hi, const Signature& s_lo,
                    const Signature& s_hi, int depth) -> void {
    if (hi - lo <= opt.level_tol) {
      changes.push_back({0.5 * (lo + hi), s_hi, s_lo});
      return;
    }
    if (depth > 200) throw DomainError("critical_levels: refinement did not converge");
    const double mid = 0.5 * (lo + hi);
    const Signature s_mid = sig(mid);
    if (!(s_mid == s_lo) && !(s_mid == s_hi)) {
      self(self, mid, hi, s_mid, s_hi, depth + 1);
      self(self, lo, mid, s_lo, s_mid, depth + 1);
      return;
    }
    if (s_mid == s_lo)
      self(self, mid, hi, s_mid, s_hi, depth + 1);
    else
      self(self, lo, mid, s_lo, s_mid, depth + 1);
  };

  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) grid[i] = rho_max - (rho_max - rho_min) * i / n;
  Signature prev = sig(grid[0]);
  cat.signatures.push_back(prev);
  for (int i = 1; i <= n; ++i) {
    Signature cur = sig(grid[i]);
    if (!(cur == prev)) refine(refine, grid[i], grid[i - 1], cur, prev, 0);
    prev = cur;
  }
  std::sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) { return a.rho > b.rho; });
  for (std::size_t i = 1; i < changes.size(); ++i)
    if (changes[i - 1].rho - changes[i].rho < 4 * opt.level_tol)
      throw DomainError("critical_levels: sweep too coarse to separate two levels near rho=" +
                        std::to_string(changes[i].rho));

  const bool negative_values = f.min_value(rho_max) < 0.0;
  std::vector<CriticalLevel> all;
  for (const auto& c : changes) {
    CriticalLevel lvl;
    lvl.rho = c.rho;
    lvl.above = c.above;
    lvl.below = c.below;
    lvl.kind = classify_level(c.above, c.below);
    lvl.eq20_holds = lvl.kind == LevelClass::transforming && negative_values;
    all.push_back(lvl);
  }
  // A merging candidate sends rho_bar straight to the largest interior
  // partition point; levels inside the jump are never visited.
  double skip_until = INFINITY;
  for (const auto& lvl : all) {
    if (skip_until != INFINITY && lvl.rho > skip_until) continue;
    skip_until = INFINITY;
    cat.levels.push_back(lvl);
    cat.signatures.push_back(lvl.below);
    if (lvl.kind == LevelClass::merging_candidate) {
      const double r = lvl.rho - 10 * opt.level_tol;
      skip_until = largest_interior_point(convex_envelope(f, r, opt.envelope),
                                          concave_envelope(f, r, opt.envelope));
    }
  }
  return cat;
}

const char* to_string(LevelClass c) {
  switch (c) {
    case LevelClass::branching: return "branching";
    case LevelClass::merging_candidate: return "merging_candidate";
    case LevelClass::transforming: return "transforming";
    case LevelClass::other: return "other";
  }
  return "?";
}

const char* to_string(EnvelopeKind k) { return k == EnvelopeKind::convex ? "convex" : "concave"; }

}  // namespace fundsol

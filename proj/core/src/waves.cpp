#include "fundsol/waves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fundsol/roots.hpp"

namespace fundsol {

namespace {

// Largest u in [0, rho] with pred(u); 0 when pred(0) fails.
template <class Pred>
double sup_where(const Pred& pred, double rho) {
  if (!pred(0.0)) return 0.0;
  if (pred(rho)) return rho;
  return bisect_predicate(pred, 0.0, rho, 1e-15 * rho);
}

// Inverts a profile given by its left branch xl (nondecreasing in u) and
// right branch xr (nonincreasing) on [0, rho], meeting at zeta.
template <class XL, class XR>
std::pair<double, double> invert_profile(const XL& xl, const XR& xr, double rho, double zeta, double x) {
  const double width = std::abs(xr(0.0) - xl(0.0));
  const double tol = 1e-11 * (1.0 + width);
  double ul, ur;
  if (x < zeta - tol) {
    ul = sup_where([&](double u) { return xl(u) < x - tol; }, rho);
    ur = sup_where([&](double u) { return xl(u) <= x + tol; }, rho);
  } else if (x > zeta + tol) {
    ul = sup_where([&](double u) { return xr(u) >= x - tol; }, rho);
    ur = sup_where([&](double u) { return xr(u) > x + tol; }, rho);
  } else {
    ul = sup_where([&](double u) { return xl(u) < x - tol; }, rho);
    ur = sup_where([&](double u) { return xr(u) > x + tol; }, rho);
  }
  if (std::abs(ul - ur) <= 1e-7 * rho) ul = ur = 0.5 * (ul + ur);
  return {ul, ur};
}

}  // namespace

std::pair<double, double> eval_solution(const SolverState& s, double x) {
  const StateView v(s);
  return invert_profile([&](double u) { return v.h(u); }, [&](double u) { return v.k(u); }, s.rho_bar, s.zeta, x);
}

SolutionField::SolutionField(const Timeline& tl) : tl_(tl), views_(tl.frames.size()) {
  if (tl.frames.empty()) throw DomainError("timeline has no frames");
}

double SolutionField::t_max() const { return tl_.frames.back().t; }

const StateView& SolutionField::view(std::size_t i) const {
  if (!views_[i]) views_[i] = std::make_unique<StateView>(tl_.frames[i]);
  return *views_[i];
}

std::pair<double, double> SolutionField::value(double x, double t) const {
  const auto& fr = tl_.frames;
  t = std::clamp(t, t_min(), t_max());
  auto it = std::upper_bound(fr.begin(), fr.end(), t, [](double a, const SolverState& s) { return a < s.t; });
  const std::size_t i = it == fr.begin() ? 0 : static_cast<std::size_t>(it - fr.begin()) - 1;
  const StateView& a = view(i);
  if (i + 1 >= fr.size() || fr[i + 1].t <= fr[i].t) {
    return invert_profile([&](double u) { return a.h(u); }, [&](double u) { return a.k(u); }, fr[i].rho_bar,
                          fr[i].zeta, x);
  }
  const StateView& b = view(i + 1);
  const double w = (t - fr[i].t) / (fr[i + 1].t - fr[i].t);
  const double rho = (1 - w) * fr[i].rho_bar + w * fr[i + 1].rho_bar;
  const double zeta = (1 - w) * fr[i].zeta + w * fr[i + 1].zeta;
  return invert_profile([&](double u) { return (1 - w) * a.h(u) + w * b.h(u); },
                        [&](double u) { return (1 - w) * a.k(u) + w * b.k(u); }, rho, zeta, x);
}

double SolutionField::wave_speed(double x, double t, bool from_left) const {
  const auto [ul, ur] = value(x, t);
  return tl_.flux->slope(from_left ? ul : ur);
}

std::optional<double> SolutionField::shock_x(int id, double t) const {
  if (id < 0 || id >= static_cast<int>(tl_.shock_curves.size())) return std::nullopt;
  const auto& s = tl_.shock_curves[id].samples;
  if (s.empty() || t < s.front().t || t > s.back().t) return std::nullopt;
  auto it = std::upper_bound(s.begin(), s.end(), t, [](double a, const ShockSample& p) { return a < p.t; });
  if (it == s.end()) return s.back().x;
  const ShockSample& hi = *it;
  const ShockSample& lo = *(it - 1);
  if (hi.t <= lo.t) return lo.x;
  const double w = (t - lo.t) / (hi.t - lo.t);
  return (1 - w) * lo.x + w * hi.x;
}

std::optional<double> SolutionField::shock_speed(int id, double t) const {
  if (id < 0 || id >= static_cast<int>(tl_.shock_curves.size())) return std::nullopt;
  const auto& s = tl_.shock_curves[id].samples;
  if (s.empty() || t < s.front().t || t > s.back().t) return std::nullopt;
  auto it = std::upper_bound(s.begin(), s.end(), t, [](double a, const ShockSample& p) { return a < p.t; });
  if (it == s.end()) return s.back().speed;
  const ShockSample& hi = *it;
  const ShockSample& lo = *(it - 1);
  if (hi.t <= lo.t) return lo.speed;
  const double w = (t - lo.t) / (hi.t - lo.t);
  return (1 - w) * lo.speed + w * hi.speed;
}

namespace {

std::vector<ShockDescriptor> shocks_at(const Flux& f, double rho, const ClassifyOptions& copt) {
  return shocks_from_state(f, convex_envelope(f, rho), concave_envelope(f, rho), copt);
}

// Limit as d -> 0 of samples s(d), s(4d), s(16d) of  s* + k sqrt(d + e).
double sqrt_limit(double s1, double s4, double s16, double d) {
  const double lower = s4 - s1, upper = s16 - s4;
  const double linear = s1 - lower / 3.0;
  if (lower == 0.0 || upper == 0.0 || (lower > 0) != (upper > 0)) return linear;
  const double q = lower / upper;
  // Differences of square roots in cancellation-free form.
  auto gap = [](double a, double b) { return (a - b) / (std::sqrt(a) + std::sqrt(b)); };
  auto ratio = [&](double e) { return gap(4 * d + e, d + e) / gap(16 * d + e, 4 * d + e); };
  // ratio falls from 0.81 at e = -d towards 0.25 (linear behaviour) as e grows.
  if (!(q < ratio(-d) && q > ratio(1e4 * d))) return linear;
  const double e = bisect([&](double x) { return ratio(x) - q; }, -d, 1e4 * d, 1e-15 * d);
  const double k = lower / gap(4 * d + e, d + e);
  return s1 - k * std::sqrt(d + e);
}

}  // namespace

EventSlopes event_slopes(const Flux& f, const PlannedEvent& p, const ClassifyOptions& copt) {
  EventSlopes out;
  const double L = p.level.rho;
  const double d_up = 1e-9 * std::max(1.0, L);
  const auto a1 = shocks_at(f, L + d_up, copt);
  const auto a2 = shocks_at(f, L + 2 * d_up, copt);
  const double ref = p.rho_after;
  const double d = std::min(1e-7 * std::max(1.0, ref), (ref - p.below_at) / 16);
  const auto b1 = shocks_at(f, ref - d, copt);
  const auto b4 = shocks_at(f, ref - 4 * d, copt);
  const auto b16 = shocks_at(f, ref - 16 * d, copt);
  for (int k : p.incoming_index) {
    if (k >= static_cast<int>(std::min(a1.size(), a2.size())))
      throw ConsistencyError("event_slopes: shock structure above the level is not stable");
    out.incoming.push_back(2 * a1[k].speed - a2[k].speed);
  }
  for (int j : p.outgoing_index) {
    if (j >= static_cast<int>(std::min({b1.size(), b4.size(), b16.size()})) || b1[j].type != b16[j].type)
      throw ConsistencyError("event_slopes: shock structure below the level is not stable");
    out.outgoing.push_back(sqrt_limit(b1[j].speed, b4[j].speed, b16[j].speed, d));
  }
  return out;
}

namespace {

Envelope piece_envelope(const Flux& f, const FanPiece& p) {
  return p.kind == EnvelopeKind::convex ? convex_envelope(f, p.rho_bar) : concave_envelope(f, p.rho_bar);
}

}  // namespace

std::pair<double, double> fan_edges(const Flux& f, const FanPiece& piece) {
  const Envelope e = piece_envelope(f, piece);
  const double a = e.derivative(f, piece.u_lo);
  const double b = e.derivative(f, piece.u_hi);
  return {std::min(a, b), std::max(a, b)};
}

double centered_fan(const Flux& f, const FanPiece& piece, double x0, double t0, double x, double t) {
  if (!(t > t0)) throw OutOfFan("centered fan: point lies at or before the fan centre");
  const Envelope e = piece_envelope(f, piece);
  const double xi = (x - x0) / (t - t0);
  const double d_lo = e.derivative(f, piece.u_lo);
  const double d_hi = e.derivative(f, piece.u_hi);
  const double tol = 1e-12 * (1.0 + std::abs(d_lo) + std::abs(d_hi));
  if (xi < std::min(d_lo, d_hi) - tol || xi > std::max(d_lo, d_hi) + tol) {
    std::ostringstream os;
    os << "centered fan: slope " << xi << " outside the wedge [" << std::min(d_lo, d_hi) << ", "
       << std::max(d_lo, d_hi) << "]";
    throw OutOfFan(os.str());
  }
  const bool convex = piece.kind == EnvelopeKind::convex;
  auto below = [&](double u) { return convex ? e.derivative(f, u) <= xi : e.derivative(f, u) >= xi; };
  if (!below(piece.u_lo)) return piece.u_lo;
  if (below(piece.u_hi)) return piece.u_hi;
  return bisect_predicate(below, piece.u_lo, piece.u_hi, 1e-15 * std::max(1.0, piece.u_hi));
}

FanPiece origin_fan(const Flux&, double rho0) { return {EnvelopeKind::convex, rho0, 0.0, rho0}; }

std::vector<FanPiece> merge_fan_pieces(const Flux& f, const FanSeed& seed) {
  const double before = seed.rho_before * (1 + 1e-8);
  const double after = seed.rho_after * (1 - 1e-8);
  std::vector<FanPiece> out;
  for (EnvelopeKind kind : {EnvelopeKind::convex, EnvelopeKind::concave}) {
    const bool convex = kind == EnvelopeKind::convex;
    const Envelope eb = convex ? convex_envelope(f, before) : concave_envelope(f, before);
    const Envelope ea = convex ? convex_envelope(f, after) : concave_envelope(f, after);
    for (const Segment& s : ea.segments) {
      if (s.is_linear()) continue;
      // Subtract the parts that already followed f before the jump.
      std::vector<std::pair<double, double>> parts{{s.u_lo, s.u_hi}};
      for (const Segment& p : eb.segments) {
        if (p.is_linear()) continue;
        std::vector<std::pair<double, double>> next;
        for (auto [lo, hi] : parts) {
          if (p.u_hi <= lo || p.u_lo >= hi) {
            next.emplace_back(lo, hi);
            continue;
          }
          if (p.u_lo > lo) next.emplace_back(lo, p.u_lo);
          if (p.u_hi < hi) next.emplace_back(p.u_hi, hi);
        }
        parts = std::move(next);
      }
      for (auto [lo, hi] : parts)
        if (hi - lo > 1e-7 * std::max(1.0, after)) out.push_back({kind, after, lo, hi});
    }
  }
  return out;
}

namespace {

ShockType type_at(const ShockCurve& c, double t) {
  auto it = std::upper_bound(c.samples.begin(), c.samples.end(), t,
                             [](double a, const ShockSample& p) { return a < p.t; });
  if (it == c.samples.begin()) return c.samples.front().type;
  return (it - 1)->type;
}

}  // namespace

CharacteristicCurve trace_characteristic(const SolutionField& field, double x0, double t0, TraceDirection dir,
                                         const TraceOptions& opt) {
  if (t0 < field.t_min() * (1 - 1e-12) || t0 > field.t_max() * (1 + 1e-12))
    throw DomainError("trace_characteristic: start time outside the timeline");
  CharacteristicCurve c;
  c.direction = dir;
  const bool fwd = dir == TraceDirection::forward;
  const double t_stop = fwd ? field.t_max() : field.t_min();
  const auto& curves = field.timeline().shock_curves;
  double t = std::clamp(t0, field.t_min(), field.t_max());
  double x = x0;
  c.samples.emplace_back(t, x);
  for (std::size_t step = 0;; ++step) {
    if (fwd ? t >= t_stop * (1 - 1e-12) : t <= t_stop * (1 + 1e-12)) {
      c.terminal = fwd ? TraceTerminal::reaches_t_end : TraceTerminal::reaches_t0;
      return c;
    }
    if (step >= opt.max_steps) {
      c.terminal = TraceTerminal::truncated;
      c.diagnostic = "step limit reached at t=" + std::to_string(t);
      return c;
    }
    const double dt = std::min(opt.rel_step * t, std::abs(t_stop - t));
    const double tn = fwd ? t + dt : t - dt;
    const double v1 = field.wave_speed(x, t);
    const double xp = x + (tn - t) * v1;
    const double v2 = field.wave_speed(xp, tn);
    const double xn = x + (tn - t) * 0.5 * (v1 + v2);

    // Earliest shock crossed during the step.
    double best_s = 2.0;
    int best_id = -1;
    bool tangent = false;
    bool via_predictor = false;
    for (const auto& sc : curves) {
      if (sc.samples.empty()) continue;
      const auto X0 = field.shock_x(sc.id, t);
      const auto X1 = field.shock_x(sc.id, tn);
      if (!X0 || !X1) continue;
      const double d0 = x - *X0;
      const double d1 = xn - *X1;
      // The corrector slows a curve down next to a shock with a slower state
      // behind it, so the predictor is checked as well.
      const double dp = xp - *X1;
      double s = 2.0;
      bool tan = false;
      const bool pred = (d0 < 0) != (dp < 0);
      if (d0 != 0 && (step > 0 || std::abs(d0) > 1e-12 * (1 + std::abs(x))) && ((d0 < 0) != (d1 < 0) || pred)) {
        // The corrector uses the speed beyond the shock once the predictor
        // has crossed, so the predictor line locates the crossing then.
        s = pred ? d0 / (d0 - dp) : d0 / (d0 - d1);
        // Characteristics run tangent to a left contact on its left side, to
        // a right contact on its right side and to a double contact on both.
        const ShockType type = type_at(sc, t + s * (tn - t));
        tan = type == ShockType::D || (type == ShockType::L && d0 < 0) || (type == ShockType::R && d0 > 0);
      }
      if (s < best_s) {
        best_s = s;
        best_id = sc.id;
        tangent = tan;
        via_predictor = pred;
      }
    }
    if (best_id >= 0) {
      const double tc = t + best_s * (tn - t);
      const double xc = x + best_s * ((via_predictor ? xp : xn) - x);
      c.samples.emplace_back(tc, xc);
      c.shock_id = best_id;
      c.end_speed = v1;
      c.shock_speed = field.shock_speed(best_id, tc).value_or(0.0);
      // On the contact side a curve arriving much faster than the contact
      // still meets it transversally.
      if (tangent && std::abs(c.end_speed - c.shock_speed) > 0.5 * (1.0 + std::abs(c.shock_speed))) tangent = false;
      c.terminal = tangent ? TraceTerminal::tangent_to_contact : TraceTerminal::absorbed_by_shock;
      return c;
    }
    t = tn;
    x = xn;
    c.samples.emplace_back(t, x);
  }
}

CharMap build_charmap(const Timeline& tl, const CharMapSpec& spec) {
  CharMap map;
  map.log_time = spec.log_time;
  const Flux& f = *tl.flux;
  for (const auto& c : tl.shock_curves)
    if (!c.samples.empty()) map.shocks.push_back({c.id, c.samples});
  for (const auto& e : tl.events)
    map.events.push_back({e.time, e.x, e.kind, format_types(e.incoming) + " -> " + format_types(e.outgoing)});

  const double t_first = tl.frames.front().t;
  const double t_last = tl.frames.back().t;
  auto next_event_after = [&](double t) {
    for (const auto& e : tl.events)
      if (e.time > t) return e.time;
    return t_last;
  };
  {
    const auto [lo, hi] = fan_edges(f, origin_fan(f, tl.frames.front().rho_bar));
    map.fans.push_back({0.0, 0.0, lo, hi, next_event_after(t_first)});
  }
  for (const auto& seed : tl.fan_seeds)
    for (const auto& piece : merge_fan_pieces(f, seed)) {
      const auto [lo, hi] = fan_edges(f, piece);
      map.fans.push_back({seed.x, seed.t, lo, hi, next_event_after(seed.t)});
    }

  const SolutionField field(tl);
  for (const auto& seed : spec.characteristics)
    map.characteristics.push_back(trace_characteristic(field, seed.x, seed.t, seed.direction, spec.trace));

  map.t_min = t_first;
  map.t_max = t_last;
  double xlo = 0, xhi = 0;
  for (const auto& fr : tl.frames) {
    xlo = std::min(xlo, fr.h_bar.front());
    xhi = std::max(xhi, fr.k_bar.front());
  }
  for (const auto& c : map.characteristics)
    for (const auto& [t, x] : c.samples) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
  const double pad = 0.05 * std::max(xhi - xlo, 1e-12);
  map.x_min = xlo - pad;
  map.x_max = xhi + pad;

  if (spec.raster_nx > 0 && spec.raster_nt > 0) {
    map.raster.assign(spec.raster_nt, std::vector<double>(spec.raster_nx));
    for (int j = 0; j < spec.raster_nt; ++j) {
      const double r = (j + 0.5) / spec.raster_nt;
      const double t = spec.log_time ? t_first * std::pow(t_last / t_first, r) : t_first + r * (t_last - t_first);
      for (int i = 0; i < spec.raster_nx; ++i) {
        const double x = map.x_min + (i + 0.5) / spec.raster_nx * (map.x_max - map.x_min);
        const auto [ul, ur] = field.value(x, t);
        map.raster[j][i] = f.slope(0.5 * (ul + ur));
      }
    }
  }
  return map;
}

namespace {

constexpr double kWidth = 800, kHeight = 600, kMargin = 60;

struct Mapping {
  const CharMap& m;
  double px(double x) const { return kMargin + (x - m.x_min) / (m.x_max - m.x_min) * (kWidth - 2 * kMargin); }
  double tau(double t) const {
    return m.log_time ? std::log(std::max(t, m.t_min)) : t;
  }
  double py(double t) const {
    const double a = tau(m.t_min), b = tau(m.t_max);
    return kHeight - kMargin - (tau(t) - a) / (b - a) * (kHeight - 2 * kMargin);
  }
};

const char* shock_colour(ShockType t) {
  switch (t) {
    case ShockType::G: return "#000000";
    case ShockType::L: return "#1f5fbf";
    case ShockType::R: return "#c0392b";
    case ShockType::D: return "#218c3a";
  }
  return "#000000";
}

std::string raster_colour(double v, double vmax) {
  const double s = vmax > 0 ? std::clamp(v / vmax, -1.0, 1.0) : 0.0;
  const int r = s > 0 ? 255 : static_cast<int>(std::lround(255 * (1 + s)));
  const int b = s < 0 ? 255 : static_cast<int>(std::lround(255 * (1 - s)));
  const int g = static_cast<int>(std::lround(255 * (1 - std::abs(s))));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_charmap_svg(const CharMap& map, std::ostream& os) {
  const Mapping mp{map};
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!map.raster.empty()) {
    double vmax = 0;
    for (const auto& row : map.raster)
      for (double v : row) vmax = std::max(vmax, std::abs(v));
    const int nt = static_cast<int>(map.raster.size());
    const int nx = static_cast<int>(map.raster.front().size());
    const double cw = (kWidth - 2 * kMargin) / nx, ch = (kHeight - 2 * kMargin) / nt;
    os << "<g id=\"raster\">\n";
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nx; ++i)
        os << "<rect x=\"" << kMargin + i * cw << "\" y=\"" << kHeight - kMargin - (j + 1) * ch << "\" width=\"" << cw
           << "\" height=\"" << ch << "\" fill=\"" << raster_colour(map.raster[j][i], vmax) << "\"/>\n";
    os << "</g>\n";
  }
  os << "<g id=\"fans\" fill=\"#f3d27a\" fill-opacity=\"0.35\" stroke=\"none\">\n";
  for (const auto& w : map.fans) {
    const double t0 = std::max(w.t0, map.t_min);
    os << "<polygon points=\"" << mp.px(w.x0 + w.slope_lo * (t0 - w.t0)) << ',' << mp.py(t0) << ' '
       << mp.px(w.x0 + w.slope_lo * (w.t_until - w.t0)) << ',' << mp.py(w.t_until) << ' '
       << mp.px(w.x0 + w.slope_hi * (w.t_until - w.t0)) << ',' << mp.py(w.t_until) << ' '
       << mp.px(w.x0 + w.slope_hi * (t0 - w.t0)) << ',' << mp.py(t0) << "\"/>\n";
  }
  os << "</g>\n<g id=\"characteristics\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.6\">\n";
  for (const auto& c : map.characteristics) {
    os << "<polyline points=\"";
    for (const auto& [t, x] : c.samples) os << mp.px(x) << ',' << mp.py(t) << ' ';
    os << "\"/>\n";
  }
  os << "</g>\n<g id=\"shocks\" fill=\"none\" stroke-width=\"1.6\">\n";
  for (const auto& s : map.shocks) {
    // One polyline per run of equal type.
    std::size_t i = 0;
    while (i < s.samples.size()) {
      std::size_t j = i;
      while (j + 1 < s.samples.size() && s.samples[j + 1].type == s.samples[i].type) ++j;
      const std::size_t end = std::min(j + 1, s.samples.size() - 1);
      os << "<polyline stroke=\"" << shock_colour(s.samples[i].type) << "\" points=\"";
      for (std::size_t k = i; k <= end; ++k) os << mp.px(s.samples[k].x) << ',' << mp.py(s.samples[k].t) << ' ';
      os << "\"/>\n";
      const auto& mid = s.samples[(i + j) / 2];
      os << "<text x=\"" << mp.px(mid.x) + 4 << "\" y=\"" << mp.py(mid.t) << "\" font-size=\"11\" fill=\""
         << shock_colour(mid.type) << "\">" << to_char(mid.type) << "</text>\n";
      i = j + 1;
    }
  }
  os << "</g>\n<g id=\"events\">\n";
  for (const auto& e : map.events)
    os << "<circle cx=\"" << mp.px(e.x) << "\" cy=\"" << mp.py(e.t) << "\" r=\"3\" fill=\"#6a1b9a\"><title>"
       << to_string(e.kind) << ' ' << e.label << "</title></circle>\n";
  os << "</g>\n<g id=\"axes\" stroke=\"#000000\" font-size=\"12\">\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
     << kHeight - kMargin << "\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
     << "\"/>\n";
  os << std::setprecision(4) << std::defaultfloat;
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 18 << "\" stroke=\"none\">" << map.x_min
     << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 18
     << "\" text-anchor=\"end\" stroke=\"none\">" << map.x_max << "</text>\n";
  os << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\" stroke=\"none\">"
     << map.t_min << "</text>\n";
  os << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\" stroke=\"none\">"
     << map.t_max << "</text>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 20 << "\" stroke=\"none\">x</text>\n";
  os << "<text x=\"20\" y=\"" << kHeight / 2 << "\" stroke=\"none\">" << (map.log_time ? "log t" : "t")
     << "</text>\n";
  os << "</g>\n</svg>\n";
}

void write_charmap_csv(const CharMap& map, std::ostream& os) {
  os << std::setprecision(12);
  os << "entity,id,t,x,label\n";
  for (const auto& s : map.shocks)
    for (const auto& p : s.samples) os << "shock," << s.id << ',' << p.t << ',' << p.x << ',' << to_char(p.type) << '\n';
  for (std::size_t i = 0; i < map.characteristics.size(); ++i) {
    const auto& c = map.characteristics[i];
    for (const auto& [t, x] : c.samples) os << "characteristic," << i << ',' << t << ',' << x << ',' << to_string(c.direction) << '\n';
    const auto& [t, x] = c.samples.back();
    os << "characteristic_end," << i << ',' << t << ',' << x << ',' << to_string(c.terminal);
    if (c.shock_id >= 0) os << ':' << c.shock_id;
    os << '\n';
  }
  for (std::size_t i = 0; i < map.events.size(); ++i) {
    const auto& e = map.events[i];
    os << "event," << i << ',' << e.t << ',' << e.x << ',' << to_string(e.kind) << ' ' << e.label << '\n';
  }
  for (std::size_t i = 0; i < map.fans.size(); ++i) {
    const auto& w = map.fans[i];
    os << "fan," << i << ',' << w.t0 << ',' << w.x0 << ",apex\n";
    os << "fan," << i << ',' << w.t_until << ',' << w.x0 + w.slope_lo * (w.t_until - w.t0) << ",edge_lo\n";
    os << "fan," << i << ',' << w.t_until << ',' << w.x0 + w.slope_hi * (w.t_until - w.t0) << ",edge_hi\n";
  }
}

const char* to_string(TraceTerminal t) {
  switch (t) {
    case TraceTerminal::reaches_t0: return "reaches_t0";
    case TraceTerminal::reaches_t_end: return "reaches_t_end";
    case TraceTerminal::absorbed_by_shock: return "absorbed_by_shock";
    case TraceTerminal::tangent_to_contact: return "tangent_to_contact";
    case TraceTerminal::truncated: return "truncated";
  }
  return "?";
}

const char* to_string(TraceDirection d) { return d == TraceDirection::forward ? "forward" : "backward"; }

}  // namespace fundsol

#include "fundsol/weno.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fundsol/waves.hpp"

namespace fundsol {

namespace {

constexpr int kGhost = 3;

// Neumaier summation in a fixed order.
double stable_sum(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double s = 0, c = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double t = s + v[i];
    c += std::abs(s) >= std::abs(v[i]) ? (s - t) + v[i] : (v[i] - t) + s;
    s = t;
  }
  return s + c;
}

double weno5(double a, double b, double c, double d, double e, double eps) {
  const double q0 = (2 * a - 7 * b + 11 * c) / 6;
  const double q1 = (-b + 5 * c + 2 * d) / 6;
  const double q2 = (2 * c + 5 * d - e) / 6;
  const double b0 = 13.0 / 12 * (a - 2 * b + c) * (a - 2 * b + c) + 0.25 * (a - 4 * b + 3 * c) * (a - 4 * b + 3 * c);
  const double b1 = 13.0 / 12 * (b - 2 * c + d) * (b - 2 * c + d) + 0.25 * (b - d) * (b - d);
  const double b2 = 13.0 / 12 * (c - 2 * d + e) * (c - 2 * d + e) + 0.25 * (3 * c - 4 * d + e) * (3 * c - 4 * d + e);
  const double w0 = 0.1 / ((eps + b0) * (eps + b0));
  const double w1 = 0.6 / ((eps + b1) * (eps + b1));
  const double w2 = 0.3 / ((eps + b2) * (eps + b2));
  return (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
}

class Scheme {
 public:
  Scheme(const Flux& f, int n, double dx, double eps)
      : f_(f), n_(n), dx_(dx), eps_(eps), ext_(n + 2 * kGhost), fp_(ext_.size()), fm_(ext_.size()), flux_(n + 1) {}

  std::pair<double, double> range(const std::vector<double>& u) const {
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    return {*lo, *hi};
  }

  double alpha(const std::vector<double>& u) const {
    const auto [lo, hi] = range(u);
    return f_.max_abs_slope(lo, hi);
  }

  // out = -(F_{i+1/2} - F_{i-1/2}) / dx with splitting constant a.
  void rhs(const std::vector<double>& u, double a, std::vector<double>& out) {
    for (int i = 0; i < n_; ++i) ext_[i + kGhost] = u[i];
    for (int g = 0; g < kGhost; ++g) {
      ext_[g] = u.front();
      ext_[n_ + kGhost + g] = u.back();
    }
    for (std::size_t i = 0; i < ext_.size(); ++i) {
      const double fv = f_(ext_[i]);
      fp_[i] = 0.5 * (fv + a * ext_[i]);
      fm_[i] = 0.5 * (fv - a * ext_[i]);
    }
    // Interface j sits between extended cells j + kGhost - 1 and j + kGhost.
    for (int j = 0; j <= n_; ++j) {
      const int l = j + kGhost - 1;
      const double plus = weno5(fp_[l - 2], fp_[l - 1], fp_[l], fp_[l + 1], fp_[l + 2], eps_);
      const double minus = weno5(fm_[l + 3], fm_[l + 2], fm_[l + 1], fm_[l], fm_[l - 1], eps_);
      flux_[j] = plus + minus;
    }
    for (int i = 0; i < n_; ++i) out[i] = -(flux_[i + 1] - flux_[i]) / dx_;
  }

 private:
  const Flux& f_;
  int n_;
  double dx_;
  double eps_;
  std::vector<double> ext_, fp_, fm_, flux_;
};

void check_finite(const std::vector<double>& u, double t) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw NonfiniteValue(i, t);
}

ShockType type_at(const ShockCurve& c, double t) {
  const auto it = std::lower_bound(c.samples.begin(), c.samples.end(), t,
                                   [](const ShockSample& s, double x) { return s.t < x; });
  return it == c.samples.end() ? c.samples.back().type : it->type;
}

}  // namespace

NonfiniteValue::NonfiniteValue(std::size_t cell, double t)
    : ConsistencyError("weno: nonfinite value in cell " + std::to_string(cell) + " at t=" + std::to_string(t)),
      cell_(cell),
      t_(t) {}

const GridSnapshot& GridSolution::snapshot_at(double t, double rel_tol) const {
  for (const auto& s : snapshots)
    if (std::abs(s.t - t) <= rel_tol * std::max(1.0, std::abs(t))) return s;
  throw DomainError("grid solution has no snapshot at t=" + std::to_string(t));
}

std::vector<double> cell_averages(const std::vector<std::pair<double, double>>& profile, double x_lo, double dx,
                                  int cells) {
  std::vector<double> out(cells, 0.0);
  if (profile.empty()) return out;
  const double width = std::abs(profile.back().first - profile.front().first);
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const auto [xa, ua] = profile[k];
    const auto [xb, ub] = profile[k + 1];
    if (xb < xa - 1e-12 * (1 + width)) throw DomainError("cell_averages: profile x must be non-decreasing");
    if (!(xb > xa)) continue;
    const double slope = (ub - ua) / (xb - xa);
    const int first = std::max(0, static_cast<int>(std::floor((xa - x_lo) / dx)));
    const int last = std::min(cells - 1, static_cast<int>(std::floor((xb - x_lo) / dx)));
    for (int i = first; i <= last; ++i) {
      const double a = std::max(xa, x_lo + i * dx);
      const double b = std::min(xb, x_lo + (i + 1) * dx);
      if (!(b > a)) continue;
      const double mid = 0.5 * (a + b);
      out[i] += (ua + slope * (mid - xa)) * (b - a) / dx;
    }
  }
  return out;
}

GridSolution weno_run(const Flux& f, const WenoInit& init, const WenoOptions& opt) {
  if (opt.cells < 64) throw DomainError("weno: at least 64 cells required");
  if (!(opt.cfl > 0 && opt.cfl <= 0.6)) throw DomainError("weno: cfl must lie in (0, 0.6]");
  if (!(opt.x_hi > opt.x_lo)) throw DomainError("weno: empty spatial domain");

  GridSolution g;
  const int n = opt.cells;
  g.dx = (opt.x_hi - opt.x_lo) / n;
  g.x_lo = opt.align_origin ? std::floor(opt.x_lo / g.dx) * g.dx : opt.x_lo;
  g.x_hi = g.x_lo + n * g.dx;
  g.cfl = opt.cfl;
  g.normalization = normalize(f).second;
  g.x.resize(n);
  for (int i = 0; i < n; ++i) g.x[i] = g.x_lo + (i + 0.5) * g.dx;

  std::vector<double> u(n, 0.0);
  double t = 0;
  if (const auto* box = std::get_if<DeltaBox>(&init)) {
    if (!(box->mass > 0) || box->width_cells < 1) throw DomainError("weno: delta box needs positive mass and width");
    BoxAlign align = box->align;
    if (align == BoxAlign::automatic) {
      const double c = f.curvature(0.0);
      align = c > 0 ? BoxAlign::left_edge : (c < 0 ? BoxAlign::right_edge : BoxAlign::centered);
    }
    const double anchor = (box->center - g.x_lo) / g.dx;  // in cells
    const int first = static_cast<int>(std::lround(align == BoxAlign::left_edge    ? anchor
                                                   : align == BoxAlign::right_edge ? anchor - box->width_cells
                                                                                   : anchor - 0.5 * box->width_cells));
    if (first < 0 || first + box->width_cells > n) throw DomainError("weno: delta box outside the domain");
    for (int i = first; i < first + box->width_cells; ++i) u[i] = box->mass / (box->width_cells * g.dx);
  } else {
    const auto& p = std::get<ProfileInit>(init);
    if (p.profile.size() < 2) throw DomainError("weno: profile needs at least two points");
    u = cell_averages(p.profile, g.x_lo, g.dx, n);
    t = p.t;
  }
  if (!(opt.t_end > t)) throw DomainError("weno: t_end must exceed the start time");

  std::vector<double> stops;
  for (double s : opt.snapshot_times)
    if (s > t && s < opt.t_end) stops.push_back(s);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(opt.t_end);

  Scheme scheme(f, n, g.dx, opt.weno_eps);
  g.mass0 = stable_sum(u, 0, u.size()) * g.dx;
  std::tie(g.u_min, g.u_max) = scheme.range(u);
  std::vector<double> u1(n), u2(n), un(n), l(n);

  std::size_t next = 0;
  while (next < stops.size()) {
    if (g.steps + g.rejected_steps >= opt.max_steps) throw DomainError("weno: step limit reached");
    const double a = std::max(scheme.alpha(u), 1e-300);
    double dt = std::min(opt.cfl * g.dx / a, stops[next] - t);
    for (;;) {
      // Shu-Osher form; a stage whose wave speeds exceed the splitting
      // constant by more than 10% breaks the CFL bound and the step is redone.
      scheme.rhs(u, a, l);
      for (int i = 0; i < n; ++i) u1[i] = u[i] + dt * l[i];
      bool ok = scheme.alpha(u1) * dt / g.dx <= kStageCflSlack * opt.cfl;
      if (ok) {
        scheme.rhs(u1, a, l);
        for (int i = 0; i < n; ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * l[i]);
        ok = scheme.alpha(u2) * dt / g.dx <= kStageCflSlack * opt.cfl;
      }
      if (ok) {
        scheme.rhs(u2, a, l);
        for (int i = 0; i < n; ++i) un[i] = u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * l[i]);
        break;
      }
      ++g.rejected_steps;
      dt *= 0.5;
    }
    check_finite(un, t + dt);
    u.swap(un);
    const bool landed = dt == stops[next] - t;
    t = landed ? stops[next] : t + dt;
    ++g.steps;
    g.alpha_max = std::max(g.alpha_max, a);
    const auto [lo, hi] = scheme.range(u);
    g.u_min = std::min(g.u_min, lo);
    g.u_max = std::max(g.u_max, hi);
    const double mass = stable_sum(u, 0, u.size()) * g.dx;
    g.max_mass_drift = std::max(g.max_mass_drift, std::abs(mass - g.mass0) / g.mass0);
    if (landed) {
      g.snapshots.push_back({t, u});
      ++next;
    }
  }
  return g;
}

std::pair<double, double> support_bounds(const Timeline& tl, double t_end, double pad) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : tl.frames) {
    if (s.t > t_end * (1 + 1e-12) && &s != &tl.frames.front()) break;
    for (double t : {s.t, std::min(t_end, s.t * 1.05)}) {
      // Frames are at most 5% apart; the drift is linear in between.
      lo = std::min(lo, tl.normalization.to_original_x(s.h_bar.front() * t / s.t, t));
      hi = std::max(hi, tl.normalization.to_original_x(s.k_bar.front() * t / s.t, t));
    }
  }
  if (!(hi > lo)) throw DomainError("support_bounds: timeline has no frames");
  const double w = hi - lo;
  return {lo - pad * w, hi + pad * w};
}

GridSolution render_timeline(const Timeline& tl, const GridSolution& like, const std::vector<double>& times) {
  GridSolution g;
  g.x = like.x;
  g.dx = like.dx;
  g.x_lo = like.x_lo;
  g.x_hi = like.x_hi;
  g.order = 0;
  g.normalization = like.normalization;
  const int n = static_cast<int>(like.x.size());
  const SolutionField field(tl);
  for (double t : times) {
    if (t < field.t_min() * (1 - 1e-12) || t > field.t_max() * (1 + 1e-12))
      throw DomainError("render_timeline: time outside the timeline");
    // Grid coordinates are shifted from the timeline's by the drift difference.
    const double shift = like.normalization.drift * t;
    const Snapshot* snap = nullptr;
    for (const auto& s : tl.snapshots)
      if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, t)) snap = &s;
    std::vector<double> u;
    if (snap) {
      auto p = snap->profile;
      for (auto& pt : p) pt.first += shift;
      u = cell_averages(p, g.x_lo, g.dx, n);
    } else {
      static constexpr double kNode[] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                         0.8611363115940526};
      static constexpr double kWeight[] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                           0.3478548451374538};
      u.assign(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int q = 0; q < 4; ++q)
          u[i] += 0.5 * kWeight[q] * field.value(g.x[i] + 0.5 * g.dx * kNode[q] - shift, t).first;
    }
    g.snapshots.push_back({t, std::move(u)});
  }
  return g;
}

double locate_shock(const std::vector<double>& u, double x_lo, double dx, double guess, const CompareOptions& opt) {
  const int n = static_cast<int>(u.size());
  const int w = opt.smear_cells;
  const int centre = static_cast<int>(std::floor((guess - x_lo) / dx));
  const int from = std::max(w + 2, centre - opt.search_cells);
  const int to = std::min(n - w - 4, centre + opt.search_cells);
  if (from > to) throw DomainError("locate_shock: guess too close to the grid boundary");
  int best = from;
  for (int i = from; i <= to; ++i)
    if (std::abs(u[i + 1] - u[i]) > std::abs(u[best + 1] - u[best])) best = i;

  // Zone [a, b] of cells; states extrapolated linearly from two cells beyond.
  const int a = best - w, b = best + 1 + w;
  const double xa = x_lo + a * dx, xb = x_lo + (b + 1) * dx;
  auto centre_x = [&](int i) { return x_lo + (i + 0.5) * dx; };
  const double sl = (u[a - 1] - u[a - 2]) / dx, sr = (u[b + 2] - u[b + 1]) / dx;
  auto left = [&](double x) { return u[a - 1] + sl * (x - centre_x(a - 1)); };
  auto right = [&](double x) { return u[b + 1] + sr * (x - centre_x(b + 1)); };
  double zone = 0;
  for (int i = a; i <= b; ++i) zone += u[i] * dx;
  // Integral of the piecewise-linear two-state profile with the jump at s.
  auto mass = [&](double s) { return 0.5 * (left(xa) + left(s)) * (s - xa) + 0.5 * (right(s) + right(xb)) * (xb - s); };
  double lo = xa, hi = xb;
  const double m_lo = mass(lo) - zone, m_hi = mass(hi) - zone;
  if ((m_lo < 0) == (m_hi < 0)) return x_lo + (best + 1) * dx;  // no balanced position; interface of steepest jump
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    ((mass(mid) - zone < 0) == (m_lo < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<CompareEntry> compare_solutions(const Timeline& tl, const GridSolution& grid, const std::vector<double>& times,
                                            const CompareOptions& opt) {
  const SolutionField field(tl);
  const GridSolution exact = render_timeline(tl, grid, times);
  std::vector<CompareEntry> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const auto& ug = grid.snapshot_at(t, opt.time_tol).u;
    const auto& ue = exact.snapshots[k].u;
    CompareEntry e;
    e.t = t;
    std::vector<double> diff(ug.size());
    for (std::size_t i = 0; i < ug.size(); ++i) diff[i] = std::abs(ug[i] - ue[i]);
    e.l1 = stable_sum(diff, 0, diff.size()) * grid.dx;
    for (const auto& c : tl.shock_curves) {
      const auto xs = field.shock_x(c.id, t);
      if (!xs) continue;
      ShockOffset s;
      s.id = c.id;
      s.type = type_at(c, t);
      s.x_timeline = grid.normalization.to_original_x(*xs, t);
      s.x_grid = locate_shock(ug, grid.x_lo, grid.dx, s.x_timeline, opt);
      s.offset_cells = (s.x_grid - s.x_timeline) / grid.dx;
      e.shocks.push_back(s);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace fundsol

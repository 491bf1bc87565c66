#include "fundsol/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fundsol/errors.hpp"
#include "fundsol/roots.hpp"

namespace fundsol {

StateView::StateView(const SolverState& s)
    : state(s), h(*s.u_grid, s.h_bar), k(*s.u_grid, s.k_bar) {}

std::shared_ptr<const std::vector<double>> make_u_grid(double rho0, const GridOptions& opt,
                                                       const std::vector<double>& extra) {
  if (opt.nodes < 16) throw DomainError("u-grid: need at least 16 nodes");
  if (!(opt.min_ratio > 0 && opt.min_ratio < 1)) throw DomainError("u-grid: min_ratio must lie in (0,1)");
  const int n = opt.nodes - 1;
  const double ratio = std::pow(opt.min_ratio, 1.0 / (n - 1));
  std::vector<double> u{0.0};
  for (int i = n - 1; i >= 0; --i) u.push_back(rho0 * std::pow(ratio, i));
  u.back() = rho0;
  for (double e : extra)
    if (e > 0 && e < rho0) u.push_back(e);
  std::sort(u.begin(), u.end());
  std::vector<double> out;
  for (double x : u)
    if (out.empty() || x - out.back() > 1e-12 * std::max(x, 1e-300)) out.push_back(x);
  out.back() = rho0;
  return std::make_shared<const std::vector<double>>(std::move(out));
}

double similarity_mass_rate(const Flux& f, double rho) {
  const Envelope conv = convex_envelope(f, rho);
  return rho * conv.derivative(f, rho) - f(rho);
}

double initial_rho_bar(const Flux& f, double m, double t0) {
  if (!(m > 0)) throw DomainError("invalid mass: m must be positive");
  if (!(t0 > 0)) throw DomainError("invalid start time: t0 must be positive");
  const double target = m / t0;
  const double top = f.domain_max();
  const auto infl = f.inflections(top);
  double lo = infl.points.empty() ? 0.0 : infl.points.back();
  if (!infl.affine_bands.empty()) lo = std::max(lo, infl.affine_bands.back().second);
  auto excess = [&](double r) { return r > 0 ? similarity_mass_rate(f, r) - target : -target; };
  if (excess(top) < 0) {
    std::ostringstream os;
    os << "domain_max " << top << " too small: the similarity profile at t0=" << t0 << " cannot hold mass " << m;
    throw DomainError(os.str());
  }
  if (excess(lo) > 0)
    throw DomainError("t0 too large: the similarity maximum would fall below the convex tail of the flux");
  return bisect(excess, lo, top, 0.0);
}

double default_t0(const Flux& f, double m) {
  if (!(m > 0)) throw DomainError("invalid mass: m must be positive");
  const double rho = f.domain_max() * (1 - 1e-6);
  const double rate = similarity_mass_rate(f, rho);
  if (!(rate > 0)) throw DomainError("flux has no similarity start on its domain");
  return m / rate;
}

SolverState init_state(const Flux& f, double m, double t0, const GridOptions& opt,
                       const std::vector<double>& extra_nodes) {
  const double rho0 = initial_rho_bar(f, m, t0);
  const Envelope conv = convex_envelope(f, rho0);
  const Envelope conc = concave_envelope(f, rho0);
  if (conc.segments.size() != 1 || !conc.terminal_linear() || conv.terminal_linear())
    throw DomainError("t0 too large: the start is not in the similarity regime (an event precedes t0)");
  SolverState s;
  s.t = t0;
  s.rho_bar = rho0;
  s.u_grid = make_u_grid(rho0, opt, extra_nodes);
  s.zeta = t0 * conv.derivative(f, rho0);
  const auto& u = *s.u_grid;
  s.h_bar.resize(u.size());
  s.k_bar.assign(u.size(), s.zeta);
  for (std::size_t i = 0; i < u.size(); ++i) s.h_bar[i] = t0 * conv.derivative(f, u[i]);
  s.h_bar.back() = s.zeta;
  s.band_lo = 0.0;
  s.band_hi = rho0;
  return s;
}

double meeting_level(const StateView& v, double lo, double hi) {
  auto gap = [&](double u) { return v.k(u) - v.h(u); };
  lo = std::max(lo, v.h.lo());
  hi = std::min(hi, v.h.hi());
  if (gap(lo) <= 0) return lo * (1 - 1e-12);
  if (gap(hi) >= 0) return hi;
  return bisect(gap, lo, hi, 0.0);
}

double table_mass(const StateView& v, double rho) { return v.k.integral_to(rho) - v.h.integral_to(rho); }

double solve_rhobar(const SolverState& s, double m, double mass_tol) {
  const StateView v(s);
  const double rho = meeting_level(v, s.band_lo, s.band_hi);
  const double mass = table_mass(v, rho);
  if (mass < m * (1 - mass_tol)) {
    std::ostringstream os;
    os << "tables cannot accommodate mass " << m << " (found " << mass << " at rho_bar=" << rho << ")";
    throw ConsistencyError(os.str());
  }
  return rho;
}

namespace {

// Envelopes are evaluated this far inside the band so that the located
// critical levels (accurate to level_tol) never flip the signature.
constexpr double kBandMargin = 4e-9;

double clamp_to_band(double rho, const SolverState& s) {
  const double lo = s.band_lo > 0 ? s.band_lo + kBandMargin : 0.0;
  const double hi = s.band_hi - kBandMargin;
  if (hi <= lo) return 0.5 * (lo + hi);
  return std::clamp(rho, lo, hi);
}

std::pair<Envelope, Envelope> envelopes_at(const Flux& f, double rho, const EnvelopeOptions& eopt) {
  return {convex_envelope(f, rho, eopt), concave_envelope(f, rho, eopt)};
}

}  // namespace

std::vector<ShockPosition> shock_positions(const Flux& f, const SolverState& s, const ClassifyOptions& copt,
                                           const EnvelopeOptions& eopt) {
  const double rho = clamp_to_band(s.rho_bar, s);
  const auto [conv, conc] = envelopes_at(f, rho, eopt);
  const auto shocks = shocks_from_state(f, conv, conc, copt);
  const StateView v(s);
  const double width = s.k_bar.front() - s.h_bar.front();
  const double flat_tol = 1e-3 * std::abs(width) + 1e-12;
  std::vector<ShockPosition> out;
  for (const auto& sh : shocks) {
    const TableInterpolant& table = sh.orientation == Orientation::increasing ? v.h : v.k;
    double x;
    if (sh.anchor == Anchor::max) {
      x = s.zeta;
    } else {
      x = table(0.5 * (sh.u_lo() + sh.u_hi()));
      if (std::abs(table(sh.u_lo()) - table(sh.u_hi())) > flat_tol) {
        std::ostringstream os;
        os << "table plateau not flat on [" << sh.u_lo() << ", " << sh.u_hi() << "] at t=" << s.t;
        throw ConsistencyError(os.str());
      }
    }
    out.push_back({sh, x});
  }
  for (const auto& p : out) {
    const bool left = p.shock.orientation == Orientation::increasing;
    if ((left && p.x > s.zeta + flat_tol) || (!left && p.x < s.zeta - flat_tol))
      throw ConsistencyError("shock positions out of order at t=" + std::to_string(s.t));
  }
  return out;
}

namespace {

double largest_interior(const Envelope& a, const Envelope& b) {
  double best = 0.0;
  for (const Envelope* e : {&a, &b})
    for (std::size_t i = 1; i + 1 < e->partition.size(); ++i) best = std::max(best, e->partition[i]);
  return best;
}

// Follows removable jumps down from `rho` until the configuration below the
// landing point no longer has two terminal linear segments.
double jump_target(const Flux& f, double rho, const EnvelopeOptions& eopt) {
  double r = rho;
  for (int guard = 0; guard < 64; ++guard) {
    const auto [conv, conc] = envelopes_at(f, r, eopt);
    if (!(conv.terminal_linear() && conc.terminal_linear())) return r == rho ? 0.0 : r + 1e-8 * std::max(1.0, r);
    const double t = largest_interior(conv, conc);
    if (!(t > 0)) throw ConsistencyError("merging jump has no interior partition point to land on");
    r = t - 1e-8 * std::max(1.0, t);
  }
  throw ConsistencyError("merging jump cascade did not terminate");
}

}  // namespace

JumpResult apply_merging_jump(const Flux& f, const SolverState& s, const EnvelopeOptions& eopt) {
  JumpResult out{s, false, 0.0};
  double probe = s.band_lo > 0 ? std::min(s.rho_bar, s.band_lo) : s.rho_bar;
  probe -= 1e-8 * std::max(1.0, probe);
  const double target = jump_target(f, probe, eopt);
  if (!(target > 0)) return out;
  out.applied = true;
  out.target = target;
  out.state.band_hi = target;
  out.state.rho_bar = target;
  return out;
}

std::vector<PlannedEvent> plan_events(const Flux& f, const CriticalLevelCatalogue& cat, const ClassifyOptions& copt,
                                      const EnvelopeOptions& eopt) {
  std::vector<PlannedEvent> plan;
  const auto& lv = cat.levels;
  auto shocks_at = [&](double r) {
    const auto [conv, conc] = envelopes_at(f, r, eopt);
    return shocks_from_state(f, conv, conc, copt);
  };
  for (std::size_t i = 0; i < lv.size(); ++i) {
    PlannedEvent p;
    p.level = lv[i];
    const double L = lv[i].rho;
    const double up = i == 0 ? cat.rho_max : lv[i - 1].rho;
    const double down = i + 1 < lv.size() ? lv[i + 1].rho : 0.0;
    double eps = std::min({1e-4 * L, 0.25 * (up - L), 0.25 * (L - down)});
    p.above = shocks_at(L + eps);
    double below_at = L - eps;
    p.rho_after = L;
    if (lv[i].kind == LevelClass::merging_candidate) {
      const double target = jump_target(f, L - 1e-8 * std::max(1.0, L), eopt);
      if (!(target > 0)) throw ConsistencyError("merging-candidate level without a removable configuration");
      p.rho_after = target;
      below_at = target - std::min(1e-4 * target, 0.25 * (target - down));
    }
    p.below = shocks_at(below_at);
    p.below_at = below_at;

    const double tol_u = 50 * eps + 1e-9;
    // Across a downward jump the shock at the maximum always takes part.
    const bool jump = p.rho_after < L * (1 - 1e-9);
    std::vector<bool> used(p.below.size(), false);
    for (const auto& a : p.above) {
      int match = -1;
      double best = INFINITY;
      for (std::size_t j = 0; j < p.below.size(); ++j) {
        const auto& b = p.below[j];
        if (used[j] || a.orientation != b.orientation || a.type != b.type) continue;
        if (jump && (a.anchor == Anchor::max || b.anchor == Anchor::max)) continue;
        const double dlo = std::abs(a.u_lo() - b.u_lo());
        const bool both_max = a.anchor == Anchor::max && b.anchor == Anchor::max;
        const double dhi = both_max ? 0.0 : std::abs(a.u_hi() - b.u_hi());
        if (dlo <= tol_u && dhi <= tol_u && dlo + dhi < best) {
          best = dlo + dhi;
          match = static_cast<int>(j);
        }
      }
      if (match >= 0) used[match] = true;
      p.persists.push_back(match);
    }
    for (std::size_t k = 0; k < p.above.size(); ++k)
      if (p.persists[k] < 0) {
        p.incoming.push_back(p.above[k].type);
        p.incoming_index.push_back(static_cast<int>(k));
      }
    for (std::size_t j = 0; j < p.below.size(); ++j)
      if (!used[j]) {
        p.outgoing.push_back(p.below[j].type);
        p.outgoing_index.push_back(static_cast<int>(j));
      }
    p.is_event = !p.incoming.empty() || !p.outgoing.empty();
    p.eq20_holds = f.min_value(cat.rho_max) < 0.0;

    const std::string in = format_types(p.incoming);
    const std::string out = format_types(p.outgoing);
    switch (lv[i].kind) {
      case LevelClass::branching: p.kind = EventKind::branching; break;
      case LevelClass::transforming: p.kind = EventKind::transforming; break;
      case LevelClass::merging_candidate:
        if ((in == "R+R" && out == "L") || (in == "L+L" && out == "R"))
          p.kind = EventKind::transforming;
        else
          p.kind = p.outgoing.size() == 1 ? EventKind::merging : EventKind::merging_branching;
        break;
      case LevelClass::other:
        p.kind = p.outgoing.size() > p.incoming.size() ? EventKind::branching : EventKind::transforming;
        break;
    }
    plan.push_back(std::move(p));
  }
  return plan;
}

namespace {

double meeting_of(const std::vector<double>& u, const std::vector<double>& h, const std::vector<double>& k, double lo,
                  double hi, double* zeta) {
  const TableInterpolant hi_h(u, h);
  const TableInterpolant hi_k(u, k);
  auto gap = [&](double x) { return hi_k(x) - hi_h(x); };
  lo = std::max(lo, u.front());
  hi = std::min(hi, u.back());
  double rho;
  if (gap(lo) <= 0)
    rho = lo * (1 - 1e-12);
  else if (gap(hi) >= 0)
    rho = hi;
  else
    rho = bisect(gap, lo, hi, 0.0);
  if (zeta) *zeta = 0.5 * (hi_h(rho) + hi_k(rho));
  return rho;
}

}  // namespace

SolverState step_tables(const Flux& f, const SolverState& s, double dt, const EnvelopeOptions& eopt) {
  const auto& u = *s.u_grid;
  const std::size_t n = u.size();
  std::vector<double> dh(n), dk(n);
  auto rhs = [&](const std::vector<double>& h, const std::vector<double>& k) {
    const double rho = clamp_to_band(meeting_of(u, h, k, s.band_lo, s.band_hi, nullptr), s);
    const auto [conv, conc] = envelopes_at(f, rho, eopt);
    for (std::size_t i = 0; i < n; ++i) {
      dh[i] = conv.derivative(f, u[i]);
      dk[i] = conc.derivative(f, u[i]);
    }
  };
  // Shu-Osher form of the three-stage SSP Runge-Kutta scheme.
  rhs(s.h_bar, s.k_bar);
  std::vector<double> h1(n), k1(n);
  for (std::size_t i = 0; i < n; ++i) {
    h1[i] = s.h_bar[i] + dt * dh[i];
    k1[i] = s.k_bar[i] + dt * dk[i];
  }
  rhs(h1, k1);
  std::vector<double> h2(n), k2(n);
  for (std::size_t i = 0; i < n; ++i) {
    h2[i] = 0.75 * s.h_bar[i] + 0.25 * (h1[i] + dt * dh[i]);
    k2[i] = 0.75 * s.k_bar[i] + 0.25 * (k1[i] + dt * dk[i]);
  }
  rhs(h2, k2);
  SolverState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.h_bar[i] = (s.h_bar[i] + 2.0 * (h2[i] + dt * dh[i])) / 3.0;
    out.k_bar[i] = (s.k_bar[i] + 2.0 * (k2[i] + dt * dk[i])) / 3.0;
  }
  out.t = s.t + dt;
  out.rho_bar = meeting_of(u, out.h_bar, out.k_bar, s.band_lo, s.band_hi, &out.zeta);
  return out;
}

std::vector<std::pair<double, double>> sample_profile(const SolverState& s) {
  const auto& u = *s.u_grid;
  std::vector<std::pair<double, double>> out;
  std::size_t top = 0;
  while (top < u.size() && u[top] < s.rho_bar) ++top;
  for (std::size_t i = 0; i < top; ++i) out.emplace_back(s.h_bar[i], u[i]);
  out.emplace_back(s.zeta, s.rho_bar);
  for (std::size_t i = top; i-- > 0;) out.emplace_back(s.k_bar[i], u[i]);
  return out;
}

const SolverState& Timeline::frame_at(double t) const {
  if (frames.empty()) throw DomainError("timeline has no frames");
  auto it = std::upper_bound(frames.begin(), frames.end(), t, [](double x, const SolverState& s) { return x < s.t; });
  if (it == frames.begin()) return frames.front();
  return *(it - 1);
}

Evolver::Evolver(const Flux& f, double m, const EvolutionOptions& opt) : f_(f), m_(m), opt_(opt) {
  if (!(m > 0)) throw DomainError("invalid mass: m must be positive");
  if (std::abs(f(0.0)) > 0 || std::abs(f.slope(0.0)) > 1e-14)
    throw DomainError("flux must be normalized (f(0) = f'(0) = 0)");
  const double t0 = opt.t0 ? *opt.t0 : default_t0(f, m);
  const double rho0 = initial_rho_bar(f, m, t0);
  timeline_.flux = std::make_shared<const Flux>(f);
  timeline_.mass = m;
  timeline_.t0 = t0;
  timeline_.catalogue = critical_levels(f, rho0, opt.catalogue);
  plan_ = plan_events(f, timeline_.catalogue, opt.classify, opt.catalogue.envelope);
  std::vector<double> extra;
  for (const auto& p : plan_) {
    extra.push_back(p.level.rho);
    if (p.rho_after < p.level.rho) extra.push_back(p.rho_after);
    for (const auto* side : {&p.above, &p.below})
      for (const auto& sh : *side) extra.insert(extra.end(), {sh.u_lo(), sh.u_hi()});
  }
  {
    const auto [conv, conc] = envelopes_at(f, rho0, opt.catalogue.envelope);
    extra.insert(extra.end(), conv.partition.begin(), conv.partition.end());
    extra.insert(extra.end(), conc.partition.begin(), conc.partition.end());
  }
  state_ = init_state(f, m, t0, opt.grid, extra);
  state_.band_lo = plan_.empty() ? 0.0 : plan_.front().level.rho;
  for (std::size_t i = 1; i < plan_.size(); ++i)
    if (plan_[i - 1].level.rho - plan_[i].level.rho < 1e-7 * plan_[i].level.rho) timeline_.simultaneous_events = true;
  dt_ = 1e-3 * t0;
  last_frame_t_ = t0;
  record(false);
  take_frame(true);
}

void Evolver::take_frame(bool force) {
  if (!force && state_.t < last_frame_t_ * (1 + opt_.frame_spacing)) return;
  timeline_.frames.push_back(state_);
  last_frame_t_ = state_.t;
}

void Evolver::record(bool after_event) {
  const auto positions = shock_positions(f_, state_, opt_.classify, opt_.catalogue.envelope);
  if (ids_.empty() && timeline_.shock_curves.empty()) {
    for (std::size_t i = 0; i < positions.size(); ++i) ids_.push_back(next_id_++);
  }
  if (positions.size() != ids_.size()) {
    std::ostringstream os;
    os << "shock count changed without an event at t=" << state_.t << " (" << ids_.size() << " tracked, "
       << positions.size() << " found)";
    throw ConsistencyError(os.str());
  }
  std::vector<ShockDescriptor> shocks;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const int id = ids_[i];
    if (id >= static_cast<int>(timeline_.shock_curves.size())) timeline_.shock_curves.resize(id + 1);
    ShockCurve& c = timeline_.shock_curves[id];
    c.id = id;
    c.orientation = positions[i].shock.orientation;
    c.samples.push_back({state_.t, positions[i].x, positions[i].shock.type, positions[i].shock.speed});
    c.anchors.push_back(positions[i].shock.anchor);
    shocks.push_back(positions[i].shock);
  }
  const StateView v(state_);
  const double mass_err = std::abs(table_mass(v, state_.rho_bar) - m_) / m_;
  timeline_.max_mass_error = std::max(timeline_.max_mass_error, mass_err);
  const int genuine = static_cast<int>(
      std::count_if(shocks.begin(), shocks.end(), [](const auto& s) { return s.type == ShockType::G; }));
  if (!timeline_.steps.empty() && !after_event && state_.rho_bar >= timeline_.steps.back().rho_bar)
    ++timeline_.rho_increase_count;
  timeline_.steps.push_back({state_.t, state_.rho_bar, mass_err, genuine, single_sided_count(shocks)});
  if (!timeline_.tail_start && next_level_ >= plan_.size() && genuine == 1 && shocks.size() == 1)
    timeline_.tail_start = state_.t;
}

std::vector<Event> Evolver::process_level() {
  const PlannedEvent& p = plan_[next_level_];
  std::vector<Event> emitted;
  if (p.is_event) {
    Event ev;
    ev.kind = p.kind;
    ev.time = state_.t;
    ev.incoming = p.incoming;
    ev.outgoing = p.outgoing;
    ev.rho_before = p.level.rho;
    ev.rho_after = p.rho_after;
    const auto positions = shock_positions(f_, state_, opt_.classify, opt_.catalogue.envelope);
    ev.x = state_.zeta;
    if (!p.incoming_index.empty() && p.incoming_index.front() < static_cast<int>(positions.size()))
      ev.x = positions[p.incoming_index.front()].x;
    const TransitionCheck check = validate_transition(ev.incoming, ev.outgoing, ev.kind, p.eq20_holds);
    if (!check.ok) {
      std::ostringstream os;
      os.precision(12);
      os << "illegal event at t=" << ev.time << ", rho_bar=" << p.level.rho << ": " << check.message;
      throw GrammarViolation(os.str());
    }
    std::vector<int> ids(p.below.size(), -1);
    for (std::size_t k = 0; k < p.persists.size() && k < ids_.size(); ++k)
      if (p.persists[k] >= 0) ids[p.persists[k]] = ids_[k];
    for (int& id : ids)
      if (id < 0) id = next_id_++;
    ids_ = ids;
    timeline_.events.push_back(ev);
    emitted.push_back(ev);
  }
  if (p.level.kind == LevelClass::merging_candidate) {
    const JumpResult jr = apply_merging_jump(f_, state_, opt_.catalogue.envelope);
    if (jr.applied) {
      timeline_.fan_seeds.push_back({state_.t, state_.zeta, p.level.rho, jr.target});
      state_ = jr.state;
    }
    state_.band_hi = p.rho_after;
  } else {
    state_.band_hi = p.level.rho;
  }
  ++next_level_;
  while (next_level_ < plan_.size() && plan_[next_level_].level.rho >= state_.band_hi) ++next_level_;
  state_.band_lo = next_level_ < plan_.size() ? plan_[next_level_].level.rho : 0.0;
  const StateView v(state_);
  state_.rho_bar = meeting_level(v, state_.band_lo, state_.band_hi);
  state_.zeta = 0.5 * (v.h(state_.rho_bar) + v.k(state_.rho_bar));
  return emitted;
}

std::vector<Event> Evolver::advance(double dt_max) {
  if (!(dt_max > 0)) throw DomainError("advance: dt_max must be positive");
  double limit = dt_max;
  if (next_snapshot_ < opt_.snapshot_times.size()) {
    const double ts = opt_.snapshot_times[next_snapshot_];
    if (ts > state_.t) limit = std::min(limit, ts - state_.t);
  }
  double dt = std::min({dt_, limit, opt_.max_rel_time_step * state_.t});
  const double level_floor = state_.band_lo > 0 ? state_.band_lo + kBandMargin : -INFINITY;
  SolverState next;
  bool landing = false;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 200 || dt < 1e-14 * std::max(1.0, state_.t))
      throw ConsistencyError("step size underflow at t=" + std::to_string(state_.t));
    next = step_tables(f_, state_, dt, opt_.catalogue.envelope);
    const double rel = (state_.rho_bar - next.rho_bar) / state_.rho_bar;
    if (rel > opt_.max_rel_rho_change) {
      dt *= std::max(0.1, 0.8 * opt_.max_rel_rho_change / rel);
      continue;
    }
    landing = next.rho_bar <= level_floor;
    break;
  }
  if (landing) {
    // Largest step that keeps rho_bar above the level.
    double lo = 0.0, hi = dt;
    SolverState best = state_;
    const double tol = std::max(opt_.event_time_tol, 1e-15 * state_.t);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      SolverState trial = step_tables(f_, state_, mid, opt_.catalogue.envelope);
      if (trial.rho_bar > level_floor) {
        lo = mid;
        best = std::move(trial);
      } else {
        hi = mid;
      }
    }
    dt = lo;
    next = std::move(best);
  }
  const double rel = std::abs(state_.rho_bar - next.rho_bar) / state_.rho_bar;
  state_ = std::move(next);
  std::vector<Event> events;
  if (dt > 0) record(false);
  if (landing) {
    take_frame(true);
    events = process_level();
    record(true);
    take_frame(true);
  } else {
    take_frame(false);
  }
  if (next_snapshot_ < opt_.snapshot_times.size() &&
      state_.t >= opt_.snapshot_times[next_snapshot_] * (1 - 1e-12)) {
    timeline_.snapshots.push_back({state_.t, sample_profile(state_)});
    ++next_snapshot_;
    if (timeline_.frames.back().t != state_.t) take_frame(true);
  }
  if (!landing && dt > 0) dt_ = dt * std::min(2.0, 0.8 * opt_.max_rel_rho_change / std::max(rel, 1e-300));
  return events;
}

Timeline run(const Flux& f, double m, double t_end, const EvolutionOptions& opt) {
  EvolutionOptions o = opt;
  std::sort(o.snapshot_times.begin(), o.snapshot_times.end());
  Evolver ev(f, m, o);
  if (!(t_end > ev.state().t)) throw DomainError("t_end must exceed the start time t0");
  ev.timeline().t_end = t_end;
  std::size_t steps = 0;
  while (ev.state().t < t_end * (1 - 1e-14)) {
    if (++steps > o.max_steps) throw ConsistencyError("run exceeded the step budget");
    ev.advance(t_end - ev.state().t);
  }
  Timeline tl = std::move(ev.timeline());
  if (tl.frames.empty() || tl.frames.back().t < ev.state().t) tl.frames.push_back(ev.state());
  return tl;
}

}  // namespace fundsol

#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fundsol/classify.hpp"
#include "fundsol/envelope.hpp"
#include "fundsol/flux.hpp"
#include "fundsol/tables.hpp"

namespace fundsol {

/// Profile tables of the signed fundamental solution at one instant:
/// h_bar(u) is the left x-position of level u, k_bar(u) the right one.
/// Entries above rho_bar carry the natural extension of the terminal
/// envelope segments and are only used to locate rho_bar.
struct SolverState {
  double t = 0;
  double rho_bar = 0;
  double zeta = 0;
  std::shared_ptr<const std::vector<double>> u_grid;
  std::vector<double> h_bar;
  std::vector<double> k_bar;
  /// rho_bar is searched in [band_lo, band_hi]; band_lo is the next
  /// critical level below, band_hi the last level crossed (or jump target).
  double band_lo = 0;
  double band_hi = 0;

  std::pair<double, double> support() const { return {h_bar.front(), k_bar.front()}; }
  const std::vector<double>& grid() const { return *u_grid; }
};

/// PCHIP interpolants of both tables of a state.
struct StateView {
  explicit StateView(const SolverState& s);
  const SolverState& state;
  TableInterpolant h;
  TableInterpolant k;
};

struct GridOptions {
  int nodes = 4096;
  /// Smallest positive node as a fraction of the initial maximum.
  double min_ratio = 1e-5;
};

/// 0 followed by a geometric sequence ending at rho0, with `extra` points
/// inserted.
std::shared_ptr<const std::vector<double>> make_u_grid(double rho0, const GridOptions& opt,
                                                       const std::vector<double>& extra = {});

/// rho*h'(rho) - h(rho) for the convex envelope on [0, rho]; the mass of the
/// similarity profile at unit time.
double similarity_mass_rate(const Flux& f, double rho);

/// Maximum of the similarity profile with mass m at time t0.
double initial_rho_bar(const Flux& f, double m, double t0);

/// Start time whose similarity maximum sits at the top of the flux domain.
double default_t0(const Flux& f, double m);

/// Self-similar state at t0: h_bar = t0 h'(u; rho0), k_bar a single plateau
/// at the shock position t0 h'(rho0; rho0). Throws DomainError for m <= 0
/// or when the flux domain cannot hold the mass.
SolverState init_state(const Flux& f, double m, double t0, const GridOptions& opt = {},
                       const std::vector<double>& extra_nodes = {});

/// Level where the tables meet (h_bar = k_bar) inside [lo, hi]. Returns lo
/// scaled down by 1e-12 when the tables already crossed below lo, and hi
/// when they have not met by hi.
double meeting_level(const StateView& v, double lo, double hi);

/// Layer-cake mass of the tables up to rho: integral of k_bar - h_bar.
double table_mass(const StateView& v, double rho);

/// Closure for rho_bar from the tables, cross-checked with the mass
/// identity. Throws ConsistencyError when the mass at the meeting level
/// falls short of m beyond `mass_tol`.
double solve_rhobar(const SolverState& s, double m, double mass_tol = 1e-6);

struct ShockPosition {
  ShockDescriptor shock;
  double x = 0;
};

/// Positions read off the table plateaus. Throws ConsistencyError when a
/// plateau is not flat or positions are out of order.
std::vector<ShockPosition> shock_positions(const Flux& f, const SolverState& s, const ClassifyOptions& copt = {},
                                           const EnvelopeOptions& eopt = {});

/// Removable jump of rho_bar: both envelopes just below the current maximum
/// end in linear segments, so rho_bar drops to the largest interior
/// partition point (repeatedly, while the configuration persists).
struct JumpResult {
  SolverState state;
  bool applied = false;
  double target = 0;
};
JumpResult apply_merging_jump(const Flux& f, const SolverState& s, const EnvelopeOptions& eopt = {});

/// Event induced by one catalogue level, typed from the shocks just above
/// and just below it.
struct PlannedEvent {
  CriticalLevel level;
  bool is_event = false;  // shock types change across the level
  EventKind kind = EventKind::branching;
  double rho_after = 0;
  bool eq20_holds = false;
  std::vector<ShockDescriptor> above;
  std::vector<ShockDescriptor> below;
  /// For each shock above: index of the same shock below, or -1.
  std::vector<int> persists;
  std::vector<ShockType> incoming;
  std::vector<ShockType> outgoing;
  std::vector<int> incoming_index;  // into `above`
  std::vector<int> outgoing_index;  // into `below`
  /// Where `below` was sampled.
  double below_at = 0;
};

std::vector<PlannedEvent> plan_events(const Flux& f, const CriticalLevelCatalogue& cat,
                                      const ClassifyOptions& copt = {}, const EnvelopeOptions& eopt = {});

struct EvolutionOptions {
  GridOptions grid;
  std::optional<double> t0;
  double max_rel_rho_change = 0.005;
  /// Upper bound on dt / t.
  double max_rel_time_step = 0.02;
  double event_time_tol = 1e-9;
  double mass_tol = 1e-6;
  ClassifyOptions classify;
  CatalogueOptions catalogue;
  std::vector<double> snapshot_times;
  /// Frames for later evaluation are stored at least this far apart in
  /// relative time, plus around every event.
  double frame_spacing = 0.05;
  std::size_t max_steps = 2'000'000;
};

struct ShockSample {
  double t;
  double x;
  ShockType type;
  double speed;
};

struct ShockCurve {
  int id = 0;
  Orientation orientation = Orientation::increasing;
  std::vector<ShockSample> samples;
  std::vector<Anchor> anchors;  // per sample
};

struct Snapshot {
  double t = 0;
  /// (x, u) pairs along the profile, left branch then right branch.
  std::vector<std::pair<double, double>> profile;
};

struct StepRecord {
  double t;
  double rho_bar;
  double mass_error;  // relative
  int genuine;
  int single_sided;
};

struct FanSeed {
  double t;
  double x;
  double rho_before;
  double rho_after;
};

struct Timeline {
  std::shared_ptr<const Flux> flux;
  NormalizationRecord normalization;
  double mass = 0;
  double t0 = 0;
  double t_end = 0;
  CriticalLevelCatalogue catalogue;
  std::vector<Event> events;
  std::vector<ShockCurve> shock_curves;
  std::vector<Snapshot> snapshots;
  std::vector<SolverState> frames;
  std::vector<StepRecord> steps;
  std::vector<FanSeed> fan_seeds;
  double max_mass_error = 0;
  int rho_increase_count = 0;
  /// Set once rho_bar passes the last catalogue level with one genuine
  /// shock left; the signature is final from then on.
  std::optional<double> tail_start;
  bool simultaneous_events = false;

  /// Last frame at or before t (first frame if t precedes the run).
  const SolverState& frame_at(double t) const;
};

/// One accepted step: SSP-RK3 on the tables with rho_bar clamped inside the
/// state's band. Returns the new state; rho_bar may sit below band_lo, which
/// tells the caller that a level was crossed.
SolverState step_tables(const Flux& f, const SolverState& s, double dt, const EnvelopeOptions& eopt = {});

/// Drives the tables through time, landing on every critical level and
/// emitting the events the plan assigns to it.
class Evolver {
 public:
  /// `f` must be normalized and outlive the evolver.
  Evolver(const Flux& f, double m, const EvolutionOptions& opt = {});

  const SolverState& state() const { return state_; }
  const std::vector<PlannedEvent>& plan() const { return plan_; }
  Timeline& timeline() { return timeline_; }

  /// One accepted step of length at most dt_max. When a critical level is
  /// crossed the step is shortened to land on it and the level's event is
  /// validated and returned. Throws GrammarViolation on an illegal event.
  std::vector<Event> advance(double dt_max);

 private:
  void record(bool after_event);
  std::vector<Event> process_level();
  void take_frame(bool force);

  const Flux& f_;
  double m_;
  EvolutionOptions opt_;
  SolverState state_;
  std::vector<PlannedEvent> plan_;
  std::size_t next_level_ = 0;
  std::vector<int> ids_;
  int next_id_ = 0;
  double dt_ = 0;
  double last_frame_t_ = 0;
  std::size_t next_snapshot_ = 0;
  Timeline timeline_;
};

/// Full run from the similarity start to t_end. `f` must be normalized.
Timeline run(const Flux& f, double m, double t_end, const EvolutionOptions& opt = {});

/// Profile samples (x, u) of a state, left branch then right branch.
std::vector<std::pair<double, double>> sample_profile(const SolverState& s);

}  // namespace fundsol

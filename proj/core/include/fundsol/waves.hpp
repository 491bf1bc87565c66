#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fundsol/envelope.hpp"
#include "fundsol/errors.hpp"
#include "fundsol/evolution.hpp"

namespace fundsol {

/// One-sided limits (u(x-), u(x+)) of the profile of a single state. Both
/// entries coincide away from shocks; outside the support they are 0.
std::pair<double, double> eval_solution(const SolverState& s, double x);

/// Evaluates the solution anywhere in the time range of a timeline. Tables
/// are interpolated linearly in time between neighbouring frames, which is
/// exact in self-similar phases; frames around events keep jumps sharp.
class SolutionField {
 public:
  explicit SolutionField(const Timeline& tl);

  std::pair<double, double> value(double x, double t) const;
  /// f'(u) at (x, t); on a jump the left limit is used when `from_left`.
  double wave_speed(double x, double t, bool from_left = true) const;
  double t_min() const { return tl_.frames.front().t; }
  double t_max() const;
  const Timeline& timeline() const { return tl_; }

  /// Position of shock curve `id` at time t by linear interpolation of its
  /// samples; empty outside the curve's lifetime.
  std::optional<double> shock_x(int id, double t) const;
  /// Recorded speed of shock curve `id`, interpolated the same way.
  std::optional<double> shock_speed(int id, double t) const;

 private:
  const StateView& view(std::size_t i) const;

  const Timeline& tl_;
  mutable std::vector<std::unique_ptr<StateView>> views_;
};

class OutOfFan : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A u-interval of an envelope taken on [0, rho_bar], swept by a centered fan.
struct FanPiece {
  EnvelopeKind kind = EnvelopeKind::convex;
  double rho_bar = 0;
  double u_lo = 0;
  double u_hi = 0;
};

/// Value at (x, t) of the centered fan of `piece` issued from (x0, t0): the u
/// whose envelope slope equals (x - x0)/(t - t0). Linear pieces of the
/// envelope inside the interval show up as jumps. Throws OutOfFan when the
/// point lies outside the wedge.
double centered_fan(const Flux& f, const FanPiece& piece, double x0, double t0, double x, double t);

/// Slopes bounding the wedge of a fan piece, in increasing order.
std::pair<double, double> fan_edges(const Flux& f, const FanPiece& piece);

/// Pieces of the envelopes that a merging jump hands over to the flux: parts
/// of [0, rho_after] that follow f after the jump but were linear before.
std::vector<FanPiece> merge_fan_pieces(const Flux& f, const FanSeed& seed);

/// The fan issued from the origin at the start of a run.
FanPiece origin_fan(const Flux& f, double rho0);

/// One-sided limits of the shock speeds at a planned event: incoming shocks
/// as rho_bar decreases to the level, outgoing ones as it approaches the
/// level (or the jump target) from below. Speeds of shocks born at a double
/// tangency behave like c sqrt(distance), so the outgoing limits are
/// extrapolated from three samples with that model.
struct EventSlopes {
  std::vector<double> incoming;
  std::vector<double> outgoing;
};
EventSlopes event_slopes(const Flux& f, const PlannedEvent& p, const ClassifyOptions& copt = {});

enum class TraceDirection { forward, backward };

enum class TraceTerminal { reaches_t0, reaches_t_end, absorbed_by_shock, tangent_to_contact, truncated };

struct CharacteristicCurve {
  TraceDirection direction = TraceDirection::forward;
  std::vector<std::pair<double, double>> samples;  // (t, x)
  TraceTerminal terminal = TraceTerminal::reaches_t_end;
  int shock_id = -1;  // for absorbed / tangent terminals
  /// Wave speed and shock speed where the curve ended on a shock.
  double end_speed = 0;
  double shock_speed = 0;
  std::string diagnostic;
};

struct TraceOptions {
  /// Step as a fraction of the current time.
  double rel_step = 0.004;
  std::size_t max_steps = 200'000;
};

/// Integrates dx/dt = f'(u(x, t)) with Heun's method until the curve leaves
/// the time range or runs into a shock.
CharacteristicCurve trace_characteristic(const SolutionField& field, double x0, double t0, TraceDirection dir,
                                         const TraceOptions& opt = {});

struct CharSeed {
  double x = 0;
  double t = 0;
  TraceDirection direction = TraceDirection::forward;
};

struct CharMapSpec {
  std::vector<CharSeed> characteristics;
  /// Raster of f'(u) with this many cells per axis; 0 disables it.
  int raster_nx = 0;
  int raster_nt = 0;
  /// Draw time on a logarithmic axis.
  bool log_time = false;
  TraceOptions trace;
};

struct ShockPolyline {
  int id = 0;
  std::vector<ShockSample> samples;
};

struct EventMarker {
  double t = 0;
  double x = 0;
  EventKind kind = EventKind::branching;
  std::string label;  // e.g. "G -> L+R"
};

struct FanWedge {
  double x0 = 0;
  double t0 = 0;
  double slope_lo = 0;
  double slope_hi = 0;
  double t_until = 0;
};

struct CharMap {
  std::vector<ShockPolyline> shocks;
  std::vector<CharacteristicCurve> characteristics;
  std::vector<EventMarker> events;
  std::vector<FanWedge> fans;
  double x_min = 0, x_max = 0, t_min = 0, t_max = 0;
  bool log_time = false;
  /// raster[j][i]: f'(u) at cell (i, j), j counting up in time.
  std::vector<std::vector<double>> raster;
};

CharMap build_charmap(const Timeline& tl, const CharMapSpec& spec);

/// SVG page 800x600 with 60px margins; x maps linearly onto the width and
/// t (or log t) onto the height, increasing upwards.
void write_charmap_svg(const CharMap& map, std::ostream& os);
/// Rows `entity,id,t,x,label` for shocks, characteristics, events and fans.
void write_charmap_csv(const CharMap& map, std::ostream& os);

const char* to_string(TraceTerminal t);
const char* to_string(TraceDirection d);

}  // namespace fundsol

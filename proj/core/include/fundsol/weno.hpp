#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "fundsol/errors.hpp"
#include "fundsol/evolution.hpp"
#include "fundsol/flux.hpp"

namespace fundsol {

/// A grid update produced NaN or infinity.
class NonfiniteValue : public ConsistencyError {
 public:
  NonfiniteValue(std::size_t cell, double t);
  std::size_t cell() const { return cell_; }
  double time() const { return t_; }

 private:
  std::size_t cell_;
  double t_;
};

enum class BoxAlign { centered, left_edge, right_edge, automatic };

/// Box of the given mass spread evenly over `width_cells` cells at `center`,
/// started at t = 0. `automatic` puts the edge of the box that stays fixed
/// under the flow on `center`: the left edge when f''(0) > 0, the right edge
/// when f''(0) < 0. A point mass and a box aligned this way differ by an
/// O(width) transient only.
struct DeltaBox {
  double mass = 1.0;
  int width_cells = 4;
  double center = 0.0;
  BoxAlign align = BoxAlign::automatic;
};

/// Piecewise-linear profile (x, u) with non-decreasing x, started at `t`.
/// Repeated x values encode jumps.
struct ProfileInit {
  std::vector<std::pair<double, double>> profile;
  double t = 0.0;
};

using WenoInit = std::variant<DeltaBox, ProfileInit>;

/// A stage whose wave speeds exceed this multiple of the requested CFL number
/// makes the step restart with half the time step.
inline constexpr double kStageCflSlack = 1.1;

struct WenoOptions {
  int cells = 2048;
  double cfl = 0.5;
  double x_lo = -1.0;
  double x_hi = 1.0;
  double t_end = 1.0;
  /// The final time is always stored as well.
  std::vector<double> snapshot_times;
  double weno_eps = 1e-6;
  /// Shift the domain by less than a cell so that x = 0 is a cell face.
  bool align_origin = true;
  std::size_t max_steps = 10'000'000;
};

struct GridSnapshot {
  double t = 0;
  std::vector<double> u;  // cell averages
};

struct GridSolution {
  std::vector<double> x;  // cell centres
  double dx = 0;
  double x_lo = 0;
  double x_hi = 0;
  std::vector<GridSnapshot> snapshots;
  int order = 5;
  double cfl = 0;
  /// Largest Lax-Friedrichs splitting constant used.
  double alpha_max = 0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double mass0 = 0;
  /// Largest |mass - mass0| / mass0 over all steps.
  double max_mass_drift = 0;
  double u_min = 0;
  double u_max = 0;
  /// Frame of the x coordinates relative to the normalized flux.
  NormalizationRecord normalization;

  const GridSnapshot& snapshot_at(double t, double rel_tol = 1e-9) const;
};

/// Cell averages of a piecewise-linear profile, integrated exactly.
std::vector<double> cell_averages(const std::vector<std::pair<double, double>>& profile, double x_lo, double dx,
                                  int cells);

/// Fifth-order WENO (Jiang-Shu weights) with global Lax-Friedrichs flux
/// splitting, three-stage SSP Runge-Kutta and outflow boundaries.
GridSolution weno_run(const Flux& f, const WenoInit& init, const WenoOptions& opt);

/// Interval holding the support of the timeline up to t_end, widened on each
/// side by `pad` times its width.
std::pair<double, double> support_bounds(const Timeline& tl, double t_end, double pad = 0.1);

/// The semi-analytic solution as cell averages on the grid of `like`, one
/// snapshot per requested time. Exact where the timeline has a snapshot at
/// that time; otherwise evaluated by quadrature on interpolated frames.
GridSolution render_timeline(const Timeline& tl, const GridSolution& like, const std::vector<double>& times);

struct ShockOffset {
  int id = 0;
  ShockType type = ShockType::G;
  double x_timeline = 0;
  double x_grid = 0;
  double offset_cells = 0;
};

struct CompareEntry {
  double t = 0;
  double l1 = 0;
  std::vector<ShockOffset> shocks;
};

struct CompareOptions {
  /// Half-width of the search for the steepest jump around each shock.
  int search_cells = 12;
  /// Cells on each side of the steepest jump treated as the smeared zone.
  int smear_cells = 3;
  double time_tol = 1e-9;
};

/// Shock location on a grid: the steepest jump near `guess`, refined by
/// balancing the cell averages of the smeared zone against linear states
/// extrapolated from either side.
double locate_shock(const std::vector<double>& u, double x_lo, double dx, double guess, const CompareOptions& opt = {});

std::vector<CompareEntry> compare_solutions(const Timeline& tl, const GridSolution& grid, const std::vector<double>& times,
                                            const CompareOptions& opt = {});

}  // namespace fundsol

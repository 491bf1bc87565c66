#include <gtest/gtest.h>

#include <cmath>

#include "fundsol/weno.hpp"

using namespace fundsol;

namespace {
Flux burgers() { return Flux::polynomial({0, 0, 0.5}, 20.0); }

// Closed-form Burgers fundamental solution, m = 1.
std::vector<std::pair<double, double>> burgers_profile(double t) {
  const double s = std::sqrt(2 * t);
  return {{0, 0}, {s, s / t}, {s, 0}};
}

double l1_to_closed_form(const GridSolution& g, double t) {
  const auto exact = cell_averages(burgers_profile(t), g.x_lo, g.dx, static_cast<int>(g.x.size()));
  const auto& u = g.snapshot_at(t).u;
  double e = 0;
  for (std::size_t i = 0; i < u.size(); ++i) e += std::abs(u[i] - exact[i]) * g.dx;
  return e;
}

WenoOptions burgers_options(int cells, double t_end) {
  WenoOptions o;
  o.cells = cells;
  o.x_lo = -0.5;
  o.x_hi = 2.5;
  o.t_end = t_end;
  return o;
}
}  // namespace

TEST(CellAverages, ExactForLinearPieces) {
  const auto u = cell_averages({{0, 0}, {1, 1}, {1, 0}}, -1.0, 0.25, 8);
  EXPECT_DOUBLE_EQ(u[3], 0.0);
  EXPECT_DOUBLE_EQ(u[4], 0.125);
  EXPECT_DOUBLE_EQ(u[7], 0.875);
  EXPECT_THROW(cell_averages({{1, 0}, {0, 1}}, 0, 0.1, 10), DomainError);
}

TEST(Weno, ZeroFluxKeepsBumpInPlace) {
  const Flux zero = Flux::polynomial({0.0}, 1.0);
  std::vector<std::pair<double, double>> bump;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1 + i / 100.0;
    bump.emplace_back(x, std::exp(-10 * x * x));
  }
  WenoOptions o;
  o.cells = 128;
  o.x_lo = -1.5;
  o.x_hi = 1.5;
  o.t_end = 1.0;
  o.align_origin = false;
  const GridSolution g = weno_run(zero, ProfileInit{bump, 0.0}, o);
  const auto start = cell_averages(bump, o.x_lo, g.dx, o.cells);
  for (std::size_t i = 0; i < start.size(); ++i) EXPECT_NEAR(g.snapshots.back().u[i], start[i], 1e-14);
}

TEST(Weno, DeltaBoxConservesMass) {
  WenoOptions o = burgers_options(512, 1.0);
  const GridSolution g = weno_run(burgers(), DeltaBox{}, o);
  EXPECT_NEAR(g.mass0, 1.0, 1e-14);
  EXPECT_LE(g.max_mass_drift, 1e-12);
  EXPECT_EQ(g.snapshots.size(), 1u);
  EXPECT_DOUBLE_EQ(g.snapshots.back().t, 1.0);
  // The box sits on x = 0 with its left edge there, since f'' > 0.
  EXPECT_NEAR(std::remainder(g.x_lo / g.dx, 1.0), 0.0, 1e-9);
}

TEST(Weno, BurgersRefinement) {
  // The L1 error of a captured shock is C dx with C depending on where the
  // shock sits inside its cell (0.2 to 0.65 here), so single times scatter.
  // The mean over a window of times shows the first-order rate.
  double prev = 0;
  for (int cells : {256, 512, 1024}) {
    WenoOptions o = burgers_options(cells, 1.2);
    for (int k = 0; k <= 10; ++k) o.snapshot_times.push_back(1.0 + 0.02 * k);
    const GridSolution g = weno_run(burgers(), ProfileInit{burgers_profile(0.1), 0.1}, o);
    double e = 0;
    for (const auto& s : g.snapshots) e += l1_to_closed_form(g, s.t) / 11;
    if (prev > 0) EXPECT_GE(prev / e, 1.8) << "cells = " << cells;
    prev = e;
    EXPECT_GE(g.u_min, -1e-2 * std::sqrt(20.0));
  }
}

TEST(Weno, RejectsBadOptions) {
  WenoOptions o = burgers_options(32, 1.0);
  EXPECT_THROW(weno_run(burgers(), DeltaBox{}, o), DomainError);
  o.cells = 256;
  o.cfl = 0.9;
  EXPECT_THROW(weno_run(burgers(), DeltaBox{}, o), DomainError);
  o.cfl = 0.5;
  EXPECT_THROW(weno_run(burgers(), DeltaBox{0.0}, o), DomainError);
}

TEST(Weno, NonfiniteAborts) {
  WenoOptions o = burgers_options(128, 1.0);
  std::vector<std::pair<double, double>> p = {{0, 0}, {0.5, std::nan("")}, {1, 0}};
  EXPECT_THROW(weno_run(burgers(), ProfileInit{p, 0.0}, o), NonfiniteValue);
}

TEST(LocateShock, RecoversSubcellJump) {
  // Linear left state, jump at 0.4137 inside a cell.
  const double xs = 0.4137;
  const auto u = cell_averages({{0, 0}, {xs, 2 * xs}, {xs, 0.1}, {2, 0.1}}, -1, 0.01, 300);
  EXPECT_NEAR(locate_shock(u, -1, 0.01, 0.40), xs, 1e-9);
}

TEST(Compare, SelfComparisonIsZero) {
  EvolutionOptions eo;
  eo.snapshot_times = {0.5, 1.0};
  const Timeline tl = run(burgers(), 1.0, 1.0, eo);
  WenoOptions o = burgers_options(512, 1.0);
  const GridSolution like = weno_run(burgers(), DeltaBox{}, o);
  const GridSolution self = render_timeline(tl, like, {0.5, 1.0});
  const auto report = compare_solutions(tl, self, {0.5, 1.0});
  ASSERT_EQ(report.size(), 2u);
  for (const auto& e : report) {
    EXPECT_EQ(e.l1, 0.0);
    ASSERT_EQ(e.shocks.size(), 1u);
    EXPECT_NEAR(e.shocks[0].offset_cells, 0.0, 1e-6);
  }
  EXPECT_THROW(compare_solutions(tl, self, {0.7}), DomainError);
}

TEST(Compare, BurgersShockWithinThreeCells) {
  EvolutionOptions eo;
  eo.snapshot_times = {0.1, 1.0};
  const Timeline tl = run(burgers(), 1.0, 1.0, eo);
  WenoOptions o = burgers_options(1024, 1.0);
  const auto [lo, hi] = support_bounds(tl, 1.0);
  o.x_lo = lo;
  o.x_hi = hi;
  const GridSolution g = weno_run(burgers(), ProfileInit{tl.snapshots[0].profile, 0.1}, o);
  const auto report = compare_solutions(tl, g, {1.0});
  ASSERT_EQ(report[0].shocks.size(), 1u);
  EXPECT_LE(std::abs(report[0].shocks[0].offset_cells), 3.0);
  EXPECT_LE(report[0].l1, 1e-2);
}

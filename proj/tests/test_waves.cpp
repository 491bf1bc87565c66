#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fundsol/errors.hpp"
#include "fundsol/waves.hpp"

using namespace fundsol;

namespace {
Flux burgers() { return Flux::polynomial({0, 0, 0.5}, 20.0); }

// Second antiderivative of (u + 0.8)(u - 0.2)(u - 2.8)(u - 5.3)(u - 6.9).
Flux eight_stage() {
  return Flux::polynomial(
      Polynomial::from_roots(std::vector<double>{-0.8, 0.2, 2.8, 5.3, 6.9}).integral().integral().coeffs(), 13.0);
}

const Timeline& burgers_run() {
  static const Timeline tl = run(burgers(), 1.0, 10.0);
  return tl;
}

const Timeline& eight_stage_run() {
  static const Timeline tl = run(eight_stage(), 1.0, 20.0);
  return tl;
}
}  // namespace

TEST(EvalSolution, BurgersSimilarityProfile) {
  const SolverState s = init_state(burgers(), 1.0, 0.5);
  auto [l, r] = eval_solution(s, 0.5);
  EXPECT_NEAR(l, 1.0, 1e-7);
  EXPECT_NEAR(r, 1.0, 1e-7);
  std::tie(l, r) = eval_solution(s, 1.0);
  EXPECT_NEAR(l, 2.0, 1e-7);
  EXPECT_NEAR(r, 0.0, 1e-12);
  for (double x : {-0.1, 1.5}) {
    std::tie(l, r) = eval_solution(s, x);
    EXPECT_EQ(l, 0.0);
    EXPECT_EQ(r, 0.0);
  }
}

TEST(EvalSolution, ProfileIsUnimodal) {
  const Timeline& tl = eight_stage_run();
  const SolverState& s = tl.frame_at(3.0);
  const double lo = s.h_bar.front() - 0.1, hi = s.k_bar.front() + 0.1;
  std::vector<double> u;
  for (int i = 0; i <= 2000; ++i) u.push_back(eval_solution(s, lo + (hi - lo) * i / 2000.0).first);
  const auto top = std::max_element(u.begin(), u.end());
  EXPECT_TRUE(std::is_sorted(u.begin(), top));
  EXPECT_TRUE(std::is_sorted(top, u.end(), std::greater<>()));
  EXPECT_LE(*top, s.rho_bar * (1 + 1e-9));
}

TEST(SolutionField, BurgersBetweenFrames) {
  const SolutionField field(burgers_run());
  for (double t : {0.37, 1.9, 6.1}) {
    const double x = 0.3 * std::sqrt(2 * t);
    EXPECT_NEAR(field.value(x, t).first, x / t, 1e-6 * (1 + x / t));
    EXPECT_NEAR(field.wave_speed(x, t), x / t, 1e-6 * (1 + x / t));
    ASSERT_TRUE(field.shock_x(0, t).has_value());
    EXPECT_NEAR(*field.shock_x(0, t), std::sqrt(2 * t), 1e-5 * std::sqrt(2 * t));
  }
  EXPECT_FALSE(field.shock_x(7, 1.0).has_value());
}

TEST(CenteredFan, BurgersRarefaction) {
  const Flux f = burgers();
  const FanPiece piece = origin_fan(f, 2.0);
  EXPECT_NEAR(centered_fan(f, piece, 0, 0, 0.3, 1.0), 0.3, 1e-9);
  EXPECT_NEAR(centered_fan(f, piece, 1.0, 2.0, 1.5, 3.0), 0.5, 1e-9);
  const auto [lo, hi] = fan_edges(f, piece);
  EXPECT_NEAR(lo, 0.0, 1e-12);
  EXPECT_NEAR(hi, 2.0, 1e-9);
  EXPECT_NEAR(centered_fan(f, piece, 0, 0, 2.0, 1.0), 2.0, 1e-9);
  EXPECT_THROW(centered_fan(f, piece, 0, 0, 2.5, 1.0), OutOfFan);
  EXPECT_THROW(centered_fan(f, piece, 0, 0, -0.1, 1.0), OutOfFan);
}

TEST(CenteredFan, MatchesOriginProfile) {
  const Timeline& tl = eight_stage_run();
  const Flux& f = *tl.flux;
  const SolverState& s = tl.frames.front();
  const FanPiece piece = origin_fan(f, s.rho_bar);
  const auto [lo, hi] = fan_edges(f, piece);
  int checked = 0;
  for (int i = 1; i < 40; ++i) {
    const double x = s.t * (lo + (hi - lo) * i / 40.0);
    const auto [ul, ur] = eval_solution(s, x);
    if (std::abs(ul - ur) > 1e-6 * s.rho_bar) continue;  // a jump of the fan
    EXPECT_NEAR(ul, centered_fan(f, piece, 0, 0, x, s.t), 1e-5 * s.rho_bar) << "x = " << x;
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(CenteredFan, MergeFansMatchField) {
  const Timeline& tl = eight_stage_run();
  const Flux& f = *tl.flux;
  const SolutionField field(tl);
  int checked = 0;
  for (const FanSeed& seed : tl.fan_seeds) {
    for (const FanPiece& piece : merge_fan_pieces(f, seed)) {
      const auto [lo, hi] = fan_edges(f, piece);
      const double t = seed.t * 1.01;
      for (double w : {0.25, 0.5, 0.75}) {
        const double x = seed.x + (lo + (hi - lo) * w) * (t - seed.t);
        const double fan = centered_fan(f, piece, seed.x, seed.t, x, t);
        const auto [ul, ur] = field.value(x, t);
        EXPECT_NEAR(0.5 * (ul + ur), fan, 1e-3 * (1 + fan)) << "seed t = " << seed.t << ", w = " << w;
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 3);
}

TEST(Trace, BurgersBackwardReachesStart) {
  const Timeline& tl = burgers_run();
  const SolutionField field(tl);
  const auto c = trace_characteristic(field, 0.5, 1.0, TraceDirection::backward);
  EXPECT_EQ(c.terminal, TraceTerminal::reaches_t0);
  for (const auto& [t, x] : c.samples) EXPECT_NEAR(x, 0.5 * t, 1e-5);
  EXPECT_NEAR(c.samples.back().first, tl.t0, 1e-12);
}

TEST(Trace, BurgersForwardAbsorbed) {
  const SolutionField field(burgers_run());
  // u = 0.5 travels along x = t/2 and meets x = sqrt(2t) at t = 8.
  const auto c = trace_characteristic(field, 0.5, 1.0, TraceDirection::forward);
  EXPECT_EQ(c.terminal, TraceTerminal::absorbed_by_shock);
  EXPECT_EQ(c.shock_id, 0);
  EXPECT_NEAR(c.samples.back().first, 8.0, 1e-3 * 8.0);
  EXPECT_NEAR(c.samples.back().second, 4.0, 1e-3 * 4.0);
  EXPECT_NEAR(c.end_speed, 0.5, 1e-4);
  EXPECT_NEAR(c.shock_speed, 0.25, 1e-3);
}

TEST(Trace, ZeroRegionIsVertical) {
  const auto c = trace_characteristic(SolutionField(burgers_run()), -1.0, 1.0, TraceDirection::forward);
  EXPECT_EQ(c.terminal, TraceTerminal::reaches_t_end);
  for (const auto& [t, x] : c.samples) EXPECT_EQ(x, -1.0);
  EXPECT_NEAR(c.samples.back().first, 10.0, 1e-12);
}

TEST(Trace, RejectsStartOutsideTimeline) {
  const SolutionField field(burgers_run());
  EXPECT_THROW(trace_characteristic(field, 0.0, 50.0, TraceDirection::forward), DomainError);
}

TEST(Trace, ContactsAreMetTangentially) {
  const Timeline& tl = eight_stage_run();
  const SolutionField field(tl);
  int tangent = 0;
  for (double t : {0.05, 1.0, 5.0}) {
    const SolverState& s = tl.frame_at(t);
    for (int i = 0; i < 8; ++i) {
      const double x = s.h_bar.front() + (s.k_bar.front() - s.h_bar.front()) * (i + 0.5) / 8;
      const auto c = trace_characteristic(field, x, t, TraceDirection::backward);
      EXPECT_NE(c.terminal, TraceTerminal::truncated) << c.diagnostic;
      if (c.terminal != TraceTerminal::tangent_to_contact) continue;
      // Shock speeds are sampled once per step, which cannot follow the
      // sqrt-like start of a contact born at a branching.
      const double born = tl.shock_curves[c.shock_id].samples.front().t;
      if (c.samples.back().first < 1.2 * born) continue;
      ++tangent;
      EXPECT_LE(std::abs(c.end_speed - c.shock_speed), 0.05 * (1 + std::abs(c.shock_speed)));
    }
  }
  EXPECT_GE(tangent, 1);
}

TEST(EventSlopes, SmoothAtBranchingKinkedAtMerging) {
  const Timeline& tl = eight_stage_run();
  const Flux& f = *tl.flux;
  const auto plan = plan_events(f, tl.catalogue);
  int branchings = 0, mergings = 0;
  for (const auto& p : plan) {
    if (!p.is_event) continue;
    const EventSlopes sl = event_slopes(f, p);
    if (p.kind == EventKind::branching) {
      ASSERT_EQ(sl.incoming.size(), 1u);
      ASSERT_EQ(sl.outgoing.size(), 2u);
      for (double s : sl.outgoing) EXPECT_NEAR(s, sl.incoming[0], 1e-6 * (1 + std::abs(sl.incoming[0])));
      ++branchings;
    } else if (p.kind == EventKind::merging) {
      std::vector<double> all = sl.incoming;
      all.insert(all.end(), sl.outgoing.begin(), sl.outgoing.end());
      double spread = 0;
      for (double a : all)
        for (double b : all) spread = std::max(spread, std::abs(a - b) / (1 + std::abs(a)));
      EXPECT_GT(spread, 1e-5);
      ++mergings;
    }
  }
  EXPECT_EQ(branchings, 2);
  EXPECT_EQ(mergings, 4);
}

TEST(CharMap, WritesDeterministicOutputs) {
  CharMapSpec spec;
  spec.characteristics = {{0.5, 1.0, TraceDirection::forward}, {0.5, 1.0, TraceDirection::backward}};
  spec.raster_nx = 16;
  spec.raster_nt = 8;
  const CharMap map = build_charmap(burgers_run(), spec);
  EXPECT_EQ(map.shocks.size(), 1u);
  ASSERT_EQ(map.characteristics.size(), 2u);
  ASSERT_EQ(map.raster.size(), 8u);
  EXPECT_EQ(map.raster[0].size(), 16u);
  EXPECT_LT(map.x_min, 0.0);
  EXPECT_GT(map.x_max, std::sqrt(20.0));

  std::ostringstream svg1, svg2, csv;
  write_charmap_svg(map, svg1);
  write_charmap_svg(map, svg2);
  write_charmap_csv(map, csv);
  EXPECT_EQ(svg1.str(), svg2.str());
  EXPECT_EQ(svg1.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg1.str().find("</svg>"), std::string::npos);
  const std::string rows = csv.str();
  EXPECT_EQ(rows.rfind("entity,id,t,x,label\n", 0), 0u);
  EXPECT_NE(rows.find("\nshock,0,"), std::string::npos);
  EXPECT_NE(rows.find("\ncharacteristic_end,1,"), std::string::npos);
}

TEST(CharMap, EmptySpecStillDrawsShocksAndEvents) {
  const CharMap map = build_charmap(eight_stage_run(), {});
  EXPECT_TRUE(map.characteristics.empty());
  EXPECT_TRUE(map.raster.empty());
  EXPECT_EQ(map.events.size(), eight_stage_run().events.size());
  EXPECT_FALSE(map.shocks.empty());
  std::ostringstream svg;
  write_charmap_svg(map, svg);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

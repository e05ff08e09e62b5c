#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "genorb/continuation.hpp"
#include "genorb/errors.hpp"
#include "genorb/report.hpp"
#include "support.hpp"

namespace genorb {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

GeneratingArc arc_at(double deg, int I) { return generating_arc(deg * kDeg, I, Rotation::direct); }

void expect_certified(const ContinuedOrbit& orbit) {
  EXPECT_LE(orbit.energy_drift, 1e-9);
  EXPECT_LE(orbit.closure, 1e-8);
  EXPECT_EQ(beta0_integral(orbit), -1);
  EXPECT_LE(std::abs(orbit.residual), kResolvedResidual);
}

TEST(Generating, HalfOrbitEndsOnSecondPrimary) {
  for (int I : {1, 2, 5}) {
    const GeneratingArc arc = arc_at(40.0, I);
    const Trajectory half = generating_half_orbit(arc);
    const PhaseState end = half.back();
    EXPECT_NEAR(end.t, arc.tau / 2.0, 1e-12);
    EXPECT_NEAR(end.q1, 1.0, 1e-9) << I;
    EXPECT_NEAR(end.q2, 0.0, 1e-9) << I;
    const PhaseState start = generating_start(arc);
    EXPECT_NEAR(std::abs(start.q1), arc.q0(), 1e-14);
    EXPECT_EQ(start.q1 > 0.0, I % 2 == 0);
  }
}

TEST(Generating, IntegratedActionMatchesClosedForm) {
  for (double deg : {10.0, 60.0, 130.0}) {
    for (int I : {1, 3}) {
      const GeneratingArc arc = arc_at(deg, I);
      const Trajectory orbit = generating_orbit(arc);
      EXPECT_NEAR(orbit.t_end() - orbit.t_begin(), arc.tau, 1e-10);
      EXPECT_NEAR(orbit_action(orbit), arc.action, 1e-8) << deg << " " << I;
      EXPECT_NEAR(orbit.energy(), arc.H0, 1e-12);
      EXPECT_LE(orbit.energy_drift(), 1e-10);
    }
  }
}

TEST(Generating, CrossingIndexCountsInteriorCrossings) {
  const GeneratingArc arc = arc_at(10.0, 3);
  const Trajectory half = generating_half_orbit(arc);
  const auto xs = crossings(half);
  int interior = 0;
  for (const auto& x : xs) interior += x.state.t < half.t_end() - 1e-9;
  EXPECT_EQ(half_period_crossing_index(arc), interior + 1);
}

TEST(Winding, CircleTurnsOnceAboutEverythingWithZeroIndex) {
  const ModelParams params{0.0, Frame::barycentric};
  const double a = 4.0;
  const double period = 2.0 * std::numbers::pi / (1.0 - std::pow(a, -1.5));
  const Trajectory circle = integrate({a, 0.0, 0.0, 0.5, 0.0}, params, {period, 0});
  const WindingData w = winding_data(circle);
  EXPECT_EQ(w.rot, -1);
  EXPECT_EQ(w.w1, -1);
  EXPECT_EQ(w.w2, -1);
  EXPECT_EQ(beta0_from(w), 0);
}

TEST(Continuation, SunJupiterTenDegrees) {
  const auto cells = continue_arc(arc_at(10.0, 1), {kSunJupiter, kEarthMoon});
  ASSERT_TRUE(cells[0].orbit) << cells[0].failure;
  ASSERT_TRUE(cells[1].orbit) << cells[1].failure;
  EXPECT_NEAR(std::abs(cells[0].orbit->q0), 2.288901, 5e-6);
  EXPECT_NEAR(cells[0].orbit->action, 0.485253, 5e-5);
  EXPECT_NEAR(std::abs(cells[1].orbit->q0), 2.281639, 5e-6);
  EXPECT_NEAR(cells[1].orbit->action, 0.590492, 5e-5);
  expect_certified(*cells[0].orbit);
  expect_certified(*cells[1].orbit);
}

TEST(Continuation, ShootingResidualChangesSignAcrossTheOrbit) {
  const GeneratingArc arc = arc_at(10.0, 1);
  const auto cells = continue_arc(arc, {kSunJupiter});
  ASSERT_TRUE(cells[0].orbit);
  const ContinuedOrbit& o = *cells[0].orbit;
  const ModelParams params{kSunJupiter, Frame::barycentric};
  const int k = half_period_crossing_index(arc);
  const int branch = generating_branch(arc);
  const double lo = shoot(o.q0 - 1e-4, params, o.energy, k, branch);
  const double hi = shoot(o.q0 + 1e-4, params, o.energy, k, branch);
  EXPECT_LT(lo * hi, 0.0);

  ShootingProblem problem;
  problem.mu = kSunJupiter;
  problem.c = o.energy;
  problem.k = k;
  problem.branch = branch;
  problem.lo = o.q0 - 1e-4;
  problem.hi = o.q0 + 1e-4;
  const ContinuedOrbit again = find_orbit(problem);
  EXPECT_NEAR(again.q0, o.q0, 1e-10);
  expect_certified(again);
}

TEST(Continuation, BracketWithoutRootIsNotFound) {
  ShootingProblem problem;
  problem.mu = kSunJupiter;
  problem.c = -0.6;
  problem.k = 1;
  problem.branch = 1;
  problem.lo = -2.25;
  problem.hi = -2.2499;
  EXPECT_THROW(find_orbit(problem), std::runtime_error);
}

TEST(Continuation, LargeMassRatio) {
  const auto cells = continue_arc(arc_at(10.0, 2), {0.2, 0.5});
  ASSERT_TRUE(cells[0].orbit) << cells[0].failure;
  ASSERT_TRUE(cells[1].orbit) << cells[1].failure;
  EXPECT_NEAR(std::abs(cells[0].orbit->q0), 3.313535, 5e-6);
  EXPECT_NEAR(cells[0].orbit->action, 2.246562, 5e-5);
  EXPECT_NEAR(std::abs(cells[1].orbit->q0), 3.137846, 5e-6);
  EXPECT_NEAR(cells[1].orbit->action, 3.758241, 5e-5);
}

TEST(Continuation, FamilyThroughCollisionChangesCrossingIndex) {
  const auto cells = continue_arc(arc_at(100.0, 1), {kEarthMoon});
  ASSERT_TRUE(cells[0].orbit) << cells[0].failure;
  const ContinuedOrbit& o = *cells[0].orbit;
  EXPECT_NEAR(std::abs(o.q0), 2.280016, 5e-6);
  EXPECT_NEAR(o.action, -5.470452, 5e-5);
  EXPECT_EQ(o.winding.rot, -1);
  EXPECT_EQ(o.winding.w1, -1);
  EXPECT_EQ(o.winding.w2, 0);
  expect_certified(o);
}

TEST(Continuation, SmallMassRatioShadowsTheGeneratingOrbit) {
  const GeneratingArc arc = arc_at(30.0, 1);
  const auto cells = continue_arc(arc, {1e-5, 1e-4});
  ASSERT_TRUE(cells[0].orbit && cells[1].orbit);
  const double near = std::abs(cells[0].orbit->action - arc.action);
  const double far = std::abs(cells[1].orbit->action - arc.action);
  EXPECT_LT(near, far);
  EXPECT_LT(near, 1e-2);
  EXPECT_NEAR(std::abs(cells[0].orbit->q0), arc.q0(), 1e-3);
  EXPECT_NEAR(cells[0].orbit->energy, arc.H0, 1e-2);
}

TEST(Continuation, NegativeActionWithTrivialBetaZero) {
  const auto cells = continue_arc(arc_at(10.0, 10), {kEarthMoon});
  ASSERT_TRUE(cells[0].orbit) << cells[0].failure;
  const ContinuedOrbit& o = *cells[0].orbit;
  EXPECT_LT(o.action, 0.0);
  EXPECT_NEAR(o.action, -0.012570, 1e-4);
  EXPECT_GT(o.energy, -std::numbers::sqrt2);
  EXPECT_LT(o.energy, 0.0);
  expect_certified(o);
}

TEST(Continuation, MassRatioOutsideRangeIsACellFailure) {
  const auto cells = continue_arc(arc_at(10.0, 1), {1.5, kSunJupiter});
  EXPECT_FALSE(cells[0].orbit);
  EXPECT_FALSE(cells[0].failure.empty());
  EXPECT_TRUE(cells[1].orbit);
}

TEST(Continuation, SweepKeepsInputOrder) {
  const std::vector<GeneratingArc> arcs{arc_at(20.0, 1), arc_at(10.0, 1)};
  SweepOptions options;
  options.parallel = false;
  const auto grid = continuation_sweep(arcs, {kEarthMoon, kSunJupiter}, options);
  ASSERT_EQ(grid.size(), 2u);
  ASSERT_TRUE(grid[1][1].orbit);
  EXPECT_EQ(grid[1][1].mu, kSunJupiter);
  EXPECT_NEAR(std::abs(grid[1][1].orbit->q0), 2.288901, 5e-6);
  ASSERT_TRUE(grid[0][0].orbit);
  EXPECT_NEAR(grid[0][0].orbit->action, -0.355078, 5e-5);
}

TEST(Continuation, MFrameShiftsTheAbscissa) {
  SweepOptions options;
  options.frame = Frame::m1_centered;
  const auto m1 = continue_arc(arc_at(10.0, 1), {kSunJupiter}, options);
  const auto bary = continue_arc(arc_at(10.0, 1), {kSunJupiter});
  ASSERT_TRUE(m1[0].orbit && bary[0].orbit);
  EXPECT_NEAR(m1[0].orbit->q0, bary[0].orbit->q0 + kSunJupiter, 1e-9);
  EXPECT_NEAR(m1[0].orbit->action, bary[0].orbit->action, 1e-8);
}

}  // namespace
}  // namespace genorb

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <numbers>

#include "genorb/acceptance.hpp"
#include "genorb/arcs.hpp"
#include "genorb/errors.hpp"
#include "genorb/lambert.hpp"
#include "support.hpp"

namespace genorb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Action of the arc through the apocentre from vis-viva in eccentric anomaly:
// |P|^2 dt = sqrt(a)(1 + eps cos E) dE, plus L times the elapsed time.
double eccentric_anomaly_action(double a, double eps, double L, double tau) {
  const double cos_e = std::clamp((a - 1.0) / (a * eps), -1.0, 1.0);
  const double e_c = std::acos(cos_e);
  const double kinetic = std::sqrt(a) * (2.0 * kPi - 2.0 * e_c - 2.0 * eps * std::sin(e_c));
  return kinetic + L * tau;
}

TEST(ArcsProperty, TimingConditionHolds) {
  testing::Draw draw(301);
  for (int n = 0; n < 300; ++n) {
    const double theta = draw.uniform(0.0, kPi);
    const int I = draw.integer(1, 40);
    const double a = solve_timing(theta, I, Rotation::direct);
    EXPECT_GT(a, 1.0);
    EXPECT_NEAR(arc_elapsed_time(a, theta, 0, ArcDirection::outgoing), 2.0 * kPi * I + 2.0 * theta, 1e-10)
        << "theta=" << theta << " I=" << I;
  }
  EXPECT_DOUBLE_EQ(timing_target(0.5, 3, Rotation::direct), 6.0 * kPi + 1.0);
}

TEST(Arcs, GeneratingTableForIndexOne) {
  const Fixture fx = testing::fixture("generating_I1.csv");
  ASSERT_EQ(fx.rows.size(), 19u);
  for (const auto& row : fx.rows) {
    const GeneratingArc arc = generating_arc(*row[0] * kDeg, 1, Rotation::direct);
    EXPECT_NEAR(arc.ellipse.a, *row[1], 5e-6) << *row[0];
    EXPECT_NEAR(arc.q0(), *row[2], 5e-6) << *row[0];
    EXPECT_NEAR(arc.H0, *row[3], 5e-6) << *row[0];
    EXPECT_NEAR(arc.action, *row[4], 5e-6) << *row[0];
  }
}

TEST(Arcs, GeneratingTableForTenDegrees) {
  const Fixture fx = testing::fixture("generating_theta10.csv");
  ASSERT_EQ(fx.rows.size(), 20u);
  for (const auto& row : fx.rows) {
    const GeneratingArc arc = generating_arc(10.0 * kDeg, static_cast<int>(*row[0]), Rotation::direct);
    EXPECT_NEAR(arc.ellipse.a, *row[1], 5e-6) << *row[0];
    EXPECT_NEAR(arc.q0(), *row[2], 5e-6) << *row[0];
    EXPECT_NEAR(arc.H0, *row[3], 5e-6) << *row[0];
    EXPECT_NEAR(arc.action, *row[4], 5e-6) << *row[0];
  }
}

TEST(ArcsProperty, ActionIdentityAndIndependentForms) {
  testing::Draw draw(302);
  for (int n = 0; n < 300; ++n) {
    const double theta = draw.uniform(0.01, kPi - 0.01);
    const int I = draw.integer(1, 25);
    const GeneratingArc arc = generating_arc(theta, I, Rotation::direct);
    const double scale = std::max(1.0, std::abs(arc.action));
    // both terms of the identity grow with tau and cancel down to the action
    EXPECT_NEAR(arc.action, action_identity(arc), 1e-13 * std::max(scale, arc.tau));
    const double L = angular_momentum(arc.ellipse.a, arc.ellipse.eps, Rotation::direct);
    EXPECT_NEAR(arc.action, eccentric_anomaly_action(arc.ellipse.a, arc.ellipse.eps, L, arc.tau), 1e-10 * scale);
    double time = 0.0;
    EXPECT_NEAR(arc.action, regularized_action_quadrature(arc, &time), 1e-9 * scale);
    EXPECT_NEAR(time, arc.tau, 1e-9 * arc.tau);
  }
}

TEST(ArcsProperty, WindingsAddWholeEllipses) {
  testing::Draw draw(303);
  for (int n = 0; n < 100; ++n) {
    const double a = draw.uniform(1.05, 6.0);
    const double theta = draw.uniform(0.05, kPi - 0.05);
    const int J = draw.integer(1, 4);
    const GeneratingArc base = make_arc(a, theta, 1, Rotation::direct, 0);
    const GeneratingArc wound = make_arc(a, theta, 1, Rotation::direct, J);
    const double period = 2.0 * kPi * std::pow(a, 1.5);
    const double L = angular_momentum(a, base.ellipse.eps, Rotation::direct);
    // one full ellipse: |P|^2 averages to 1/a over a period
    EXPECT_NEAR(wound.action - base.action, J * period * (1.0 / a + L), 1e-9 * std::max(1.0, std::abs(wound.action)));
    EXPECT_NEAR(wound.tau - base.tau, J * period, 1e-9 * wound.tau);
    EXPECT_NEAR(wound.action, action_identity(wound), 1e-11 * std::max(1.0, std::abs(wound.action)));
  }
}

TEST(Arcs, CircularOrbits) {
  const double a = 4.0;
  const double rate = std::abs(std::pow(a, -1.5) - 1.0);
  EXPECT_NEAR(circular_period(a, Rotation::direct), 2.0 * kPi / rate, 1e-12);
  EXPECT_NEAR(circular_action(a, Rotation::direct), 2.0 * kPi / rate * (1.0 / a - 2.0), 1e-12);
  EXPECT_NEAR(circular_period(a, Rotation::retrograde), 2.0 * kPi / (std::pow(a, -1.5) + 1.0), 1e-12);
  EXPECT_THROW(circular_period(1.0, Rotation::direct), SingularError);
  EXPECT_THROW(circular_period(-1.0, Rotation::direct), DomainError);
}

TEST(Arcs, SecondKindActionDomain) {
  EXPECT_THROW(second_kind_action(2, 4, 0.1, Rotation::direct), DomainError);
  EXPECT_THROW(second_kind_action(0, 1, 0.1, Rotation::direct), DomainError);
  EXPECT_THROW(second_kind_action(1, 1, 1.0, Rotation::direct), DomainError);
  EXPECT_TRUE(std::isfinite(second_kind_action(3, 2, 0.3, Rotation::direct)));
}

TEST(ArcsProperty, SecondKindActionOverCommonPeriod) {
  testing::Draw draw(305);
  for (int n = 0; n < 100; ++n) {
    const int I = draw.integer(1, 12);
    const int J = draw.integer(1, 12);
    if (std::gcd(I, J) != 1) continue;
    const double eps = draw.uniform(0.0, 0.95);
    // J Kepler periods fill the 2 pi I it takes the second primary to return
    const double a = std::pow(static_cast<double>(I) / J, 2.0 / 3.0);
    const double L = -std::sqrt(a * (1.0 - eps * eps));
    EXPECT_NEAR(second_kind_action(I, J, eps, Rotation::direct), 2.0 * kPi * I * (1.0 / a + L), 1e-10 * I);
  }
}

TEST(Arcs, DegenerateArcs) {
  EXPECT_TRUE(exclude_degenerate(generating_arc(0.0, 1, Rotation::direct)));
  EXPECT_TRUE(exclude_degenerate(generating_arc(kPi / 2, 1, Rotation::direct)));
  EXPECT_TRUE(exclude_degenerate(generating_arc(kPi, 1, Rotation::direct)));
  EXPECT_FALSE(exclude_degenerate(generating_arc(0.3, 1, Rotation::direct)));
}

TEST(ArcsProperty, EnergyCurveIsArcEnergy) {
  testing::Draw draw(304);
  for (int n = 0; n < 100; ++n) {
    const double theta = draw.uniform(0.0, kPi);
    const int I = draw.integer(1, 30);
    EXPECT_DOUBLE_EQ(energy_curve(theta, I, Rotation::direct), generating_arc(theta, I, Rotation::direct).H0);
  }
}

TEST(Arcs, FixedBSequenceRisesTowardZero) {
  SequenceSpec spec;
  spec.mode = SequenceMode::fixed_b;
  spec.value = 1.0;
  spec.I_first = 1;
  spec.I_last = 40;
  const Sequence seq = build_sequence(spec);
  ASSERT_EQ(seq.arcs.size(), 40u);
  for (std::size_t i = 0; i < seq.arcs.size(); ++i) {
    const GeneratingArc& arc = seq.arcs[i];
    EXPECT_NEAR(arc.ellipse.a * std::sqrt(1.0 - arc.ellipse.eps * arc.ellipse.eps), 1.0, 1e-10);
    EXPECT_NEAR(arc.tau, timing_target(arc.ellipse.theta, arc.I, Rotation::direct), 1e-10);
    EXPECT_LT(arc.H0, 0.0);
    if (i > 0) EXPECT_GT(arc.H0, seq.arcs[i - 1].H0);
  }
  EXPECT_LT(seq.arcs.back().action, seq.arcs.front().action);
}

TEST(Arcs, FixedEnergySequencesHitTheirTarget) {
  for (double c0 : {-1.4, -1.0, -0.5}) {
    SequenceSpec spec;
    spec.mode = SequenceMode::fixed_energy;
    spec.value = c0;
    spec.I_first = 1;
    spec.I_last = 30;
    const Sequence seq = build_sequence(spec);
    ASSERT_FALSE(seq.arcs.empty()) << c0;
    EXPECT_EQ(seq.arcs.size() + seq.skipped.size(), 30u);
    for (std::size_t i = 0; i < seq.arcs.size(); ++i) {
      EXPECT_NEAR(seq.arcs[i].H0, c0, 1e-8);
      EXPECT_GE(seq.arcs[i].ellipse.theta, default_energy_window_start(c0) - 1e-12);
      if (i > 0) EXPECT_LT(seq.arcs[i].action, seq.arcs[i - 1].action);
    }
  }
}

TEST(Arcs, SequenceRejectsBadSpecs) {
  SequenceSpec spec;
  spec.mode = SequenceMode::fixed_energy;
  spec.value = -2.0;
  EXPECT_THROW(build_sequence(spec), ConfigError);
  spec.mode = SequenceMode::fixed_b;
  spec.value = -1.0;
  EXPECT_THROW(build_sequence(spec), ConfigError);
  spec.value = 1.0;
  spec.I_first = 3;
  spec.I_last = 2;
  EXPECT_THROW(build_sequence(spec), ConfigError);
}

}  // namespace
}  // namespace genorb

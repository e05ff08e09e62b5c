#pragma once

// Continuation of generating orbits to positive mass ratio by perpendicular
// shooting from the q1-axis, and the invariants certified along the result.

#include <optional>
#include <string>
#include <vector>

#include "genorb/arcs.hpp"
#include "genorb/dynamics.hpp"

namespace genorb {

struct ShootingProblem {
  double mu = 0.0;
  Frame frame = Frame::barycentric;
  double c = 0.0;          // energy held fixed along the continuation
  int k = 1;               // index of the q2 = 0 crossing at half period
  double lo = 0.0;         // bracket on the signed initial abscissa q1(0)
  double hi = 0.0;
  int branch = 1;          // sign of p2 - q1 at the start
  double max_time = 0.0;   // integration horizon for one shot; 0 picks a default
  IntegratorOptions integrator{};
};

struct ShotResult {
  double residual = 0.0;   // p1 at the k-th crossing
  Crossing crossing;
  Trajectory half;
};

/// Integrates from (q0, 0, 0, p2_from_energy(q0, c, branch)) to the k-th
/// crossing of q2 = 0.
ShotResult shoot_detailed(double q0, const ModelParams& params, double c, int k, int branch, double max_time = 0.0,
                          const IntegratorOptions& options = {});

double shoot(double q0, const ModelParams& params, double c, int k, int branch, double max_time = 0.0,
             const IntegratorOptions& options = {});

struct WindingData {
  int rot = 0;   // turns of the fibre direction (p1 + q2, p2 - q1), i.e. the rotating-frame velocity
  int w1 = 0;    // winding about M1
  int w2 = 0;    // winding about M2
  double rot_turns = 0.0;
  double w1_turns = 0.0;
  double w2_turns = 0.0;
};

struct ContinuedOrbit {
  double q0 = 0.0;          // signed initial abscissa
  double period = 0.0;
  Trajectory trajectory;    // one full period, reflection-assembled
  double action = 0.0;
  WindingData winding;
  int beta0 = 0;
  double energy = 0.0;
  double energy_drift = 0.0;
  double closure = 0.0;     // gap of the assembled orbit at the half period and period
  double residual = 0.0;
};

/// Largest |p1| accepted at the half-period crossing.
inline constexpr double kAcceptedResidual = 1e-10;
/// Accepted instead when the bracket has shrunk to a few ulps of q0 and both
/// ends stay this small, i.e. the residual is limited by the resolution of q0.
inline constexpr double kResolvedResidual = 1e-9;

ContinuedOrbit find_orbit(const ShootingProblem& problem);

/// Closed orbit from a half orbit starting and ending perpendicular to q2 = 0.
ContinuedOrbit certify(const Trajectory& half, double q0, double residual);

/// Integral of |p|^2 + L over a closed trajectory.
double orbit_action(const Trajectory& trajectory);

/// Turning numbers of the velocity, q - M1 and q - M2 over a closed trajectory.
WindingData winding_data(const Trajectory& trajectory);

constexpr int beta0_from(const WindingData& w) noexcept { return 2 * w.rot - w.w1 - w.w2; }
int beta0_integral(const ContinuedOrbit& orbit);

/// Start state of the generating orbit at its apocentre; the second primary
/// sits on the positive q1-axis.
PhaseState generating_start(const GeneratingArc& arc, Frame frame = Frame::barycentric);
int generating_branch(const GeneratingArc& arc);

/// The mu = 0 arc from its apocentre to the collision at half its duration.
Trajectory generating_half_orbit(const GeneratingArc& arc, Frame frame = Frame::barycentric);
/// The closed mu = 0 generating orbit (one arc, period tau).
Trajectory generating_orbit(const GeneratingArc& arc, Frame frame = Frame::barycentric);

/// Number of q2 = 0 crossings strictly inside the generating half arc, plus one.
int half_period_crossing_index(const GeneratingArc& arc);

struct SweepOptions {
  Frame frame = Frame::barycentric;
  IntegratorOptions integrator{};
  double min_mu_step = 1e-6;
  double first_mu_step = 1e-3;
  bool parallel = true;
};

struct SweepCell {
  double mu = 0.0;
  std::optional<ContinuedOrbit> orbit;
  std::string failure;
};

/// Continues every arc along an ascending mu chain through the requested mass
/// ratios. Result is indexed [arc][mu] in the input order.
std::vector<std::vector<SweepCell>> continuation_sweep(const std::vector<GeneratingArc>& arcs,
                                                       const std::vector<double>& mus,
                                                       const SweepOptions& options = {});

/// Single chain: continued orbits of one arc at the given mass ratios.
std::vector<SweepCell> continue_arc(const GeneratingArc& arc, const std::vector<double>& mus,
                                    const SweepOptions& options = {});

}  // namespace genorb

#pragma once

// Second-species generating arcs: timing condition, energy, action and the
// one-parameter sequences built from them.

#include <optional>
#include <string>
#include <vector>

#include "genorb/kepler.hpp"

namespace genorb {

struct GeneratingArc {
  EllipseParams ellipse;
  int I = 1;     // revolutions of the second primary
  int J = 0;     // extra revolutions of the massless body
  double tau = 0.0;
  double sigma = 0.0;
  double H0 = 0.0;
  double action = 0.0;

  double q0() const noexcept { return ellipse.apocenter(); }
};

/// Elapsed time the arc must take so that the massless body meets the second
/// primary again after I revolutions.
double timing_target(double theta, int I, Rotation rotation);

/// Semi-major axis a > 1 solving the timing condition on the fixed-theta family.
double solve_timing(double theta, int I, Rotation rotation);

/// Closed-form action of the fixed-theta arc (including the theta = 0 and
/// theta = pi special forms) plus J full revolutions of the ellipse.
double arc_action(double a, double theta, Rotation rotation, int J = 0);

/// tau (2 H_fix + L) + 8 sigma evaluated from the arc's stored quantities.
double action_identity(const GeneratingArc& arc);

/// Fully resolved arc on the fixed-theta ellipse with semi-major axis a.
GeneratingArc make_arc(double a, double theta, int I, Rotation rotation, int J = 0);

/// Arc solving the timing condition for (theta, I).
GeneratingArc generating_arc(double theta, int I, Rotation rotation);

double circular_period(double a, Rotation rotation);
double circular_action(double a, Rotation rotation);
double second_kind_action(int I, int J, double eps, Rotation rotation);

/// True for rectilinear (theta = 0), tangent (theta = pi) and perpendicular
/// collision (theta = pi/2) arcs.
bool exclude_degenerate(const GeneratingArc& arc);

/// Energy of the generating arc with index I at angle theta.
double energy_curve(double theta, int I, Rotation rotation);

enum class SequenceMode { fixed_theta, fixed_b, fixed_energy };

struct SequenceSpec {
  SequenceMode mode = SequenceMode::fixed_theta;
  double value = 0.0;  // theta [rad], b, or target energy depending on mode
  int I_first = 1;
  int I_last = 1;
  Rotation rotation = Rotation::direct;
  /// Lower end of the angle window searched in fixed-energy mode. Defaults to
  /// arccos(1 - c0^2) / 2 when unset.
  std::optional<double> energy_window_start;
};

struct SkippedArc {
  int I = 0;
  std::string reason;
};

struct Sequence {
  std::vector<GeneratingArc> arcs;
  std::vector<SkippedArc> skipped;
};

/// Fixed-b arc for index I: eccentricity from b, angle from the focal-distance
/// relation, a from the timing condition.
GeneratingArc fixed_b_arc(double b, int I, Rotation rotation);

/// Fixed-energy arc for index I: angle theta in [window_start, pi) with
/// energy_curve(theta, I) == c0.
GeneratingArc fixed_energy_arc(double c0, int I, Rotation rotation, double window_start);

double default_energy_window_start(double c0);

/// Arcs ordered by I; infeasible indices are reported in `skipped`.
Sequence build_sequence(const SequenceSpec& spec);

}  // namespace genorb

#pragma once

// Elapsed times of Kepler arcs between two points of the unit circle.

namespace genorb {

enum class OriginSide { indirect, direct };
enum class FocusSide { indirect, direct };

/// Whether the convex hull of the outgoing arc contains the origin (indirect)
/// and whether it contains the empty focus (indirect).
struct ArcClass {
  OriginSide about_origin = OriginSide::direct;
  FocusSide about_second_focus = FocusSide::direct;
};

enum class ArcDirection { outgoing, ingoing };

/// Comparisons on cos(theta) inside this band resolve to the tangent case.
inline constexpr double kLambertTieBand = 1e-12;

/// Rectilinear fall time from rest at height q0 down to height q1.
double free_fall_time(double q0, double q1);

ArcClass classify_arc(double a, double eps, double theta);

/// Time between the two unit-circle crossings at polar angles -theta and
/// theta (measured from apocentre) on the fixed-theta ellipse of axis a,
/// plus `windings` full revolutions. Outgoing arcs pass the apocentre.
double arc_elapsed_time(double a, double theta, int windings, ArcDirection direction);

/// Eccentric anomaly E solving E - eps sin E = mean_anomaly.
double solve_kepler(double mean_anomaly, double eps);

/// Windingless outgoing time between the unit-circle crossings computed from
/// Kepler's equation; independent of the free-fall formulation.
double kepler_time_oracle(double a, double eps, double theta);

}  // namespace genorb

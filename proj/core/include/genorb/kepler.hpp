#pragma once

// Closed-form two-body geometry in units where the primaries are one length
// unit apart, the total mass is one and the rotating frame turns once per 2*pi.
//
// Sign convention: the angular momentum L = p1*q2 - p2*q1, so that the rotating
// Kepler Hamiltonian reads H0 = H_fix + L and anticlockwise (direct) motion has
// L < 0.

#include <numbers>

namespace genorb {

/// Direction of motion on a Kepler ellipse.
enum class Rotation : int { retrograde = -1, direct = 1 };

constexpr double sign_of(Rotation r) noexcept { return static_cast<double>(static_cast<int>(r)); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Supporting Kepler ellipse of a collision arc.
///
/// `theta` is the polar angle of the unit-circle crossing measured from the
/// apocentre direction, so r(theta) = a(1 - eps^2) / (1 - eps cos theta).
/// eps == 1 is allowed only for the rectilinear arc at theta == 0.
struct EllipseParams {
  double a = 1.0;
  double eps = 0.0;
  Rotation rotation = Rotation::direct;
  double theta = 0.0;

  double apocenter() const noexcept { return a * (1.0 + eps); }
  double pericenter() const noexcept { return a * (1.0 - eps); }
};

/// Levi-Civita oscillator data: X1 = alpha cos(varpi s), X2 = beta sin(varpi s).
struct RegularizedData {
  double varpi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Boundary guard for arccos/sqrt arguments: values within this distance of
/// the admissible interval are clamped, larger excursions are domain errors.
inline constexpr double kClampTolerance = 1e-12;

/// Clamp `x` into [lo, hi] if it is within kClampTolerance of the interval,
/// otherwise throw DomainError naming `what`.
double clamp_checked(double x, double lo, double hi, const char* what);

double kepler_energy(double a);
double angular_momentum(double a, double eps, Rotation rotation);
double kepler_period(double a);

/// Eccentricity of the ellipse with semi-major axis a > 1 crossing the unit
/// circle at polar angle theta. Returns exactly 1 at theta == 0.
double eccentricity_from_theta(double a, double theta);
double eccentricity_from_b(double a, double b);

/// H0 = H_fix + L of the ellipse (a, eccentricity_from_theta(a, theta)).
double rotating_energy(double a, double theta, Rotation rotation);

/// Closed-form dH0/da along fixed theta; sign equals the rotation sign on
/// a > 1, theta in (0, pi).
double dH0_da(double a, double theta, Rotation rotation);

/// Regularized duration of the arc between the two unit-circle crossings that
/// passes through the apocentre (no winding about the origin).
double lc_sigma0(double a, double eps);

RegularizedData regularized_data(double a, double eps, Rotation rotation);

/// Point on the regularized ellipse at regularized time s (s = 0 at apocentre).
Vec2 lc_parametrize(double a, double eps, Rotation rotation, double s);

/// Levi-Civita map X -> X^2 in complex notation.
constexpr Vec2 complex_square(Vec2 z) noexcept { return {z.x * z.x - z.y * z.y, 2.0 * z.x * z.y}; }

/// Focal-distance relation r(phi) = a(1 - eps^2)/(1 - eps cos phi), phi from apocentre.
double focal_distance(double a, double eps, double phi);

}  // namespace genorb

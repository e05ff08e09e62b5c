#include "genorb/kepler.hpp"

#include <cmath>
#include <string>

#include "genorb/errors.hpp"

namespace genorb {

namespace {

void require_positive_axis(double a, const char* where) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(where) + ": semi-major axis must be positive, got " + std::to_string(a));
  }
}

// sqrt(cos^2 theta + 4a(a - 1)), the discriminant root shared by the fixed-theta formulas.
double theta_root(double a, double cos_theta) { return std::sqrt(cos_theta * cos_theta + 4.0 * a * (a - 1.0)); }

void require_theta(double theta, const char* where) {
  if (!(theta >= -kClampTolerance && theta <= std::numbers::pi + kClampTolerance)) {
    throw DomainError(std::string(where) + ": theta must lie in [0, pi], got " + std::to_string(theta));
  }
}

}  // namespace

double clamp_checked(double x, double lo, double hi, const char* what) {
  if (std::isnan(x)) throw DomainError(std::string(what) + ": argument is NaN");
  if (x < lo) {
    if (lo - x > kClampTolerance) throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " below range");
    return lo;
  }
  if (x > hi) {
    if (x - hi > kClampTolerance) throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " above range");
    return hi;
  }
  return x;
}

double kepler_energy(double a) {
  require_positive_axis(a, "kepler_energy");
  return -0.5 / a;
}

double angular_momentum(double a, double eps, Rotation rotation) {
  require_positive_axis(a, "angular_momentum");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("angular_momentum: eccentricity outside [0, 1]");
  return -sign_of(rotation) * std::sqrt(a * (1.0 - eps * eps));
}

double kepler_period(double a) {
  require_positive_axis(a, "kepler_period");
  return 2.0 * std::numbers::pi * a * std::sqrt(a);
}

double eccentricity_from_theta(double a, double theta) {
  if (!(a > 1.0)) throw DomainError("eccentricity_from_theta: requires a > 1, got " + std::to_string(a));
  require_theta(theta, "eccentricity_from_theta");
  const double c = std::cos(theta);
  return clamp_checked((c + theta_root(a, c)) / (2.0 * a), 0.0, 1.0, "eccentricity_from_theta");
}

double eccentricity_from_b(double a, double b) {
  require_positive_axis(a, "eccentricity_from_b");
  if (!(b > 0.0)) throw DomainError("eccentricity_from_b: semi-minor axis must be positive");
  if (b > a) throw DomainError("eccentricity_from_b: semi-minor axis exceeds semi-major axis");
  const double ratio = b / a;
  return std::sqrt(1.0 - ratio * ratio);
}

double rotating_energy(double a, double theta, Rotation rotation) {
  if (!(a > 1.0)) throw DomainError("rotating_energy: requires a > 1");
  require_theta(theta, "rotating_energy");
  const double c = std::cos(theta);
  // a(1 - eps^2) = 1 - eps cos(theta) on the unit circle.
  const double w = clamp_checked(1.0 - c * (c + theta_root(a, c)) / (2.0 * a), 0.0, 2.0, "rotating_energy");
  return -0.5 / a - sign_of(rotation) * std::sqrt(w);
}

double dH0_da(double a, double theta, Rotation rotation) {
  if (!(a > 1.0)) throw DomainError("dH0_da: requires a > 1");
  if (!(theta > 0.0 && theta < std::numbers::pi)) {
    throw DomainError("dH0_da: rectilinear and tangent arcs (theta in {0, pi}) are excluded");
  }
  const double c = std::cos(theta);
  const double root = theta_root(a, c);
  const double w = 1.0 - c * (c + root) / (2.0 * a);
  const double numerator = c * ((4.0 * a * a - 2.0 * a) / root - c - root) / (2.0 * a * a);
  return 0.5 / (a * a) + sign_of(rotation) * numerator / (2.0 * std::sqrt(w));
}

double lc_sigma0(double a, double eps) {
  require_positive_axis(a, "lc_sigma0");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("lc_sigma0: requires 0 < eps <= 1");
  const double peri = a * (1.0 - eps);
  const double apo = a * (1.0 + eps);
  if (peri > 1.0 + kClampTolerance || apo < 1.0 - kClampTolerance) {
    throw DomainError("lc_sigma0: ellipse does not cross the unit circle");
  }
  const double ratio = clamp_checked((1.0 - peri) / (2.0 * a * eps), 0.0, 1.0, "lc_sigma0");
  return std::sqrt(a) * std::acos(std::sqrt(ratio));
}

RegularizedData regularized_data(double a, double eps, Rotation rotation) {
  const double h = kepler_energy(a);
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("regularized_data: eccentricity outside [0, 1]");
  return {std::sqrt(-8.0 * h), std::sqrt(a * (1.0 + eps)), sign_of(rotation) * std::sqrt(a * (1.0 - eps))};
}

Vec2 lc_parametrize(double a, double eps, Rotation rotation, double s) {
  const RegularizedData d = regularized_data(a, eps, rotation);
  return {d.alpha * std::cos(d.varpi * s), d.beta * std::sin(d.varpi * s)};
}

double focal_distance(double a, double eps, double phi) {
  return a * (1.0 - eps * eps) / (1.0 - eps * std::cos(phi));
}

}  // namespace genorb

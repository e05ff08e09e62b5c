#include "genorb/lambert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "genorb/errors.hpp"
#include "genorb/kepler.hpp"

namespace genorb {

double free_fall_time(double q0, double q1) {
  if (!(q0 > 0.0)) throw DomainError("free_fall_time: apex height must be positive");
  if (q1 < 0.0 || q1 > q0 * (1.0 + kClampTolerance)) {
    throw DomainError("free_fall_time: target height outside [0, apex]");
  }
  const double x = std::min(q1 / q0, 1.0);
  return std::sqrt(q0 * q0 * q0 / 2.0) * (std::sqrt(x * (1.0 - x)) + std::acos(std::sqrt(x)));
}

ArcClass classify_arc(double a, double eps, double theta) {
  ArcClass c;
  c.about_origin = theta >= std::numbers::pi / 2 ? OriginSide::indirect : OriginSide::direct;
  c.about_second_focus = 2.0 * a * eps >= std::cos(theta) ? FocusSide::indirect : FocusSide::direct;
  return c;
}

double arc_elapsed_time(double a, double theta, int windings, ArcDirection direction) {
  if (windings < 0) throw DomainError("arc_elapsed_time: winding count must be nonnegative");
  const double eps = eccentricity_from_theta(a, theta);
  const double apex = 2.0 * a;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double upper = free_fall_time(apex, 1.0 + s);
  const double lower = free_fall_time(apex, std::max(0.0, 1.0 - s));

  double outgoing = 0.0;
  const bool tie = std::abs(c) <= kLambertTieBand || std::abs(c - 2.0 * a * eps) <= kLambertTieBand;
  if (tie || (c > 0.0 && c <= 2.0 * a * eps)) {
    outgoing = upper + lower;
  } else if (c < 0.0) {
    outgoing = upper + 2.0 * free_fall_time(apex, 0.0) - lower;
  } else {
    outgoing = upper - lower;
  }

  const double period = kepler_period(a);
  const double base = direction == ArcDirection::outgoing ? outgoing : period - outgoing;
  return windings * period + base;
}

double solve_kepler(double mean_anomaly, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("solve_kepler: eccentricity outside [0, 1]");
  const double m = mean_anomaly;
  double lo = m - eps;
  double hi = m + eps;
  if (hi - lo == 0.0) return m;
  double e = eps < 0.8 ? m : m + (std::sin(m) >= 0.0 ? eps : -eps) * 0.85;
  e = std::clamp(e, lo, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = e - eps * std::sin(e) - m;
    if (f > 0.0) hi = e; else lo = e;
    const double df = 1.0 - eps * std::cos(e);
    double next = df > 0.0 ? e - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - e) <= 1e-15 * std::max(1.0, std::abs(e)) || hi - lo <= 1e-15) return next;
    e = next;
  }
  return e;
}

double kepler_time_oracle(double a, double eps, double theta) {
  if (!(a > 0.0)) throw DomainError("kepler_time_oracle: semi-major axis must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("kepler_time_oracle: no isolated unit-circle crossing");
  if (a * (1.0 - eps) > 1.0 || a * (1.0 + eps) < 1.0) {
    throw DomainError("kepler_time_oracle: ellipse does not reach the unit circle");
  }
  const double cos_e = clamp_checked((a - 1.0) / (a * eps), -1.0, 1.0, "kepler_time_oracle");
  const double crossing = std::acos(cos_e);
  const double mean_rate = 1.0 / (a * std::sqrt(a));
  const double mean = crossing - eps * std::sin(crossing);
  if (std::abs(solve_kepler(mean, eps) - crossing) > 1e-10) {
    throw DomainError("kepler_time_oracle: Kepler equation inversion failed");
  }

  const double y = std::sqrt(1.0 - eps * eps) * std::sin(crossing);
  const double x = cos_e - eps;
  const double from_apocentre = std::numbers::pi - std::atan2(y, x);
  if (std::abs(from_apocentre - theta) > 1e-7) {
    throw DomainError("kepler_time_oracle: crossing angle does not match theta");
  }
  const double time_from_pericentre = mean / mean_rate;
  return kepler_period(a) - 2.0 * time_from_pericentre;
}

}  // namespace genorb

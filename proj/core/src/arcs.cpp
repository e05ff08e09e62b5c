#include "genorb/arcs.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <numbers>

#include "genorb/errors.hpp"
#include "genorb/lambert.hpp"

namespace genorb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleEdge = 1e-14;

// Root of a bracketed, sign-changing function to full double precision.
template <class F>
double bracketed_root(F f, double lo, double hi, double f_lo, double f_hi) {
  std::uintmax_t max_iter = 200;
  const auto tol = [](double x, double y) { return std::abs(x - y) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(x); };
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  const double g0 = f(x0);
  const double g1 = f(x1);
  return std::abs(g0) <= std::abs(g1) ? x0 : x1;
}

// Expand [lo, hi] upward until f(hi) > 0 and return the root in between.
template <class F>
double root_above(F f, double lo, double hi, const char* what) {
  const double f_lo = f(lo);
  if (f_lo > 0.0) throw InfeasibleError(std::string(what) + ": target below the elapsed time at the lower end");
  if (f_lo == 0.0) return lo;
  double f_hi = f(hi);
  while (f_hi <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw InfeasibleError(std::string(what) + ": no bracket for the timing condition");
    f_hi = f(hi);
  }
  return bracketed_root(f, lo, hi, f(lo), f_hi);
}

}  // namespace

double timing_target(double theta, int I, Rotation rotation) {
  if (I < 1) throw DomainError("timing_target: I must be at least 1");
  return rotation == Rotation::direct ? 2.0 * kPi * I + 2.0 * theta : 2.0 * kPi * (I + 1) - 2.0 * theta;
}

double solve_timing(double theta, int I, Rotation rotation) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("solve_timing: theta outside [0, pi]");
  const double target = timing_target(theta, I, rotation);
  auto f = [&](double a) { return arc_elapsed_time(a, theta, 0, ArcDirection::outgoing) - target; };
  return root_above(f, 1.0 + 1e-9, 2.0, "solve_timing");
}

double arc_action(double a, double theta, Rotation rotation, int J) {
  if (!(a > 1.0)) throw DomainError("arc_action: requires a > 1");
  if (J < 0) throw DomainError("arc_action: J must be nonnegative");
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("arc_action: theta outside [0, pi]");
  const double ra = std::sqrt(a);
  const double ep = sign_of(rotation);
  if (theta <= kAngleEdge) {
    return 4.0 * ra * std::acos(std::sqrt(0.5 / a)) - 2.0 * std::sqrt(2.0 - 1.0 / a) + 2.0 * kPi * J * ra;
  }
  if (theta >= kPi - kAngleEdge) {
    return (J + 1) * (2.0 * kPi * ra - 2.0 * kPi * ep * a * std::sqrt(2.0 * a - 1.0));
  }
  const double c = std::cos(theta);
  const double root = std::sqrt(c * c + 4.0 * a * (a - 1.0));
  const double w = clamp_checked(1.0 - c * (c + root) / (2.0 * a), 0.0, 2.0, "arc_action");
  const double inner = clamp_checked(0.5 - (a - 1.0) / (c + root), 0.0, 1.0, "arc_action");
  const double tau = arc_elapsed_time(a, theta, J, ArcDirection::outgoing);
  return tau * (-1.0 / a - ep * std::sqrt(w)) + 8.0 * ra * (kPi * J / 2.0 + std::acos(std::sqrt(inner)));
}

double action_identity(const GeneratingArc& arc) {
  const EllipseParams& e = arc.ellipse;
  return arc.tau * (2.0 * kepler_energy(e.a) + angular_momentum(e.a, e.eps, e.rotation)) + 8.0 * arc.sigma;
}

GeneratingArc make_arc(double a, double theta, int I, Rotation rotation, int J) {
  GeneratingArc arc;
  arc.ellipse = {a, eccentricity_from_theta(a, theta), rotation, theta};
  arc.I = I;
  arc.J = J;
  arc.tau = arc_elapsed_time(a, theta, J, ArcDirection::outgoing);
  arc.sigma = J * kPi * std::sqrt(a) / 2.0 + lc_sigma0(a, arc.ellipse.eps);
  arc.H0 = rotating_energy(a, theta, rotation);
  arc.action = arc_action(a, theta, rotation, J);
  return arc;
}

GeneratingArc generating_arc(double theta, int I, Rotation rotation) {
  return make_arc(solve_timing(theta, I, rotation), theta, I, rotation);
}

double circular_period(double a, Rotation rotation) {
  if (!(a > 0.0)) throw DomainError("circular_period: radius must be positive");
  const double rate = 1.0 / (a * std::sqrt(a)) - sign_of(rotation);
  if (std::abs(rate) < 1e-14) throw SingularError("circular_period: orbit is stationary in the rotating frame");
  return 2.0 * kPi / std::abs(rate);
}

double circular_action(double a, Rotation rotation) {
  return circular_period(a, rotation) * (1.0 / a - sign_of(rotation) * std::sqrt(a));
}

double second_kind_action(int I, int J, double eps, Rotation rotation) {
  if (I < 1 || J < 1) throw DomainError("second_kind_action: I and J must be positive");
  if (std::gcd(I, J) != 1) throw DomainError("second_kind_action: I and J must be coprime");
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("second_kind_action: eccentricity outside [0, 1)");
  const double i = I;
  const double j = J;
  return 2.0 * kPi * (std::cbrt(i * j * j) - sign_of(rotation) * std::cbrt(i * i * i * i / j) * std::sqrt(1.0 - eps * eps));
}

bool exclude_degenerate(const GeneratingArc& arc) {
  const double theta = arc.ellipse.theta;
  return theta <= kAngleEdge || theta >= kPi - kAngleEdge || std::abs(theta - kPi / 2.0) <= 1e-9;
}

double energy_curve(double theta, int I, Rotation rotation) {
  return rotating_energy(solve_timing(theta, I, rotation), theta, rotation);
}

GeneratingArc fixed_b_arc(double b, int I, Rotation rotation) {
  const auto angle = [b](double a) {
    const double eps = eccentricity_from_b(a, b);
    return std::acos(clamp_checked((1.0 - b * b / a) / eps, -1.0, 1.0, "fixed_b_arc"));
  };
  auto f = [&](double a) {
    const double theta = angle(a);
    return arc_elapsed_time(a, theta, 0, ArcDirection::outgoing) - timing_target(theta, I, rotation);
  };
  const double lo = std::max(b, 1.0) * (1.0 + 1e-9);
  double a = 0.0;
  try {
    a = root_above(f, lo, std::max(2.0, 2.0 * lo), "fixed_b_arc");
  } catch (const DomainError& e) {
    throw InfeasibleError(std::string("fixed_b_arc: ") + e.what());
  }
  return make_arc(a, angle(a), I, rotation);
}

double default_energy_window_start(double c0) { return std::acos(1.0 - c0 * c0) / 2.0; }

GeneratingArc fixed_energy_arc(double c0, int I, Rotation rotation, double window_start) {
  if (!(c0 >= -std::numbers::sqrt2 && c0 < 0.0)) throw DomainError("fixed_energy_arc: target energy outside [-sqrt 2, 0)");
  if (!(window_start >= 0.0 && window_start < kPi)) throw DomainError("fixed_energy_arc: window start outside [0, pi)");
  auto h = [&](double theta) { return energy_curve(theta, I, rotation) - c0; };
  constexpr int kScan = 256;
  const double hi_end = kPi - 1e-9;
  double prev_theta = window_start;
  double prev = h(prev_theta);
  for (int k = 1; k <= kScan; ++k) {
    const double theta = window_start + (hi_end - window_start) * k / kScan;
    const double cur = h(theta);
    if (prev == 0.0 || (prev > 0.0) != (cur > 0.0)) {
      const double root = prev == 0.0 ? prev_theta : bracketed_root(h, prev_theta, theta, prev, cur);
      if (std::abs(root - kPi / 2.0) <= 1e-9) {
        throw InfeasibleError("fixed_energy_arc: crossing at the perpendicular collision angle is excluded");
      }
      return generating_arc(root, I, rotation);
    }
    prev_theta = theta;
    prev = cur;
  }
  throw InfeasibleError("fixed_energy_arc: energy curve does not reach the target in the angle window");
}

Sequence build_sequence(const SequenceSpec& spec) {
  if (spec.I_first < 1 || spec.I_last < spec.I_first) throw ConfigError("build_sequence: invalid index range");
  if (spec.mode == SequenceMode::fixed_energy && !(spec.value >= -std::numbers::sqrt2 && spec.value < 0.0)) {
    throw ConfigError("build_sequence: target energy outside [-sqrt 2, 0)");
  }
  if (spec.mode == SequenceMode::fixed_b && !(spec.value > 0.0)) throw ConfigError("build_sequence: b must be positive");
  std::vector<std::future<GeneratingArc>> jobs;
  for (int I = spec.I_first; I <= spec.I_last; ++I) {
    jobs.push_back(std::async(std::launch::async, [&spec, I] {
      switch (spec.mode) {
        case SequenceMode::fixed_theta:
          return generating_arc(spec.value, I, spec.rotation);
        case SequenceMode::fixed_b:
          return fixed_b_arc(spec.value, I, spec.rotation);
        case SequenceMode::fixed_energy:
          return fixed_energy_arc(spec.value, I, spec.rotation,
                                  spec.energy_window_start.value_or(default_energy_window_start(spec.value)));
      }
      throw ConfigError("build_sequence: unknown mode");
    }));
  }
  Sequence out;
  int I = spec.I_first;
  for (auto& job : jobs) {
    try {
      out.arcs.push_back(job.get());
    } catch (const InfeasibleError& e) {
      out.skipped.push_back({I, e.what()});
    } catch (const DomainError& e) {
      out.skipped.push_back({I, e.what()});
    }
    ++I;
  }
  return out;
}

}  // namespace genorb

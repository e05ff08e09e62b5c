#include "genorb/continuation.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "genorb/errors.hpp"

namespace genorb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap(double d) {
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

struct Angles {
  double p, m1, m2;
};

Angles angles_of(const StateVec& y, const ModelParams& params) {
  const Vec2 a = params.m1();
  const Vec2 b = params.m2();
  return {std::atan2(y[3] - y[0], y[2] + y[1]), std::atan2(y[1] - a.y, y[0] - a.x), std::atan2(y[1] - b.y, y[0] - b.x)};
}

void accumulate(const DenseStep& step, const ModelParams& params, double xa, double xb, const Angles& fa,
                const Angles& fb, int depth, Angles& total) {
  const double xm = 0.5 * (xa + xb);
  const Angles fm = angles_of(step.eval(xm), params);
  const double dp[2] = {wrap(fm.p - fa.p), wrap(fb.p - fm.p)};
  const double d1[2] = {wrap(fm.m1 - fa.m1), wrap(fb.m1 - fm.m1)};
  const double d2[2] = {wrap(fm.m2 - fa.m2), wrap(fb.m2 - fm.m2)};
  constexpr double limit = kPi / 4;
  const bool coarse = std::abs(dp[0]) > limit || std::abs(dp[1]) > limit || std::abs(d1[0]) > limit ||
                      std::abs(d1[1]) > limit || std::abs(d2[0]) > limit || std::abs(d2[1]) > limit;
  if (coarse) {
    if (depth >= 40) throw ResolutionError("winding_data: angle increments unresolved after 40 subdivisions");
    accumulate(step, params, xa, xm, fa, fm, depth + 1, total);
    accumulate(step, params, xm, xb, fm, fb, depth + 1, total);
    return;
  }
  total.p += dp[0] + dp[1];
  total.m1 += d1[0] + d1[1];
  total.m2 += d2[0] + d2[1];
}

int to_integer(double turns, const char* what) {
  const double r = std::round(turns);
  if (std::abs(turns - r) > 1e-6) {
    throw ResolutionError(std::string("winding_data: ") + what + " turning number " + std::to_string(turns) +
                          " is not an integer");
  }
  return static_cast<int>(r);
}

double state_gap(const PhaseState& a, const PhaseState& b) {
  return std::sqrt((a.q1 - b.q1) * (a.q1 - b.q1) + (a.q2 - b.q2) * (a.q2 - b.q2) + (a.p1 - b.p1) * (a.p1 - b.p1) +
                   (a.p2 - b.p2) * (a.p2 - b.p2));
}

struct Bracketed {
  double q = kNaN;
  double residual = kNaN;
  bool collapsed = false;  // bracket shrunk to a few ulps around q
  double end_residual = kNaN;  // larger |residual| at the final bracket ends
};

// Illinois regula falsi on a sign-changing bracket.
template <class F>
Bracketed illinois(F f, double a, double b, double fa, double fb) {
  int side = 0;
  double best = a;
  double f_best = fa;
  if (std::abs(fb) < std::abs(fa)) best = b, f_best = fb;
  double true_a = fa;
  double true_b = fb;
  bool collapsed = false;
  for (int iter = 0; iter < 200; ++iter) {
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    if (std::abs(b - a) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(c)) {
      collapsed = true;
      break;
    }
    const double fc = f(c);
    if (!std::isfinite(fc)) break;
    if (std::abs(fc) < std::abs(f_best)) best = c, f_best = fc;
    if (fc == 0.0) break;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = true_b = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = true_a = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return {best, f_best, collapsed, std::max(std::abs(true_a), std::abs(true_b))};
}

double default_horizon(double t_guess) { return 1.5 * t_guess + 4.0; }

}  // namespace

ShotResult shoot_detailed(double q0, const ModelParams& params, double c, int k, int branch, double max_time,
                          const IntegratorOptions& options) {
  if (k < 1) throw DomainError("shoot: crossing index must be positive");
  const double p2 = p2_from_energy(q0, c, params, branch);
  const double horizon = max_time > 0.0 ? max_time : 200.0;
  Trajectory half = integrate({q0, 0.0, 0.0, p2, 0.0}, params, {horizon, k}, options);
  const PhaseState end = half.back();
  if (half.t_end() >= horizon || std::abs(end.q2) > 1e-10) {
    throw NotFoundError("shoot: fewer than " + std::to_string(k) + " crossings before t=" + std::to_string(horizon));
  }
  return {end.p1, {end, k}, std::move(half)};
}

double shoot(double q0, const ModelParams& params, double c, int k, int branch, double max_time,
             const IntegratorOptions& options) {
  return shoot_detailed(q0, params, c, k, branch, max_time, options).residual;
}

double orbit_action(const Trajectory& trajectory) {
  if (state_gap(trajectory.front(), trajectory.back()) > 1e-6) {
    throw DomainError("orbit_action: trajectory is not closed");
  }
  double total = 0.0;
  for (const auto& step : trajectory.steps()) {
    auto integrand = [&step](double x) {
      const StateVec y = step.eval(x);
      return y[2] * y[2] + y[3] * y[3] + y[2] * y[1] - y[3] * y[0];
    };
    total += step.h * boost::math::quadrature::gauss<double, 7>::integrate(integrand, 0.0, 1.0);
  }
  return total;
}

WindingData winding_data(const Trajectory& trajectory) {
  const ModelParams& params = trajectory.params();
  Angles total{0.0, 0.0, 0.0};
  for (const auto& step : trajectory.steps()) {
    accumulate(step, params, 0.0, 1.0, angles_of(step.start(), params), angles_of(step.end(), params), 0, total);
  }
  WindingData w;
  w.rot_turns = total.p / (2.0 * kPi);
  w.w1_turns = total.m1 / (2.0 * kPi);
  w.w2_turns = total.m2 / (2.0 * kPi);
  w.rot = to_integer(w.rot_turns, "momentum");
  w.w1 = to_integer(w.w1_turns, "M1");
  w.w2 = to_integer(w.w2_turns, "M2");
  return w;
}

int beta0_integral(const ContinuedOrbit& orbit) { return beta0_from(orbit.winding); }

ContinuedOrbit certify(const Trajectory& half, double q0, double residual) {
  ContinuedOrbit orbit;
  orbit.q0 = q0;
  orbit.residual = residual;
  orbit.trajectory = assemble_symmetric(half);
  orbit.period = orbit.trajectory.t_end() - orbit.trajectory.t_begin();
  const PhaseState mid = half.back();
  orbit.closure = std::max(state_gap(mid, reflect(mid)),
                           state_gap(orbit.trajectory.front(), orbit.trajectory.back()));
  orbit.energy = half.energy();
  orbit.energy_drift = orbit.trajectory.energy_drift();
  orbit.action = orbit_action(orbit.trajectory);
  orbit.winding = winding_data(orbit.trajectory);
  orbit.beta0 = beta0_from(orbit.winding);
  return orbit;
}

ContinuedOrbit find_orbit(const ShootingProblem& problem) {
  const ModelParams params{problem.mu, problem.frame};
  validate(params);
  auto f = [&](double q) {
    try {
      return shoot(q, params, problem.c, problem.k, problem.branch, problem.max_time, problem.integrator);
    } catch (const std::runtime_error&) {
      return kNaN;
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  const double f_lo = f(problem.lo);
  const double f_hi = f(problem.hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) throw NotFoundError("find_orbit: shot failed at a bracket end");
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw NotFoundError("find_orbit: bracket without sign change");
  const Bracketed root = illinois(f, problem.lo, problem.hi, f_lo, f_hi);
  // a collapsed bracket on a steep residual leaves ends a few ulps of slope apart
  const double slope = std::abs(f_hi - f_lo) / std::abs(problem.hi - problem.lo);
  const double floor = std::max(kResolvedResidual, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(root.q) * slope);
  const bool resolved = root.collapsed && root.end_residual <= floor;
  if (!(std::abs(root.residual) <= kAcceptedResidual || resolved)) {
    std::ostringstream msg;
    msg << "find_orbit: residual " << std::scientific << std::setprecision(3) << root.residual
        << " at convergence; bracket straddles a discontinuity";
    throw NotFoundError(msg.str());
  }
  ShotResult shot = shoot_detailed(root.q, params, problem.c, problem.k, problem.branch, problem.max_time,
                                   problem.integrator);
  return certify(shot.half, root.q, shot.residual);
}

int generating_branch(const GeneratingArc& arc) {
  const int side = arc.I % 2 == 0 ? 1 : -1;
  return arc.ellipse.rotation == Rotation::direct ? -side : side;
}

PhaseState generating_start(const GeneratingArc& arc, Frame frame) {
  const ModelParams params{0.0, frame};
  const double side = arc.I % 2 == 0 ? 1.0 : -1.0;
  const double q1 = side * arc.q0();
  return {q1, 0.0, 0.0, p2_from_energy(q1, arc.H0, params, generating_branch(arc)), 0.0};
}

Trajectory generating_half_orbit(const GeneratingArc& arc, Frame frame) {
  return integrate(generating_start(arc, frame), {0.0, frame}, {arc.tau / 2.0, 0});
}

Trajectory generating_orbit(const GeneratingArc& arc, Frame frame) {
  return assemble_symmetric(generating_half_orbit(arc, frame));
}

int half_period_crossing_index(const GeneratingArc& arc) {
  const Trajectory half = integrate(generating_start(arc), {}, {arc.tau / 2.0 - 1e-7, 0});
  return static_cast<int>(crossings(half).size()) + 1;
}

namespace {

struct ChainPoint {
  double mu = 0.0;
  double q = 0.0;
  double half_time = 0.0;
  int k = 1;
  std::optional<WindingData> winding;  // unset for the collision orbit at mu = 0
};

bool same_type(const WindingData& a, const WindingData& b) { return a.rot == b.rot && a.w1 == b.w1 && a.w2 == b.w2; }

struct Attempt {
  std::optional<ContinuedOrbit> orbit;
  double half_time = 0.0;
  int k = 1;
  std::string failure;
};

// Shot residuals at crossings k - 1, k and k + 1 from one integration.
struct Sample {
  double q = kNaN;
  std::array<double, 3> r{kNaN, kNaN, kNaN};
  std::array<double, 3> t{kNaN, kNaN, kNaN};
  double gap_m2 = std::numeric_limits<double>::infinity();  // closest approach to M2
};

Attempt attempt(const GeneratingArc& arc, const ChainPoint& prev, double slope, double mu, int branch,
                const SweepOptions& options) {
  const ModelParams params{mu, options.frame};
  const double dmu = mu - prev.mu;
  const double predicted = prev.q + slope * dmu;
  const double width = 4.0 * dmu * (1.0 + std::abs(slope)) + 1e-9;
  const double horizon = default_horizon(prev.half_time);
  const auto plausible = [&](double t) { return std::abs(t - prev.half_time) <= 0.25 * prev.half_time; };

  // Passing through a collision with M2 adds or removes a crossing; such a
  // change of index is only accepted on the same de Rham class.
  const bool may_switch = prev.winding.has_value();
  const int k_first = may_switch ? std::max(1, prev.k - 1) : prev.k;
  const int k_last = may_switch ? prev.k + 1 : prev.k;

  const auto scan = [&](double lo, double hi, int n) {
    std::vector<Sample> samples(n + 1);
    for (int i = 0; i <= n; ++i) {
      Sample& s = samples[i];
      s.q = lo + (hi - lo) * i / n;
      try {
        const double p2 = p2_from_energy(s.q, arc.H0, params, branch);
        const Trajectory tr = integrate({s.q, 0.0, 0.0, p2, 0.0}, params, {horizon, k_last}, options.integrator);
        s.gap_m2 = tr.min_distance_m2();
        // The integration stops on crossing k_last; earlier ones are recovered
        // from the dense output.
        const PhaseState end = tr.back();
        if (tr.t_end() < horizon && std::abs(end.q2) <= 1e-10) {
          s.r[k_last - prev.k + 1] = end.p1;
          s.t[k_last - prev.k + 1] = end.t;
        }
        if (k_first < k_last) {
          const auto found = crossings(tr);
          for (int k = k_first; k < k_last && k <= static_cast<int>(found.size()); ++k) {
            s.r[k - prev.k + 1] = found[k - 1].state.p1;
            s.t[k - prev.k + 1] = found[k - 1].state.t;
          }
        }
      } catch (const CollisionError& e) {
        s.gap_m2 = e.closest_m2();
      } catch (const std::runtime_error&) {
      } catch (const DomainError&) {
      }
    }
    return samples;
  };

  Attempt out;
  out.failure = "no sign change of the shooting residual near the predicted abscissa";
  const auto solve = [&](const std::vector<Sample>& samples) {
    const int order[3] = {prev.k, prev.k - 1, prev.k + 1};
    for (int k : order) {
      if (k < k_first || k > k_last) continue;
      const int slot = k - prev.k + 1;
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double ra = samples[i].r[slot];
        const double rb = samples[i + 1].r[slot];
        if (!std::isfinite(ra) || !std::isfinite(rb) || (ra > 0.0) == (rb > 0.0)) continue;
        if (!plausible(samples[i].t[slot]) && !plausible(samples[i + 1].t[slot])) continue;
        candidates.push_back(i);
      }
      std::sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(0.5 * (samples[x].q + samples[x + 1].q) - predicted) <
               std::abs(0.5 * (samples[y].q + samples[y + 1].q) - predicted);
      });
      if (!candidates.empty()) out.failure = "all sign changes were discontinuities or implausible returns";

      for (std::size_t i : candidates) {
        ShootingProblem problem{mu, options.frame, arc.H0, k, samples[i].q, samples[i + 1].q, branch, horizon,
                                options.integrator};
        try {
          ContinuedOrbit orbit = find_orbit(problem);
          const double t_half = orbit.period / 2.0;
          if (!plausible(t_half)) continue;
          if (prev.winding) {
            const bool ok = k == prev.k ? same_type(*prev.winding, orbit.winding)
                                        : beta0_from(*prev.winding) == orbit.beta0;
            if (!ok) {
              out.failure = "root found on an orbit of different winding type";
              continue;
            }
          }
          out.orbit = std::move(orbit);
          out.half_time = t_half;
          out.k = k;
          return true;
        } catch (const std::runtime_error& e) {
          out.failure = e.what();
        } catch (const DomainError& e) {
          out.failure = e.what();
        }
      }
    }
    return false;
  };

  const auto search = [&](double half_width) {
    const int n = std::clamp(static_cast<int>(std::ceil(16.0 * half_width / mu)), 16, 200);
    std::vector<Sample> samples = scan(predicted - half_width, predicted + half_width, n);
    if (solve(samples)) return true;

    // The root can sit in a narrow window next to a near-collision with M2,
    // where the residual has a pole; zoom in on the closest approach.
    for (int level = 0; level < 5; ++level) {
      std::size_t j = 0;
      for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].gap_m2 < samples[j].gap_m2) j = i;
      }
      if (!std::isfinite(samples[j].gap_m2)) break;
      const double lo = samples[j == 0 ? 0 : j - 1].q;
      const double hi = samples[std::min(j + 1, samples.size() - 1)].q;
      samples = scan(lo, hi, 32);
      if (solve(samples)) return true;
    }
    return false;
  };

  if (search(width)) return out;
  // Off the collision orbit the abscissa need not move linearly in mu.
  const double reach = 0.5 * std::sqrt(mu);
  if (prev.mu == 0.0 && reach > width) search(reach);
  return out;
}

}  // namespace

std::vector<SweepCell> continue_arc(const GeneratingArc& arc, const std::vector<double>& mus,
                                    const SweepOptions& options) {
  std::vector<std::size_t> order(mus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mus[a] < mus[b]; });

  std::vector<SweepCell> cells(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) cells[i].mu = mus[i];

  const int branch = generating_branch(arc);
  const PhaseState start = generating_start(arc, options.frame);
  ChainPoint prev{0.0, start.q1, arc.tau / 2.0, half_period_crossing_index(arc), std::nullopt};
  double slope = 0.0;
  double step = options.first_mu_step;
  std::string chain_failure;
  std::optional<ContinuedOrbit> current;

  for (std::size_t idx : order) {
    const double target = mus[idx];
    if (!(target > 0.0 && target < 1.0)) {
      cells[idx].failure = "mass ratio outside (0, 1)";
      continue;
    }
    while (chain_failure.empty() && prev.mu < target) {
      const double mu = prev.mu + step >= target ? target : prev.mu + step;
      Attempt a = attempt(arc, prev, slope, mu, branch, options);
      if (a.orbit) {
        slope = (a.orbit->q0 - prev.q) / (mu - prev.mu);
        step = 2.0 * (mu - prev.mu);
        prev = {mu, a.orbit->q0, a.half_time, a.k, a.orbit->winding};
        current = std::move(a.orbit);
        continue;
      }
      step = 0.5 * (mu - prev.mu);
      if (step < options.min_mu_step) {
        chain_failure = "continuation stalled below mu=" + std::to_string(target) + ": " + a.failure;
      }
    }
    if (chain_failure.empty()) {
      cells[idx].orbit = current;
    } else {
      cells[idx].failure = chain_failure;
    }
  }
  return cells;
}

std::vector<std::vector<SweepCell>> continuation_sweep(const std::vector<GeneratingArc>& arcs,
                                                       const std::vector<double>& mus, const SweepOptions& options) {
  std::vector<std::vector<SweepCell>> out(arcs.size());
  if (!options.parallel) {
    for (std::size_t i = 0; i < arcs.size(); ++i) out[i] = continue_arc(arcs[i], mus, options);
    return out;
  }
  std::vector<std::future<std::vector<SweepCell>>> jobs;
  jobs.reserve(arcs.size());
  for (const auto& arc : arcs) {
    jobs.push_back(std::async(std::launch::async, [&arc, &mus, &options] { return continue_arc(arc, mus, options); }));
  }
  for (std::size_t i = 0; i < arcs.size(); ++i) out[i] = jobs[i].get();
  return out;
}

}  // namespace genorb

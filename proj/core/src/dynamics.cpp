#include "genorb/dynamics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>

#include "genorb/errors.hpp"

namespace genorb {

namespace {

struct Distances {
  double m1;
  double m2;
};

// Charts measure q1 from `shift`; with shift equal to the abscissa of M2 the
// distance to M2 keeps full relative precision during close approaches.
Distances distances(double q1, double q2, const ModelParams& params, double shift = 0.0) {
  const Vec2 a = params.m1();
  const Vec2 b = params.m2();
  return {std::hypot(q1 + (shift - a.x), q2 - a.y), std::hypot(q1 + (shift - b.x), q2 - b.y)};
}

constexpr double kChartRadius = 0.05;

StateVec field(const StateVec& y, const ModelParams& params, double shift) {
  const auto [r1, r2] = distances(y[0], y[1], params, shift);
  const double mu = params.mu;
  if (r1 == 0.0 || (mu > 0.0 && r2 == 0.0)) throw DomainError("vector_field: state at a primary");
  const double g1 = (1.0 - mu) / (r1 * r1 * r1);
  const double g2 = mu > 0.0 ? mu / (r2 * r2 * r2) : 0.0;
  const double q1 = y[0] + shift;
  return {
      y[2] + y[1],
      y[3] - q1,
      y[3] - params.barycenter_x() - g1 * (y[0] + (shift - params.m1().x)) - g2 * (y[0] + (shift - params.m2().x)),
      -y[2] - (g1 + g2) * y[1],
  };
}

double chart_energy(const StateVec& y, const ModelParams& params, double shift) {
  const auto [r1, r2] = distances(y[0], y[1], params, shift);
  const double mu = params.mu;
  if (r1 == 0.0 || (mu > 0.0 && r2 == 0.0)) throw DomainError("hamiltonian: state at a primary");
  const double u = (1.0 - mu) / r1 + (mu > 0.0 ? mu / r2 : 0.0);
  const double a = y[2] + y[1];
  const double b = y[3] - (y[0] + shift);
  const double dx = y[0] + (shift - params.barycenter_x());
  return 0.5 * (a * a + b * b) - 0.5 * (dx * dx + y[1] * y[1]) - u;
}

StateVec globalize(StateVec y, double shift) {
  y[0] += shift;
  return y;
}

StateVec axpy(const StateVec& y, double h, std::initializer_list<std::pair<double, const StateVec*>> terms) {
  StateVec out = y;
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct StepResult {
  StateVec y;
  StateVec k7;
  StateVec err;
  DenseStep dense;
};

StepResult dopri_step(const StateVec& y, const StateVec& k1, double t, double h, const ModelParams& params,
                      double shift, IntegratorStats& stats) {
  const StateVec k2 = field(axpy(y, h, {{a21, &k1}}), params, shift);
  const StateVec k3 = field(axpy(y, h, {{a31, &k1}, {a32, &k2}}), params, shift);
  const StateVec k4 = field(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), params, shift);
  const StateVec k5 = field(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), params, shift);
  const StateVec k6 = field(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), params, shift);
  const StateVec y_new = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  const StateVec k7 = field(y_new, params, shift);
  stats.evaluations += 6;

  StepResult r;
  r.y = y_new;
  r.k7 = k7;
  for (int i = 0; i < 4; ++i) {
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  r.dense.t0 = t;
  r.dense.h = h;
  r.dense.shift = shift;
  for (int i = 0; i < 4; ++i) {
    const double r1 = y[i];
    const double r2 = y_new[i] - y[i];
    const double r3 = h * k1[i] - r2;
    const double r4 = r2 - h * k7[i] - r3;
    const double r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    r.dense.coef[0][i] = r1;
    r.dense.coef[1][i] = r2 + r3;
    r.dense.coef[2][i] = -r3 + r4 + r5;
    r.dense.coef[3][i] = -r4 - 2.0 * r5;
    r.dense.coef[4][i] = r5;
  }
  return r;
}

double error_norm(const StateVec& err, const StateVec& y0, const StateVec& y1, const IntegratorOptions& o) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    sum += r * r;
  }
  const double n = std::sqrt(sum / 4.0);
  return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
}

double initial_step(const StateVec& y0, const StateVec& f0, const ModelParams& params, double shift,
                    const IntegratorOptions& o) {
  double d0 = 0.0, d1n = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1n += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / 4.0);
  d1n = std::sqrt(d1n / 4.0);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  StateVec y1 = y0;
  for (int i = 0; i < 4; ++i) y1[i] += h0 * f0[i];
  const StateVec f1 = field(y1, params, shift);
  double d2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / 4.0) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min(100.0 * h0, h1);
}

bool changes_sign(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || (b == 0.0 && a != 0.0); }

constexpr std::array<double, 5> kProbe = {0.0, 0.25, 0.5, 0.75, 1.0};

// First sub-interval [x_a, x_b] of the step in which q2 changes sign, if any.
std::optional<std::pair<double, double>> sign_change(const DenseStep& step) {
  double prev = step.eval(kProbe[0])[1];
  for (std::size_t i = 1; i < kProbe.size(); ++i) {
    const double cur = i + 1 == kProbe.size() ? step.end()[1] : step.eval(kProbe[i])[1];
    if (changes_sign(prev, cur)) return std::make_pair(kProbe[i - 1], kProbe[i]);
    prev = cur;
  }
  return std::nullopt;
}

// Re-step from the start of `step` to the q2 = 0 crossing inside [x_a, x_b],
// Newton-corrected on q2 using dq2/dt = p2 - q1.
StepResult refine_crossing(const DenseStep& step, double xa, double xb, const ModelParams& params,
                           IntegratorStats& stats) {
  double x = xb;
  const double qa = step.eval(xa)[1];
  const double qb = step.eval(xb)[1];
  if (qb != 0.0) {
    std::uintmax_t iters = 100;
    auto g = [&](double s) { return step.eval(s)[1]; };
    const auto tol = [](double u, double v) { return std::abs(u - v) <= 1e-15; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, xa, xb, qa, qb, tol, iters);
    x = 0.5 * (lo + hi);
  }
  const StateVec y0 = step.coef[0];
  const StateVec k1 = field(y0, params, step.shift);
  ++stats.evaluations;
  double h = x * step.h;
  StepResult r = dopri_step(y0, k1, step.t0, h, params, step.shift, stats);
  for (int it = 0; it < 8; ++it) {
    const double q2 = r.y[1];
    const double rate = r.y[3] - (r.y[0] + step.shift);
    if (std::abs(q2) <= 1e-15 || rate == 0.0) break;
    const double dt = -q2 / rate;
    if (std::abs(dt) > 0.5 * std::abs(step.h)) break;
    h += dt;
    r = dopri_step(y0, k1, step.t0, h, params, step.shift, stats);
    if (std::abs(dt) <= 1e-16 * std::max(1.0, std::abs(step.t0))) break;
  }
  return r;
}

std::string describe_collision(double t, double h, double m1, double m2) {
  std::ostringstream os;
  os << "integration stalled near a primary at t=" << t << " (h=" << h << "), closest approach to M1 " << m1
     << ", to M2 " << m2;
  return os.str();
}

}  // namespace

void validate(const ModelParams& params) {
  if (!(params.mu >= 0.0 && params.mu < 1.0)) throw DomainError("mass ratio must lie in [0, 1)");
}

double hamiltonian(const PhaseState& s, const ModelParams& params) { return chart_energy(to_vec(s), params, 0.0); }

StateVec vector_field(const StateVec& y, const ModelParams& params) { return field(y, params, 0.0); }

double p2_from_energy(double q1, double c, const ModelParams& params, int branch) {
  if (branch != 1 && branch != -1) throw DomainError("p2_from_energy: branch must be +1 or -1");
  const auto [r1, r2] = distances(q1, 0.0, params);
  const double mu = params.mu;
  if (r1 == 0.0 || (mu > 0.0 && r2 == 0.0)) throw DomainError("p2_from_energy: abscissa at a primary");
  const double dx = q1 - params.barycenter_x();
  const double u = (1.0 - mu) / r1 + (mu > 0.0 ? mu / r2 : 0.0);
  const double disc = 2.0 * (c + 0.5 * dx * dx + u);
  if (disc < 0.0) {
    throw HillRegionError("p2_from_energy: (" + std::to_string(q1) + ", 0) lies outside the Hill region of energy " +
                          std::to_string(c));
  }
  return q1 + branch * std::sqrt(disc);
}

PhaseState to_inertial(const PhaseState& s, const ModelParams& params) {
  const double bx = params.barycenter_x();
  const double x = s.q1 - bx;
  const double y = s.q2;
  const double px = s.p1;
  const double py = s.p2 - bx;
  const double c = std::cos(s.t);
  const double sn = std::sin(s.t);
  return {c * x - sn * y, sn * x + c * y, c * px - sn * py, sn * px + c * py, s.t};
}

StateVec DenseStep::local(double x) const noexcept {
  StateVec out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = (((coef[4][i] * x + coef[3][i]) * x + coef[2][i]) * x + coef[1][i]) * x + coef[0][i];
  }
  return out;
}

StateVec DenseStep::local_end() const noexcept {
  StateVec out{};
  for (int i = 0; i < 4; ++i) out[i] = coef[0][i] + coef[1][i] + coef[2][i] + coef[3][i] + coef[4][i];
  return out;
}

StateVec DenseStep::eval(double x) const noexcept { return globalize(local(x), shift); }
StateVec DenseStep::start() const noexcept { return globalize(coef[0], shift); }
StateVec DenseStep::end() const noexcept { return globalize(local_end(), shift); }

Trajectory::Trajectory(std::vector<DenseStep> steps, ModelParams params, IntegratorStats stats)
    : steps_(std::move(steps)), params_(params), stats_(stats) {
  if (steps_.empty()) throw DomainError("Trajectory: no steps");
  energy_ = chart_energy(steps_.front().coef[0], params_, steps_.front().shift);
  min_m1_ = min_m2_ = std::numeric_limits<double>::infinity();
  const auto visit = [&](const StateVec& y, double shift) {
    const auto [r1, r2] = distances(y[0], y[1], params_, shift);
    min_m1_ = std::min(min_m1_, r1);
    min_m2_ = std::min(min_m2_, r2);
    drift_ = std::max(drift_, std::abs(chart_energy(y, params_, shift) - energy_));
  };
  for (const auto& s : steps_) {
    visit(s.coef[0], s.shift);
    visit(s.local(0.5), s.shift);
  }
  visit(steps_.back().local_end(), steps_.back().shift);
}

double Trajectory::t_begin() const { return steps_.front().t0; }
double Trajectory::t_end() const { return steps_.back().t0 + steps_.back().h; }
PhaseState Trajectory::front() const { return from_vec(steps_.front().start(), t_begin()); }
PhaseState Trajectory::back() const { return from_vec(steps_.back().end(), t_end()); }

const DenseStep& Trajectory::step_at(double t) const {
  if (t < t_begin() || t > t_end()) throw DomainError("Trajectory: time outside the trajectory");
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t, [](double v, const DenseStep& s) { return v < s.t0; });
  return it == steps_.begin() ? *it : *std::prev(it);
}

PhaseState Trajectory::state_at(double t) const {
  const DenseStep& s = step_at(t);
  return from_vec(s.eval((t - s.t0) / s.h), t);
}

double Trajectory::energy_at(double t) const {
  const DenseStep& s = step_at(t);
  return chart_energy(s.local((t - s.t0) / s.h), params_, s.shift);
}

std::vector<PhaseState> Trajectory::samples() const {
  std::vector<PhaseState> out;
  out.reserve(steps_.size() + 1);
  for (const auto& s : steps_) out.push_back(from_vec(s.start(), s.t0));
  out.push_back(back());
  return out;
}

Trajectory integrate(const PhaseState& start, const ModelParams& params, StopCondition stop,
                     const IntegratorOptions& options) {
  validate(params);
  if (!(stop.t_end > start.t)) throw DomainError("integrate: end time must exceed the start time");
  IntegratorStats stats;
  StateVec y = to_vec(start);
  const bool charts = params.mu > 0.0;
  const double m2x = params.m2().x;
  double shift = 0.0;
  {
    const auto [r1, r2] = distances(y[0], y[1], params);
    if (r1 < options.collision_radius || (params.mu > 0.0 && r2 < options.collision_radius)) {
      throw CollisionError("integrate: initial state inside the collision guard", r1, r2);
    }
    if (charts && r2 < kChartRadius) {
      shift = m2x;
      y[0] -= shift;
    }
  }
  StateVec k1 = field(y, params, shift);
  ++stats.evaluations;
  double t = start.t;
  double h = initial_step(y, k1, params, shift, options);
  ++stats.evaluations;
  double err_old = 1e-4;
  constexpr double beta = 0.04;
  constexpr double expo = 0.2 - beta * 0.75;
  constexpr double safety = 0.9;

  std::vector<DenseStep> steps;
  int found = 0;
  double closest_m1 = std::numeric_limits<double>::infinity();
  double closest_m2 = closest_m1;

  while (t < stop.t_end) {
    if (steps.size() + stats.rejected >= options.max_steps) {
      throw CollisionError("integrate: step budget exhausted", closest_m1, closest_m2);
    }
    bool last = false;
    if (t + h >= stop.t_end) {
      h = stop.t_end - t;
      last = true;
    }
    if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      throw CollisionError(describe_collision(t, h, closest_m1, closest_m2), closest_m1, closest_m2);
    }
    StepResult r;
    double err = std::numeric_limits<double>::infinity();
    try {
      r = dopri_step(y, k1, t, h, params, shift, stats);
      err = error_norm(r.err, y, r.y, options);
    } catch (const DomainError&) {
      err = std::numeric_limits<double>::infinity();
    }
    const double fac11 = std::isfinite(err) ? std::pow(err, expo) : 10.0;
    if (err <= 1.0) {
      const auto [r1, r2] = distances(r.y[0], r.y[1], params, shift);
      closest_m1 = std::min(closest_m1, r1);
      closest_m2 = std::min(closest_m2, r2);
      if (r1 < options.collision_radius || (params.mu > 0.0 && r2 < options.collision_radius)) {
        throw CollisionError("integrate: entered the collision guard", closest_m1, closest_m2);
      }
      ++stats.accepted;
      if (stop.crossings > 0) {
        if (auto sc = sign_change(r.dense); sc && ++found == stop.crossings) {
          const StepResult refined = refine_crossing(r.dense, sc->first, sc->second, params, stats);
          steps.push_back(refined.dense);
          break;
        }
      }
      steps.push_back(r.dense);
      double fac = fac11 / std::pow(err_old, beta);
      fac = std::clamp(fac / safety, 0.1, 5.0);
      err_old = std::max(err, 1e-4);
      t = last ? stop.t_end : t + h;
      y = r.y;
      k1 = r.k7;
      h /= fac;
      if (charts) {
        const double wanted = r2 < kChartRadius ? m2x : 0.0;
        if (wanted != shift) {
          y[0] += shift - wanted;
          shift = wanted;
        }
      }
    } else {
      ++stats.rejected;
      h /= std::min(5.0, fac11 / safety);
    }
  }
  if (steps.empty()) throw DomainError("integrate: no step taken");
  return Trajectory(std::move(steps), params, stats);
}

std::vector<Crossing> crossings(const Trajectory& trajectory) {
  std::vector<Crossing> out;
  IntegratorStats scratch;
  for (const auto& step : trajectory.steps()) {
    if (auto sc = sign_change(step)) {
      const StepResult r = refine_crossing(step, sc->first, sc->second, trajectory.params(), scratch);
      out.push_back({from_vec(globalize(r.y, step.shift), step.t0 + r.dense.h), static_cast<int>(out.size()) + 1});
    }
  }
  // a stop on a crossing leaves q2 a rounding error away from zero at the end
  const PhaseState end = trajectory.back();
  const bool counted = !out.empty() && end.t - out.back().state.t <= 1e-12 * std::max(1.0, std::abs(end.t));
  if (!counted && end.t > trajectory.t_begin() && std::abs(end.q2) <= 1e-12) {
    out.push_back({end, static_cast<int>(out.size()) + 1});
  }
  return out;
}

Crossing find_crossing(const Trajectory& trajectory, int k) {
  if (k < 1) throw DomainError("find_crossing: index must be positive");
  const auto all = crossings(trajectory);
  if (static_cast<int>(all.size()) < k) {
    throw NotFoundError("find_crossing: trajectory has " + std::to_string(all.size()) + " crossings, requested " +
                        std::to_string(k));
  }
  return all[k - 1];
}

Trajectory assemble_symmetric(const Trajectory& half) {
  const auto& src = half.steps();
  std::vector<DenseStep> steps(src.begin(), src.end());
  steps.reserve(2 * src.size());
  const double pivot = half.t_end();
  // Binomial coefficients for the substitution x -> 1 - x.
  constexpr int binom[5][5] = {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  for (auto it = src.rbegin(); it != src.rend(); ++it) {
    DenseStep r;
    r.h = it->h;
    r.t0 = 2.0 * pivot - (it->t0 + it->h);
    for (int j = 0; j < 5; ++j) {
      StateVec acc{};
      for (int k = j; k < 5; ++k) {
        const double w = binom[k][j] * ((j % 2) ? -1.0 : 1.0);
        for (int i = 0; i < 4; ++i) acc[i] += w * it->coef[k][i];
      }
      acc[1] = -acc[1];
      acc[2] = -acc[2];
      r.coef[j] = acc;
    }
    r.shift = it->shift;
    steps.push_back(r);
  }
  IntegratorStats stats = half.stats();
  return Trajectory(std::move(steps), half.params(), stats);
}

}  // namespace genorb

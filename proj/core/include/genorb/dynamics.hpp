#pragma once

// Planar circular restricted three-body problem in rotating coordinates.
//
// H = 1/2 ((p1 + q2)^2 + (p2 - q1)^2) - 1/2 |q - B|^2 - (1 - mu)/|q - M1| - mu/|q - M2|
//
// where B is the barycentre. In the barycentric frame B = 0 and this is the
// usual H = |p|^2/2 + p1 q2 - p2 q1 - U. The M1-centred frame is the exact
// canonical translation q -> q + (mu, 0), p -> p + (0, mu) of it.

#include <array>
#include <cstddef>
#include <vector>

#include "genorb/kepler.hpp"

namespace genorb {

struct PhaseState {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double t = 0.0;
};

using StateVec = std::array<double, 4>;

inline StateVec to_vec(const PhaseState& s) { return {s.q1, s.q2, s.p1, s.p2}; }
inline PhaseState from_vec(const StateVec& y, double t) { return {y[0], y[1], y[2], y[3], t}; }

enum class Frame { barycentric, m1_centered };

struct ModelParams {
  double mu = 0.0;
  Frame frame = Frame::barycentric;

  double barycenter_x() const noexcept { return frame == Frame::barycentric ? 0.0 : mu; }
  Vec2 m1() const noexcept { return {frame == Frame::barycentric ? -mu : 0.0, 0.0}; }
  Vec2 m2() const noexcept { return {frame == Frame::barycentric ? 1.0 - mu : 1.0, 0.0}; }
};

/// Throws DomainError unless 0 <= mu < 1.
void validate(const ModelParams& params);

double hamiltonian(const PhaseState& s, const ModelParams& params);
StateVec vector_field(const StateVec& y, const ModelParams& params);

/// Momentum p2 on the symmetry line (q2 = p1 = 0) giving energy c.
/// branch = +1 or -1 selects the sign of p2 - q1. Throws HillRegionError when
/// (q1, 0) is outside the Hill region of c.
double p2_from_energy(double q1, double c, const ModelParams& params, int branch);

/// Reflection (q1, q2, p1, p2) -> (q1, -q2, -p1, p2); time is left unchanged.
constexpr PhaseState reflect(const PhaseState& s) noexcept { return {s.q1, -s.q2, -s.p1, s.p2, s.t}; }

/// Rotating-frame state expressed in the inertial frame centred at the barycentre.
PhaseState to_inertial(const PhaseState& s, const ModelParams& params);

struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double collision_radius = 1e-8;
  std::size_t max_steps = 2'000'000;
};

/// One accepted step with quartic dense output. The polynomial
/// sum_k coef[k] x^k holds the state with q1 measured from `shift`, which is
/// the abscissa of M2 during close approaches and 0 otherwise.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  double shift = 0.0;
  std::array<StateVec, 5> coef{};

  StateVec local(double x) const noexcept;
  StateVec local_end() const noexcept;
  StateVec eval(double x) const noexcept;
  StateVec start() const noexcept;
  StateVec end() const noexcept;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<DenseStep> steps, ModelParams params, IntegratorStats stats = {});

  const std::vector<DenseStep>& steps() const noexcept { return steps_; }
  const ModelParams& params() const noexcept { return params_; }
  const IntegratorStats& stats() const noexcept { return stats_; }

  double t_begin() const;
  double t_end() const;
  PhaseState front() const;
  PhaseState back() const;
  PhaseState state_at(double t) const;
  /// Energy at time t, evaluated in the chart of the step containing t.
  double energy_at(double t) const;

  /// Energy of the initial state.
  double energy() const noexcept { return energy_; }
  /// max |H - energy()| over step endpoints and midpoints.
  double energy_drift() const noexcept { return drift_; }
  double min_distance_m1() const noexcept { return min_m1_; }
  double min_distance_m2() const noexcept { return min_m2_; }

  /// Step endpoints as phase states.
  std::vector<PhaseState> samples() const;

 private:
  const DenseStep& step_at(double t) const;

  std::vector<DenseStep> steps_;
  ModelParams params_;
  IntegratorStats stats_;
  double energy_ = 0.0;
  double drift_ = 0.0;
  double min_m1_ = 0.0;
  double min_m2_ = 0.0;
};

/// Integration stops at t_end or, if crossings > 0, at the crossings-th
/// transversal crossing of q2 = 0 after the start, whichever comes first.
struct StopCondition {
  double t_end = 0.0;
  int crossings = 0;
};

struct Crossing {
  PhaseState state;
  int index = 0;
};

Trajectory integrate(const PhaseState& start, const ModelParams& params, StopCondition stop,
                     const IntegratorOptions& options = {});

/// Crossings of q2 = 0 up to and including the end time, excluding a crossing
/// at the start time, refined to |q2| <= 1e-12.
std::vector<Crossing> crossings(const Trajectory& trajectory);

/// The k-th (1-based) crossing; throws NotFoundError if there are fewer.
Crossing find_crossing(const Trajectory& trajectory, int k);

/// Full closed orbit from a half orbit that starts and ends on q2 = 0: the
/// second half is the reflected, time-reversed first half.
Trajectory assemble_symmetric(const Trajectory& half);

}  // namespace genorb

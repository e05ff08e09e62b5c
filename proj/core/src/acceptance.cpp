#include "genorb/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "genorb/continuation.hpp"
#include "genorb/errors.hpp"
#include "genorb/kepler.hpp"
#include "genorb/lambert.hpp"
#include "genorb/report.hpp"

namespace genorb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::vector<GeneratingArc> table_arcs(const RunConfig& config) {
  std::vector<GeneratingArc> arcs;
  for (const auto& row : generating_table(config).rows) {
    if (!row.arc) throw NotFoundError("no generating arc at key " + shortest(row.key) + ": " + row.note);
    arcs.push_back(*row.arc);
  }
  return arcs;
}

RunConfig table1_config() {
  RunConfig c;
  c.mode = TableMode::fixed_theta_scan;
  c.theta_deg = {0.0, 180.0, 10.0};
  c.I = {1, 1};
  return c;
}

RunConfig table4_config() {
  RunConfig c;
  c.mode = TableMode::fixed_theta;
  c.theta_deg = {10.0, 10.0, 0.0};
  c.I = {1, 20};
  return c;
}

const std::vector<double> kEnergyTargets{-1.4, -1.0, -0.5, -0.1};

Sequence fixed_b_sequence() {
  SequenceSpec spec;
  spec.mode = SequenceMode::fixed_b;
  spec.value = 1.0;
  spec.I_first = 1;
  spec.I_last = 40;
  return build_sequence(spec);
}

Sequence fixed_energy_sequence(double c0) {
  SequenceSpec spec;
  spec.mode = SequenceMode::fixed_energy;
  spec.value = c0;
  spec.I_first = 1;
  spec.I_last = 30;
  return build_sequence(spec);
}

Outcome compare_table(const std::vector<GeneratingArc>& arcs, const Fixture& fx, double elapsed) {
  if (fx.rows.size() != arcs.size()) {
    return {false, "row count " + std::to_string(arcs.size()) + " vs fixture " + std::to_string(fx.rows.size())};
  }
  const std::size_t ca = fx.column("a"), cq = fx.column("q0"), ch = fx.column("H0"), cA = fx.column("A");
  double worst = 0.0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& row = fx.rows[i];
    const GeneratingArc& arc = arcs[i];
    const double got[] = {arc.ellipse.a, arc.q0(), arc.H0, arc.action};
    const std::size_t cols[] = {ca, cq, ch, cA};
    for (int k = 0; k < 4; ++k) {
      if (!row[cols[k]]) return {false, "fixture has no value in row " + std::to_string(i)};
      worst = std::max(worst, std::abs(got[k] - *row[cols[k]]));
    }
  }
  const bool fast = elapsed < 1.0;
  return {worst <= 5e-6 && fast, "max |err| " + sci(worst) + (fast ? "" : ", slower than 1 s")};
}

Outcome criterion_table(const RunConfig& config, const std::string& fixture) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto arcs = table_arcs(config);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return compare_table(arcs, read_fixture(fixture), elapsed);
}

Outcome criterion_timing() {
  std::vector<GeneratingArc> arcs = table_arcs(table1_config());
  const auto t4 = table_arcs(table4_config());
  arcs.insert(arcs.end(), t4.begin(), t4.end());
  const auto fb = fixed_b_sequence().arcs;
  arcs.insert(arcs.end(), fb.begin(), fb.end());
  for (double c0 : kEnergyTargets) {
    const auto fe = fixed_energy_sequence(c0).arcs;
    arcs.insert(arcs.end(), fe.begin(), fe.end());
  }
  double worst = 0.0;
  for (const auto& arc : arcs) {
    const double elapsed = arc_elapsed_time(arc.ellipse.a, arc.ellipse.theta, arc.J, ArcDirection::outgoing);
    worst = std::max(worst, std::abs(elapsed - timing_target(arc.ellipse.theta, arc.I, arc.ellipse.rotation)));
  }
  return {worst <= 1e-10, std::to_string(arcs.size()) + " arcs, max residual " + sci(worst)};
}

Outcome criterion_lambert_kepler() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  constexpr int n = 50;
  for (int i = 0; i < n; ++i) {
    const double a = 1.0 + 9.0 * (i + 1) / n;
    for (int j = 0; j < n; ++j) {
      const double theta = 0.05 + (kPi - 0.1) * (j + 1) / (n + 1);
      const double eps = eccentricity_from_theta(a, theta);
      const double lambert = arc_elapsed_time(a, theta, 0, ArcDirection::outgoing);
      worst = std::max(worst, std::abs(lambert - kepler_time_oracle(a, eps, theta)));
    }
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool fast = elapsed < 5.0;
  return {worst <= 1e-9 && fast, "2500 points, max |dt| " + sci(worst) + (fast ? "" : ", slower than 5 s")};
}

Outcome criterion_action(const AcceptanceOptions& options) {
  std::vector<GeneratingArc> arcs = table_arcs(table1_config());
  const auto t4 = table_arcs(table4_config());
  arcs.insert(arcs.end(), t4.begin(), t4.end());
  double identity_gap = 0.0;
  double quadrature_gap = 0.0;
  double time_gap = 0.0;
  for (const auto& arc : arcs) {
    identity_gap = std::max(identity_gap, std::abs(arc.action - options.identity(arc)));
    double time = 0.0;
    quadrature_gap = std::max(quadrature_gap, std::abs(arc.action - regularized_action_quadrature(arc, &time)));
    time_gap = std::max(time_gap, std::abs(time - arc.tau));
  }
  const bool ok = identity_gap <= 1e-12 && quadrature_gap <= 1e-6 && time_gap <= 1e-6;
  return {ok, "identity " + sci(identity_gap) + ", quadrature " + sci(quadrature_gap) + ", elapsed time " +
                  sci(time_gap)};
}

Outcome criterion_nondegeneracy() {
  constexpr int n = 100;
  double worst = 0.0;
  double smallest = INFINITY;
  for (int i = 0; i < n; ++i) {
    const double a = 1.0 + 19.0 * (i + 1) / n;
    for (int j = 0; j < n; ++j) {
      const double theta = 0.01 + (kPi - 0.02) * (j + 1) / (n + 1);
      const double d = dH0_da(a, theta, Rotation::direct);
      smallest = std::min(smallest, d);
      const double h = 1e-3 * std::min(a - 1.0, 1.0);
      auto f = [&](double x) { return rotating_energy(x, theta, Rotation::direct); };
      const double fd = (f(a - 2 * h) - 8 * f(a - h) + 8 * f(a + h) - f(a + 2 * h)) / (12 * h);
      worst = std::max(worst, std::abs(fd - d) / std::abs(d));
    }
  }
  return {smallest > 0.0 && worst <= 1e-8, "min dH0/da " + sci(smallest) + ", max rel FD gap " + sci(worst)};
}

Outcome criterion_fixed_b() {
  const Sequence seq = fixed_b_sequence();
  if (seq.arcs.size() != 40) return {false, std::to_string(seq.skipped.size()) + " indices infeasible"};
  bool increasing = true;
  for (std::size_t i = 1; i < seq.arcs.size(); ++i) increasing = increasing && seq.arcs[i].H0 > seq.arcs[i - 1].H0;
  const bool below_zero = seq.arcs.back().H0 < 0.0;
  const bool action_drop = seq.arcs.back().action < seq.arcs.front().action;
  const auto negative = std::find_if(seq.arcs.begin(), seq.arcs.end(), [](const auto& a) { return a.action < 0.0; });
  const bool ok = increasing && below_zero && action_drop && negative != seq.arcs.end();
  std::string detail = "H0 " + sci(seq.arcs.front().H0) + " -> " + sci(seq.arcs.back().H0) + ", A " +
                       sci(seq.arcs.front().action) + " -> " + sci(seq.arcs.back().action);
  if (negative != seq.arcs.end()) detail += ", first A < 0 at I=" + std::to_string(negative->I);
  if (!increasing) detail += ", H0 not increasing";
  return {ok, detail};
}

Outcome criterion_fixed_energy() {
  bool ok = true;
  std::string detail;
  double worst = 0.0;
  for (double c0 : kEnergyTargets) {
    const Sequence seq = fixed_energy_sequence(c0);
    bool decreasing = true;
    for (std::size_t i = 0; i < seq.arcs.size(); ++i) {
      worst = std::max(worst, std::abs(seq.arcs[i].H0 - c0));
      if (i > 0) decreasing = decreasing && seq.arcs[i].action < seq.arcs[i - 1].action;
    }
    ok = ok && decreasing;
    if (!detail.empty()) detail += "; ";
    detail += "c0=" + shortest(c0) + ": ";
    if (seq.arcs.empty()) {
      detail += "no feasible arc for I <= 30";
    } else {
      detail += std::to_string(seq.arcs.size()) + " arcs from I=" + std::to_string(seq.arcs.front().I) +
                (decreasing ? "" : ", action not decreasing");
    }
  }
  ok = ok && worst <= 1e-8;
  return {ok, "max |H0 - c0| " + sci(worst) + "; " + detail};
}

// Orbits shared by the continuation criteria.
struct ContinuationRuns {
  std::vector<GeneratingArc> arcs;
  std::vector<std::string> keys;       // fixture file and row key per arc
  std::vector<std::vector<SweepCell>> cells;  // [arc][mu] for sun-jupiter, earth-moon
  std::vector<SweepCell> limit;        // theta = 60 at 1e-5, 1e-4, 1e-3
  GeneratingArc limit_arc;
  double sweep_seconds = 0.0;
  double limit_seconds = 0.0;
};

const std::vector<double> kTableMus{kSunJupiter, kEarthMoon};
const std::vector<double> kLimitMus{1e-5, 1e-4, 1e-3};

ContinuationRuns& continuation_runs(std::optional<ContinuationRuns>& cache, bool need_limit) {
  if (!cache) {
    ContinuationRuns runs;
    for (int deg = 10; deg <= 90; deg += 10) {
      runs.arcs.push_back(generating_arc(deg * kDeg, 1, Rotation::direct));
      runs.keys.push_back("theta " + std::to_string(deg));
    }
    for (int I : {5, 10}) {
      runs.arcs.push_back(generating_arc(10.0 * kDeg, I, Rotation::direct));
      runs.keys.push_back("I " + std::to_string(I));
    }
    const auto t0 = std::chrono::steady_clock::now();
    runs.cells = continuation_sweep(runs.arcs, kTableMus);
    runs.sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cache = std::move(runs);
  }
  if (need_limit && cache->limit.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    cache->limit_arc = generating_arc(60.0 * kDeg, 1, Rotation::direct);
    cache->limit = continue_arc(cache->limit_arc, kLimitMus);
    cache->limit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return *cache;
}

Outcome criterion_continued(ContinuationRuns& runs, const std::string& fixtures) {
  const Fixture theta_table = read_fixture(fixtures + "/continued_I1_astro.csv");
  const Fixture index_table = read_fixture(fixtures + "/continued_theta10_astro.csv");
  const std::vector<std::string> labels{"sun_jupiter", "earth_moon"};
  double worst_q = 0.0;
  double worst_a = 0.0;
  std::string missing;
  for (std::size_t i = 0; i < runs.arcs.size(); ++i) {
    const GeneratingArc& arc = runs.arcs[i];
    const bool by_theta = runs.keys[i].rfind("theta", 0) == 0;
    const Fixture& fx = by_theta ? theta_table : index_table;
    const double key = by_theta ? std::round(arc.ellipse.theta / kDeg) : arc.I;
    const auto row = std::find_if(fx.rows.begin(), fx.rows.end(), [&](const auto& r) { return r[0] && *r[0] == key; });
    if (row == fx.rows.end()) return {false, "fixture lacks " + runs.keys[i]};
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const auto& q_ref = (*row)[fx.column("q0_" + labels[j])];
      const auto& a_ref = (*row)[fx.column("A_" + labels[j])];
      const SweepCell& cell = runs.cells[i][j];
      if (!q_ref || !a_ref) return {false, "fixture has no value for " + runs.keys[i]};
      if (!cell.orbit) {
        missing += " " + runs.keys[i] + "/" + labels[j];
        continue;
      }
      worst_q = std::max(worst_q, std::abs(std::abs(cell.orbit->q0) - *q_ref) / *q_ref);
      worst_a = std::max(worst_a, std::abs(cell.orbit->action - *a_ref));
    }
  }
  const bool fast = runs.sweep_seconds < 120.0;
  const bool ok = missing.empty() && worst_q <= 5e-3 && worst_a <= 1e-2 && fast;
  std::string detail = std::to_string(runs.arcs.size() * labels.size()) + " orbits, max rel q0 " + sci(worst_q) +
                       ", max |dA| " + sci(worst_a);
  if (!missing.empty()) detail += ", not found:" + missing;
  if (!fast) detail += ", slower than 2 min";
  return {ok, detail};
}

Outcome criterion_certificates(ContinuationRuns& runs) {
  double drift = 0.0;
  double closure = 0.0;
  int count = 0;
  std::string bad;
  auto check = [&](const SweepCell& cell, const std::string& name) {
    if (!cell.orbit) {
      bad += " " + name + "(not found)";
      return;
    }
    ++count;
    drift = std::max(drift, cell.orbit->energy_drift);
    closure = std::max(closure, cell.orbit->closure);
    const int beta0 = beta0_integral(*cell.orbit);
    if (beta0 != -1) bad += " " + name + "(beta0 " + std::to_string(beta0) + ")";
  };
  for (std::size_t i = 0; i < runs.arcs.size(); ++i) {
    for (std::size_t j = 0; j < runs.cells[i].size(); ++j) check(runs.cells[i][j], runs.keys[i] + "/mu " + shortest(kTableMus[j]));
  }
  for (const auto& cell : runs.limit) check(cell, "theta 60/mu " + shortest(cell.mu));
  const bool ok = bad.empty() && drift <= 1e-9 && closure <= 1e-8;
  std::string detail = std::to_string(count) + " orbits, max drift " + sci(drift) + ", max closure " + sci(closure);
  if (!bad.empty()) detail += ", failing:" + bad;
  return {ok, detail};
}

Outcome criterion_limit(ContinuationRuns& runs) {
  std::vector<double> gaps;
  for (const auto& cell : runs.limit) {
    if (!cell.orbit) return {false, "no orbit at mu " + shortest(cell.mu) + ": " + cell.failure};
    gaps.push_back(std::abs(cell.orbit->action - runs.limit_arc.action));
  }
  const bool monotone = gaps[0] < gaps[1] && gaps[1] < gaps[2];
  return {monotone, "|dA| " + sci(gaps[0]) + " / " + sci(gaps[1]) + " / " + sci(gaps[2]) + " at mu 1e-5 / 1e-4 / 1e-3"};
}

Outcome criterion_negative_action(ContinuationRuns& runs) {
  for (std::size_t i = 0; i < runs.arcs.size(); ++i) {
    const SweepCell& cell = runs.cells[i][1];
    if (!cell.orbit) continue;
    const ContinuedOrbit& o = *cell.orbit;
    if (o.action < 0.0 && beta0_integral(o) == -1 && o.energy > -std::numbers::sqrt2 && o.energy < 0.0 &&
        runs.keys[i] == "I 10") {
      return {true, "theta 10, I 10, earth-moon: A " + std::to_string(o.action) + ", H " + std::to_string(o.energy) +
                        ", beta0 -1"};
    }
  }
  return {false, "no Earth-Moon orbit with A < 0, beta0 = -1 and energy in (-sqrt 2, 0) at theta 10, I 10"};
}

const char* kTitles[kCriterionCount] = {
    "generating table, I = 1",
    "generating table, theta = 10 deg",
    "timing residual",
    "Lambert vs Kepler elapsed time",
    "action identity and quadrature",
    "energy monotone in a",
    "fixed-b sequence",
    "fixed-energy sequences",
    "continued-orbit tables",
    "orbit certificates",
    "mu -> 0 action convergence",
    "negative-action orbit",
};

}  // namespace

std::size_t Fixture::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw NotFoundError("fixture has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

Fixture read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot read fixture '" + path + "'");
  Fixture fx;
  std::string line;
  auto cells = [](const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw NotFoundError("empty fixture '" + path + "'");
  fx.header = cells(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::optional<double>> row;
    for (const auto& cell : cells(line)) {
      if (cell == "x") {
        row.emplace_back();
      } else {
        row.emplace_back(std::stod(cell));
      }
    }
    if (row.size() != fx.header.size()) throw NotFoundError("ragged row in fixture '" + path + "'");
    fx.rows.push_back(std::move(row));
  }
  return fx;
}

double regularized_action_quadrature(const GeneratingArc& arc, double* time) {
  const EllipseParams& e = arc.ellipse;
  const RegularizedData d = regularized_data(e.a, e.eps, e.rotation);
  using C = std::complex<double>;
  auto z = [&](double s) { return C(d.alpha * std::cos(d.varpi * s), d.beta * std::sin(d.varpi * s)); };
  auto dz = [&](double s) {
    return C(-d.alpha * d.varpi * std::sin(d.varpi * s), d.beta * d.varpi * std::cos(d.varpi * s));
  };
  // Q = z^2, dt = 4|z|^2 ds, P = dQ/dt
  auto integrand = [&](double s) {
    const C zs = z(s);
    const double dt_ds = 4.0 * std::norm(zs);
    const C q = zs * zs;
    const C p = 2.0 * zs * dz(s) / dt_ds;
    const double L = p.real() * q.imag() - p.imag() * q.real();
    return (std::norm(p) + L) * dt_ds;
  };
  const double half = 0.5 * arc.sigma;
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (time) *time = Quad::integrate([&](double s) { return 4.0 * std::norm(z(s)); }, -half, half, 15, 1e-14);
  return Quad::integrate(integrand, -half, half, 15, 1e-14);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  std::optional<ContinuationRuns> runs;
  const auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!wanted(id)) continue;
    CriterionResult r;
    r.id = id;
    r.title = kTitles[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      switch (id) {
        case 1: o = criterion_table(table1_config(), options.fixtures + "/generating_I1.csv"); break;
        case 2: o = criterion_table(table4_config(), options.fixtures + "/generating_theta10.csv"); break;
        case 3: o = criterion_timing(); break;
        case 4: o = criterion_lambert_kepler(); break;
        case 5: o = criterion_action(options); break;
        case 6: o = criterion_nondegeneracy(); break;
        case 7: o = criterion_fixed_b(); break;
        case 8: o = criterion_fixed_energy(); break;
        case 9: o = criterion_continued(continuation_runs(runs, false), options.fixtures); break;
        case 10: o = criterion_certificates(continuation_runs(runs, true)); break;
        case 11: o = criterion_limit(continuation_runs(runs, true)); break;
        case 12: o = criterion_negative_action(continuation_runs(runs, false)); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    r.passed = o.passed;
    r.detail = o.detail;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& result) {
  char head[128];
  std::snprintf(head, sizeof head, "%s %2d  %-34s (%.3f s)  ", result.passed ? "PASS" : "FAIL", result.id,
                result.title.c_str(), result.seconds);
  return head + result.detail;
}

}  // namespace genorb

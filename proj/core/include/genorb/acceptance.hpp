#pragma once

// Acceptance suite: reproduction of the reference tables and the invariants
// every computed arc and orbit must satisfy. Shared by `genorb verify` and the
// acceptance test.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genorb/arcs.hpp"

namespace genorb {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string fixtures;  // directory with the reference table CSVs
  std::vector<int> only;  // criteria to run; empty runs all
  /// Replaceable so that a perturbed identity can be shown to fail.
  std::function<double(const GeneratingArc&)> identity = action_identity;
};

inline constexpr int kCriterionCount = 12;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3  timing residual  (0.004 s)  max 1.8e-15"
std::string format_result(const CriterionResult& result);

/// Reference table: header names and numeric cells, "x" read as empty.
struct Fixture {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  std::size_t column(const std::string& name) const;
};

Fixture read_fixture(const std::string& path);

/// Action integral of the mu = 0 arc by adaptive quadrature over the
/// Levi-Civita parametrization; `time` receives the elapsed time.
double regularized_action_quadrature(const GeneratingArc& arc, double* time = nullptr);

}  // namespace genorb

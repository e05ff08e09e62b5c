#include <gtest/gtest.h>

#include "genorb/acceptance.hpp"
#include "genorb/kepler.hpp"

namespace genorb {
namespace {

AcceptanceOptions fast_criteria() {
  AcceptanceOptions options;
  options.fixtures = GENORB_FIXTURE_DIR;
  options.only = {1, 2, 3, 4, 5, 6, 7, 8};
  return options;
}

TEST(Acceptance, ClosedFormCriteriaPass) {
  const auto results = run_acceptance(fast_criteria());
  ASSERT_EQ(results.size(), 8u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << format_result(r);
}

TEST(Acceptance, PerturbedActionIdentityIsCaught) {
  AcceptanceOptions options = fast_criteria();
  options.only = {5};
  options.identity = [](const GeneratingArc& arc) {
    const double h = kepler_energy(arc.ellipse.a);
    const double L = angular_momentum(arc.ellipse.a, arc.ellipse.eps, arc.ellipse.rotation);
    return arc.tau * (2.0 * h + L) + 7.0 * arc.sigma;
  };
  const auto results = run_acceptance(options);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_FALSE(results[0].passed);
  EXPECT_EQ(format_result(results[0]).substr(0, 7), "FAIL  5");
}

TEST(Acceptance, MissingFixturesFailTheTableCriteria) {
  AcceptanceOptions options;
  options.fixtures = "/nonexistent";
  options.only = {1, 9};
  const auto results = run_acceptance(options);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_FALSE(results[0].passed);
  EXPECT_FALSE(results[1].passed);
}

}  // namespace
}  // namespace genorb

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "genorb/acceptance.hpp"

namespace genorb::testing {

// Seeded draws for property tests; every suite fixes its own seed.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 rng_;
};

inline Fixture fixture(const std::string& name) { return read_fixture(std::string(GENORB_FIXTURE_DIR) + "/" + name); }

}  // namespace genorb::testing

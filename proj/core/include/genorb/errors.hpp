#pragma once

#include <stdexcept>
#include <string>

namespace genorb {

/// Argument outside the domain where a closed-form relation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested configuration is singular (e.g. stationary circular orbit).
class SingularError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Timing condition cannot be met for the requested parameters.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial data lies outside the Hill region of the requested energy.
class HillRegionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integration came too close to a massive primary or the step size underflowed.
class CollisionError : public std::runtime_error {
 public:
  CollisionError(const std::string& what, double closest_m1, double closest_m2)
      : std::runtime_error(what), closest_m1_(closest_m1), closest_m2_(closest_m2) {}

  double closest_m1() const noexcept { return closest_m1_; }
  double closest_m2() const noexcept { return closest_m2_; }

 private:
  double closest_m1_;
  double closest_m2_;
};

/// A searched-for object (crossing, root, periodic orbit) does not exist in the given range.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling too coarse to track a continuous angle unambiguously.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace genorb

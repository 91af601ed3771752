/**
 * @file errors.hpp
 * @brief Exception types shared by the solver modules.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sn/types.hpp"

namespace sn {

/** @brief The adaptive integrator could not make progress (step underflow, step budget, non-finite state). */
class IntegrationStalled : public std::runtime_error {
 public:
  IntegrationStalled(const std::string& what, Profile partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  [[nodiscard]] const Profile& partial_profile() const noexcept { return partial_; }
  [[nodiscard]] RadialState last_state() const { return partial_.empty() ? RadialState{} : partial_.back(); }

 private:
  Profile partial_;
};

/** @brief A solution stayed positive and decreasing up to r_max but never dropped below u_floor. */
class UndeterminedHorizon : public std::runtime_error {
 public:
  UndeterminedHorizon(const std::string& what, Profile partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  [[nodiscard]] const Profile& partial_profile() const noexcept { return partial_; }

 private:
  Profile partial_;
};

/** @brief No positive-set witness was found along the doubling sequence. */
class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** @brief Bisection ran out of iterations; carries the best bracket found. */
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/** @brief The requested functional needs a decaying potential gauge that does not exist for d <= 2. */
class UnsupportedGauge : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sn

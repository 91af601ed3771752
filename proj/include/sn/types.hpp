/**
 * @file types.hpp
 * @brief Core value types: the spatial dimension and the radial state 5-tuple.
 */
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sn {

/** @brief An argument outside the mathematical domain of an operation. */
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/** @brief Spatial dimension d > 0, treated as a continuous parameter. */
class Dimension {
 public:
  explicit Dimension(double d) : d_(d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DomainError("dimension must be positive and finite, got " + std::to_string(d));
    }
  }

  [[nodiscard]] double value() const noexcept { return d_; }

 private:
  double d_;
};

/** @brief (r, u, u', V, V') advanced by the integrator. */
struct RadialState {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;
  double V = 0.0;
  double dV = 0.0;
};

using Profile = std::vector<RadialState>;

}  // namespace sn

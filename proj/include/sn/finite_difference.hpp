/**
 * @file finite_difference.hpp
 * @brief Fourth-order central differences on samples that are uniformly spaced in s = ln r.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace sn::fd {

/// Spacing h in ln r of the five-point stencil centered at i, or nullopt when the
/// stencil leaves the array or is not uniform (event points, terminal points).
inline std::optional<double> log_step(std::span<const double> r, std::size_t i) {
  if (i < 2 || i + 2 >= r.size()) return std::nullopt;
  const double h = std::log(r[i + 1] / r[i]);
  if (!(h > 0.0)) return std::nullopt;
  for (std::size_t k = i - 2; k < i + 2; ++k) {
    if (std::abs(std::log(r[k + 1] / r[k]) - h) > 1e-9 * h) return std::nullopt;
  }
  return h;
}

/// d f / d s at i.
inline double d_ds(std::span<const double> f, std::size_t i, double h) {
  return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
}

/// d^2 f / d s^2 at i.
inline double d2_ds2(std::span<const double> f, std::size_t i, double h) {
  return (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h * h);
}

}  // namespace sn::fd

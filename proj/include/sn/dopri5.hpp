/**
 * @file dopri5.hpp
 * @brief Dormand-Prince 5(4) integrator with PI step control, continuous
 *        extension and event localization on the dense output.
 *
 * Header-only and generic in the state dimension. The driver never throws on
 * numerical trouble; it reports an IntegratorStatus and the trajectory computed
 * so far, and callers decide how to surface the failure.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sn::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/** @brief Local error and step-size controls. */
struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 0.0;  // 0 selects an automatic first step
  double h_min = 1e-14;
  double h_max = 0.0;  // 0 means unbounded
  long max_steps = 2'000'000;
  double safety = 0.9;
  double fac_min = 0.2;
  double fac_max = 10.0;
  double beta = 0.04;  // PI (Lund-stabilization) coefficient
};

enum class IntegratorStatus { EndReached, Event, StepUnderflow, MaxSteps, NonFinite };

template <std::size_t N>
struct Sample {
  double t = 0.0;
  Vec<N> y{};
};

/** @brief Scalar event function g(t, y); a sign change in the requested direction fires it. */
template <std::size_t N>
struct EventSpec {
  std::function<double(double, const Vec<N>&)> g;
  int direction = 0;  // -1: falling through zero, +1: rising, 0: either
};

template <std::size_t N>
struct Trajectory {
  std::vector<Sample<N>> samples;
  IntegratorStatus status = IntegratorStatus::EndReached;
  int event_index = -1;
  Sample<N> last;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/** @brief Continuous extension of one accepted step (4th-order Hairer interpolant). */
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> rc{};

  [[nodiscard]] Vec<N> operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }
    return out;
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double rms_scaled(const Vec<N>& v, const Vec<N>& y, const StepControl& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = c.abs_tol + c.rel_tol * std::abs(y[i]);
    acc += (v[i] / sk) * (v[i] / sk);
  }
  return std::sqrt(acc / static_cast<double>(N));
}

// Modified regula falsi (Illinois) on [a, b] with g(a), g(b) of opposite sign.
// Returns the bracket end lying on the post-crossing side.
template <class G>
double illinois(G&& g, double a, double b, double ga, double gb, double tol) {
  int side = 0;
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    const double gc = g(c);
    if (gc == 0.0) return c;
    if ((gc > 0.0) == (gb > 0.0)) {
      b = c;
      gb = gc;
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      a = c;
      ga = gc;
      if (side == +1) gb *= 0.5;
      side = +1;
    }
  }
  return b;
}

inline bool crossed(double g0, double g1, int direction) {
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  if (direction < 0) return falling;
  if (direction > 0) return rising;
  return falling || rising;
}

}  // namespace detail

/**
 * @brief Integrate y' = rhs(t, y) from t0 to t_end.
 *
 * Samples are emitted at t0, at every entry of @p output_times inside the
 * integrated range (evaluated on the dense output), and at the stopping point.
 * The first event whose sign change is detected stops the integration; when two
 * fire in one step the earliest root wins and exact ties go to the lower index.
 */
template <std::size_t N, class Rhs>
Trajectory<N> integrate(Rhs&& rhs, double t0, const Vec<N>& y0, double t_end,
                        std::span<const double> output_times, std::span<const EventSpec<N>> events,
                        const StepControl& ctl, double event_tol) {
  using namespace detail;
  Trajectory<N> traj;
  traj.samples.push_back({t0, y0});
  traj.last = {t0, y0};

  double t = t0;
  Vec<N> y = y0;
  Vec<N> k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ys{}, y1{};
  rhs(t, y, k1);

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);

  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] <= t0) ++next_out;

  const double span = t_end - t0;
  double h = ctl.h_init;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    const double dn0 = rms_scaled(y, y, ctl);
    const double dn1 = rms_scaled(k1, y, ctl);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    Vec<N> yt{};
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h0 * k1[i];
    Vec<N> ft{};
    rhs(t + h0, yt, ft);
    Vec<N> df{};
    for (std::size_t i = 0; i < N; ++i) df[i] = ft[i] - k1[i];
    const double dn2 = rms_scaled(df, y, ctl) / h0;
    const double dmax = std::max(dn1, dn2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  if (ctl.h_max > 0.0) h = std::min(h, ctl.h_max);

  const double expo1 = 0.2 - ctl.beta * 0.75;
  double facold = 1e-4;
  bool last_rejected = false;
  int nonfinite_streak = 0;

  while (true) {
    if (traj.accepted_steps + traj.rejected_steps >= ctl.max_steps) {
      traj.status = IntegratorStatus::MaxSteps;
      break;
    }
    const double h_floor = std::max(ctl.h_min, 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t));
    if (h < h_floor) {
      traj.status = IntegratorStatus::StepUnderflow;
      break;
    }
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ys, k2);
    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ys, k3);
    for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ys, k4);
    for (std::size_t i = 0; i < N; ++i)
      ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ys, k5);
    for (std::size_t i = 0; i < N; ++i)
      ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = final_step ? t_end : t + h;
    rhs(t_new, ys, k6);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(t_new, y1, k7);

    if (!all_finite(y1) || !all_finite(k7)) {
      ++traj.rejected_steps;
      if (++nonfinite_streak > 50) {
        traj.status = IntegratorStatus::NonFinite;
        break;
      }
      h *= 0.25;
      last_rejected = true;
      continue;
    }
    nonfinite_streak = 0;

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err = std::max(err, std::abs(ei) / sk);
    }

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, ctl.beta);
      fac = std::clamp(fac / ctl.safety, 1.0 / ctl.fac_max, 1.0 / ctl.fac_min);
      double h_next = h / fac;
      if (last_rejected) h_next = std::min(h_next, h);
      if (ctl.h_max > 0.0) h_next = std::min(h_next, ctl.h_max);
      facold = std::max(err, 1e-4);
      last_rejected = false;
      ++traj.accepted_steps;

      DenseStep<N> dense;
      dense.t0 = t;
      dense.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        dense.rc[0][i] = y[i];
        dense.rc[1][i] = ydiff;
        dense.rc[2][i] = bspl;
        dense.rc[3][i] = ydiff - h * k7[i] - bspl;
        dense.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }

      int fired = -1;
      double t_fire = t_new;
      std::vector<double> g_new(events.size());
      for (std::size_t e = 0; e < events.size(); ++e) {
        g_new[e] = events[e].g(t_new, y1);
        if (!crossed(g_prev[e], g_new[e], events[e].direction)) continue;
        auto g_dense = [&](double tt) { return events[e].g(tt, dense(tt)); };
        const double root = illinois(g_dense, t, t_new, g_prev[e], g_new[e], event_tol);
        if (fired < 0 || root < t_fire - event_tol) {
          fired = static_cast<int>(e);
          t_fire = root;
        }
      }

      const double t_stop = fired >= 0 ? t_fire : t_new;
      while (next_out < output_times.size() && output_times[next_out] < t_stop) {
        const double to = output_times[next_out++];
        traj.samples.push_back({to, dense(to)});
      }

      if (fired >= 0) {
        const Vec<N> ye = t_fire >= t_new ? y1 : dense(t_fire);
        traj.samples.push_back({t_fire, ye});
        traj.last = {t_fire, ye};
        traj.status = IntegratorStatus::Event;
        traj.event_index = fired;
        return traj;
      }

      t = t_new;
      y = y1;
      k1 = k7;
      g_prev = std::move(g_new);
      if (next_out < output_times.size() && output_times[next_out] == t) ++next_out;
      if (final_step) {
        traj.samples.push_back({t, y});
        traj.last = {t, y};
        traj.status = IntegratorStatus::EndReached;
        return traj;
      }
      traj.last = {t, y};
      h = h_next;
    } else {
      h = h / std::min(1.0 / ctl.fac_min, fac11 / ctl.safety);
      last_rejected = true;
      ++traj.rejected_steps;
    }
  }

  if (traj.samples.back().t != t) traj.samples.push_back({t, y});
  traj.last = {t, y};
  return traj;
}

/** @brief Geometric output grid from @p start (exclusive) to @p end (inclusive-ish), n points per decade. */
inline std::vector<double> geometric_grid(double start, double end, int per_decade) {
  std::vector<double> grid;
  if (start <= 0.0 || end <= start || per_decade <= 0) return grid;
  const double step = std::log(10.0) / per_decade;
  const double ls = std::log(start);
  for (long k = 1;; ++k) {
    const double r = std::exp(ls + step * static_cast<double>(k));
    if (r >= end) break;
    grid.push_back(r);
  }
  return grid;
}

}  // namespace sn::ode

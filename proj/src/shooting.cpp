#include "sn/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sn/errors.hpp"

namespace sn {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Negative:
      return "N";
    case Verdict::Positive:
      return "P";
    case Verdict::Candidate:
      return "CANDIDATE";
  }
  return "UNKNOWN";
}

Classification classify(double u0, const SolverConfig& cfg, ClassifyMode mode) {
  if (!(u0 > 0.0) || !std::isfinite(u0)) throw DomainError("classify: u0 must be positive and finite");
  cfg.validate();
  const EventSet watch = mode == ClassifyMode::StopOnDecay
                             ? EventSet::all()
                             : EventSet{EventKind::UZeroDescending, EventKind::DuZeroAscending, EventKind::RMaxReached};
  auto res = integrate(series_start(u0, cfg.d, cfg.r_start), cfg, watch);

  Classification c;
  c.event = res.event.kind;
  c.witness_r = res.event.r_event;
  switch (res.event.kind) {
    case EventKind::UZeroDescending:
      c.verdict = Verdict::Negative;
      break;
    case EventKind::DuZeroAscending:
      c.verdict = Verdict::Positive;
      break;
    case EventKind::UDecayed:
      c.verdict = Verdict::Candidate;
      break;
    case EventKind::RMaxReached: {
      const auto& s = res.event.state;
      if (!(s.u > 0.0 && s.u < cfg.u_floor && s.du < 0.0)) {
        throw UndeterminedHorizon("classify: u0 = " + std::to_string(u0) + " is undetermined at r_max = " +
                                      std::to_string(cfg.r_max) + " (u = " + std::to_string(s.u) +
                                      "); increase r_max",
                                  std::move(res.profile));
      }
      c.verdict = Verdict::Candidate;
      break;
    }
  }
  c.profile = std::move(res.profile);
  return c;
}

namespace {

enum class Probe { Negative, Positive, Unresolved };

Probe probe(double u0, const SolverConfig& cfg) {
  try {
    const auto c = classify(u0, cfg, ClassifyMode::ResolveToHorizon);
    if (c.verdict == Verdict::Negative) return Probe::Negative;
    if (c.verdict == Verdict::Positive) return Probe::Positive;
    return Probe::Unresolved;
  } catch (const UndeterminedHorizon&) {
    return Probe::Unresolved;
  } catch (const IntegrationStalled&) {
    return Probe::Unresolved;
  }
}

// Certified ends lo (negative) and hi (positive), plus an optional band
// [band_lo, band_hi] of probes that resolved into neither set.
struct Search {
  double lo = 0.0;
  double hi = 0.0;
  bool has_band = false;
  double band_lo = 0.0;
  double band_hi = 0.0;
  int iterations = 0;

  [[nodiscard]] bool converged(double tol) const {
    if (!has_band) return hi - lo < tol;
    return band_lo - lo < tol && hi - band_hi < tol;
  }
};

// One bisection step. Returns false when the bracket cannot be split further.
bool refine(Search& s, const SolverConfig& cfg, double tol) {
  if (s.converged(tol)) return false;
  double m = 0.0;
  if (!s.has_band) {
    m = 0.5 * (s.lo + s.hi);
  } else if (s.band_lo - s.lo >= s.hi - s.band_hi) {
    m = 0.5 * (s.lo + s.band_lo);
  } else {
    m = 0.5 * (s.band_hi + s.hi);
  }
  if (!(m > s.lo && m < s.hi)) return false;
  if (s.has_band && (m == s.band_lo || m == s.band_hi)) return false;

  ++s.iterations;
  switch (probe(m, cfg)) {
    case Probe::Negative:
      s.lo = m;
      if (s.has_band && m >= s.band_lo) s.has_band = false;
      break;
    case Probe::Positive:
      s.hi = m;
      if (s.has_band && m <= s.band_hi) s.has_band = false;
      break;
    case Probe::Unresolved:
      if (!s.has_band) {
        s.has_band = true;
        s.band_lo = s.band_hi = m;
      } else {
        s.band_lo = std::min(s.band_lo, m);
        s.band_hi = std::max(s.band_hi, m);
      }
      break;
  }
  return true;
}

Profile run_profile(double u0, const SolverConfig& cfg) {
  try {
    return integrate(series_start(u0, cfg.d, cfg.r_start), cfg,
                     {EventKind::UZeroDescending, EventKind::DuZeroAscending})
        .profile;
  } catch (const IntegrationStalled& e) {
    return e.partial_profile();
  }
}

// The ground state lies strictly between the solutions started at the bracket
// ends while they stay positive, so their spread bounds the profile error.
Profile sandwich_profile(const Search& s, const SolverConfig& cfg, double rel_spread) {
  const double mid_u0 = 0.5 * (s.lo + s.hi);
  const Profile lo = run_profile(s.lo, cfg);
  const Profile hi = run_profile(s.hi, cfg);
  const Profile mid = run_profile(mid_u0, cfg);
  const double amplified = 10.0 * (s.hi - s.lo);

  Profile out;
  const std::size_t n = std::min({lo.size(), hi.size(), mid.size()});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = mid[i];
    if (lo[i].r != m.r || hi[i].r != m.r) break;
    if (!(m.u > 0.0) || !(m.du < 0.0)) break;
    if (hi[i].u - lo[i].u > std::max(rel_spread * m.u, amplified)) break;
    out.push_back(m);
  }
  return out;
}

}  // namespace

Bracket bracket(const SolverConfig& cfg) {
  cfg.validate();
  Bracket b;
  b.lo = 0.5;
  if (probe(b.lo, cfg) != Probe::Negative) {
    throw BracketFailure("bracket: u0 = 0.5 did not resolve into the negative set");
  }
  for (int k = 1; k <= 60; ++k) {
    const double hi = std::ldexp(1.0, k);
    if (probe(hi, cfg) == Probe::Positive) {
      b.hi = hi;
      return b;
    }
  }
  throw BracketFailure("bracket: no positive-set member found up to 2^60");
}

VInfinity estimate_v_infinity(std::span<const RadialState> profile, Dimension d) {
  if (profile.empty()) throw DomainError("estimate_v_infinity: empty profile");
  const auto& s = profile.back();
  if (!(s.dV > 0.0) || !(s.r > 0.0)) return {s.V, false};
  const double ddV = s.u * s.u - (d.value() - 1.0) / s.r * s.dV;
  const double q = s.r * ddV / s.dV;
  if (q >= -1.0) return {s.V, true};
  return {s.V + s.r * s.dV / (-q - 1.0), false};
}

DecayEstimate decay_rate(std::span<const RadialState> profile, Dimension d) {
  if (profile.size() < 2) throw DomainError("decay_rate: profile needs at least two samples");
  DecayEstimate est;
  est.window_hi = profile.back().r;
  est.window_lo = est.window_hi / 10.0;
  double acc = 0.0;
  for (const auto& s : profile) {
    if (s.r < est.window_lo) continue;
    if (!(s.u > 0.0)) throw DomainError("decay_rate: u is nonpositive in the tail window");
    acc += -s.du / s.u;
    ++est.window_samples;
  }
  est.kappa = acc / static_cast<double>(est.window_samples);

  const auto vinf = estimate_v_infinity(profile, d);
  est.v_infinity = vinf.value;
  est.v_infinity_divergent = vinf.divergent;
  est.sqrt_vinf_minus_one = vinf.divergent ? std::numeric_limits<double>::infinity()
                                           : std::sqrt(std::max(0.0, vinf.value - 1.0));
  return est;
}

GroundStateResult shoot(const SolverConfig& cfg, double u0_tol, const ShootOptions& opts) {
  if (!(u0_tol > 0.0)) throw DomainError("shoot: u0_tol must be positive");
  cfg.validate();

  const Bracket b = bracket(cfg);
  Search s;
  s.lo = b.lo;
  s.hi = b.hi;
  while (s.iterations < opts.max_iterations && refine(s, cfg, u0_tol)) {
  }
  if (!s.converged(u0_tol) && s.iterations >= opts.max_iterations) {
    throw NonConvergence("shoot: no convergence after " + std::to_string(s.iterations) + " iterations", s.lo, s.hi);
  }

  GroundStateResult res;
  res.u0_tol = u0_tol;
  res.u0_star = 0.5 * (s.lo + s.hi);
  res.iterations = s.iterations;
  res.final_bracket = {s.lo, s.hi};
  res.final_bracket_width = s.hi - s.lo;
  res.candidate_band = s.has_band ? s.band_hi - s.band_lo : 0.0;

  // Keep narrowing past u0_tol for the profile only: the trustworthy part of
  // the tail grows as the sandwiching solutions approach each other.
  Search fine = s;
  for (int extra = 0; extra < 200 && refine(fine, cfg, 0.0); ++extra) {
  }
  res.profile_bracket_width = fine.hi - fine.lo;
  res.profile = sandwich_profile(fine, cfg, opts.profile_rel_spread);
  if (res.profile.size() < 2) {
    throw NonConvergence("shoot: bracketing solutions separate immediately; no usable profile", s.lo, s.hi);
  }

  const auto decay = decay_rate(res.profile, cfg.d);
  res.v_infinity = decay.v_infinity;
  res.v_infinity_divergent = decay.v_infinity_divergent;
  res.kappa = decay.kappa;
  res.sqrt_vinf_minus_one = decay.sqrt_vinf_minus_one;
  return res;
}

std::vector<WronskianSample> wronskian_monotonicity(double u0_1, double u0_2, const SolverConfig& cfg) {
  if (!(u0_1 > 0.0) || u0_2 < u0_1) throw DomainError("wronskian_monotonicity: need u0_2 >= u0_1 > 0");
  cfg.validate();
  auto run = [&](double u0) {
    try {
      return integrate(series_start(u0, cfg.d, cfg.r_start), cfg, {EventKind::UZeroDescending}).profile;
    } catch (const IntegrationStalled& e) {
      return e.partial_profile();
    }
  };
  const Profile p1 = run(u0_1);
  const Profile p2 = run(u0_2);
  const double dm1 = cfg.d.value() - 1.0;

  std::vector<WronskianSample> out;
  const std::size_t n = std::min(p1.size(), p2.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = p1[i];
    const auto& b = p2[i];
    if (a.r != b.r || !(a.u > 0.0) || !(b.u > 0.0)) break;
    out.push_back({a.r, (b.du * a.u - a.du * b.u) * std::pow(a.r, dm1), a.u, b.u});
  }
  return out;
}

}  // namespace sn

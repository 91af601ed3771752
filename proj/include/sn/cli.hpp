/**
 * @file cli.hpp
 * @brief Entry point of the `sn` command-line tool.
 *
 * Subcommands: shoot, classify, lane-emden, milne, transform, verify, sweep.
 * Exit codes: 0 success, 1 verification failure, 2 bracket failure,
 * 3 non-convergence (including undetermined horizons and stalled
 * integrations), 64 usage error. GS_DEFAULT_TOL replaces the default
 * abs/rel integration tolerances; explicit flags take precedence.
 */
#pragma once

#include <ostream>

namespace sn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitBracketFailure = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitUsage = 64;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sn::cli

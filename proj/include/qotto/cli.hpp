// cli.hpp — qotto command-line front end: dist, sweep-tau, sweep-beta,
// sample, validate.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qotto/io.hpp"

namespace qotto::cli {

// Exit-status contract.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInternal = 1;    // unexpected failure
inline constexpr int kExitUsage = 2;       // bad flags, config, or input files
inline constexpr int kExitValidation = 3;  // a validation check failed
inline constexpr int kExitSupport = 4;     // sampled support violation

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tol = 0.0;
    std::string note;
};

// Cross-check suite behind the `validate` subcommand: closed form vs
// enumeration, propagated vs closed-form operators, time-reversal symmetry,
// covariance identity, engine-bound consistency, and unitarity of inputs.
std::vector<CheckResult> validation_suite(const io::RunConfig& cfg);

// Parses argv and runs one subcommand; streams receive the artifact and
// diagnostics. Returns an exit status from the contract above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qotto::cli

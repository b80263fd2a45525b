#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "proxkit/problems.hpp"
#include "proxkit/splitting.hpp"

namespace proxkit::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // numerical breakdown inside a run
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnconverged = 3;

/// Entry point shared by the binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

const std::vector<std::string>& solver_names();

/// Parameter gamma of the fixed-point equation used by the `ssn` solver when
/// none is configured: 10/L for lasso, 1/L for box-constrained problems.
double default_ssn_gamma(const ProblemSpec& spec);

struct RunOutcome {
  Vector x;
  IterTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
  std::optional<Vector> dual;
  std::vector<double> gammas;  // continuation only
};

/// Runs a named solver on a problem. Throws ConfigError when the solver does
/// not apply to the problem kind.
RunOutcome run_solver(const ProblemSpec& spec, const std::string& solver,
                      const SolverConfig& cfg);

struct CheckLine {
  std::string invariant;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct CheckOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<ProblemSpec> problem;
  std::size_t ref_iter = 100000;
};

const std::vector<std::string>& check_suites();

/// Runs one property suite. Throws ConfigError for an unknown suite name.
std::vector<CheckLine> run_check(const std::string& suite, const CheckOptions& opts);

}  // namespace proxkit::cli

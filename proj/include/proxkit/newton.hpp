#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "proxkit/linalg.hpp"
#include "proxkit/splitting.hpp"
#include "proxkit/trace.hpp"

namespace proxkit {

/// Coordinatewise Newton derivative of a thresholding map: active[i] is true
/// where |arg_i| >= threshold, equality included.
struct NewtonDerivativeMask {
  std::vector<bool> active;

  static NewtonDerivativeMask threshold(const Vector& arg, double threshold);
  std::size_t count() const;
};

/// M_k s = rhs. When `partition` is set, rows outside the mask must be
/// identity rows and the masked principal block must be SPD; the system is
/// then solved by block elimination.
struct NewtonSystem {
  LinearOperator matrix;
  Vector rhs;
  std::optional<NewtonDerivativeMask> partition;
};

struct NewtonSolve {
  Vector step;
  double condition;  // estimate for the system actually factored, NaN if skipped
};

/// Eliminates the identity rows, then solves the SPD block by conjugate
/// gradients with a dense fallback for blocks up to 200 unknowns.
NewtonSolve solve_newton_system(const NewtonSystem& system);

struct NewtonDerivative {
  LinearOperator matrix;
  std::optional<NewtonDerivativeMask> partition;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using NewtonDerivativeFn = std::function<NewtonDerivative(const Vector&)>;

struct NewtonResult {
  Vector x;
  IterTrace trace;
  bool converged = false;
  bool diverged = false;
  std::size_t iterations = 0;
};

/// x^{k+1} = x^k - D_N F(x^k)^{-1} F(x^k) until ||F(x)|| <= cfg.tol. Iterates
/// are always recorded. A residual growing 1e6-fold over the initial one flags
/// divergence; a singular system throws NumericalError naming the iterate.
NewtonResult ssn_solve(const ResidualFn& residual,
                       const NewtonDerivativeFn& derivative, const Vector& x0,
                       const SolverConfig& cfg,
                       const std::function<double(const Vector&)>& objective = {});

/// l1-regularized problem min F + alpha ||.||_1 through the fixed-point
/// equation x - prox_{gamma alpha ||.||_1}(x - gamma grad F(x)) = 0.
NewtonResult l1_ssn(const SmoothTerm& f, double alpha, double gamma,
                    const Vector& x0, const SolverConfig& cfg);

/// Residual and Newton derivative of the l1 fixed-point equation, exposed so
/// the generic driver can be exercised on the same problem.
Vector l1_residual(const SmoothTerm& f, double alpha, double gamma,
                   const Vector& x);
NewtonDerivative l1_derivative(const SmoothTerm& f, double alpha, double gamma,
                               const Vector& x);

/// H_gamma(p) = (p - proj_[-alpha, alpha](p)) / gamma, coordinatewise.
Vector regularized_multiplier(const Vector& p, double gamma, double alpha = 1.0);

/// Newton derivative of one coordinate of H_gamma: 1/gamma if |t| >= alpha.
double regularized_multiplier_slope(double t, double gamma, double alpha = 1.0);

/// Solves u - H_gamma(-grad F(u)) = 0, the optimality condition of
/// F + alpha ||.||_1 + (gamma/2) ||.||^2.
NewtonResult moreau_yosida_ssn(const SmoothTerm& f, double gamma,
                               const Vector& x0, const SolverConfig& cfg,
                               double alpha = 1.0);

struct ContinuationSchedule {
  double gamma0 = 1.0;
  double factor = 0.5;
  double floor = 1.0 / 1024.0;

  /// gamma0 * factor^k for every term not below floor.
  std::vector<double> values() const;
};

struct ContinuationResult {
  Vector x;
  IterTrace trace;  // rows carry the gamma column
  std::vector<double> gammas;
  std::vector<Vector> stage_solutions;
  std::vector<std::size_t> stage_iterations;
  bool completed = false;
  std::optional<double> failed_gamma;
};

/// Moreau-Yosida SSN over the schedule, warm-starting each stage from the
/// previous solution. Stops at the first stage that fails to converge and
/// returns the last successful solution.
ContinuationResult continuation(const SmoothTerm& f,
                                const ContinuationSchedule& schedule,
                                const Vector& x0, const SolverConfig& cfg,
                                double alpha = 1.0);

/// min (1/2)||Su - z||^2 + (alpha/2)||u||^2 over a <= u <= b, solved through
/// u = proj_[a,b](-(1/alpha) S*(Su - z)).
NewtonResult control_ssn(const LinearOperator& s, const Vector& z, double alpha,
                         double lo, double hi, const Vector& u0,
                         const SolverConfig& cfg);

/// min F over lo <= x <= hi through x - proj(x - gamma grad F(x)) = 0. Same
/// block structure as l1_ssn with the box projection in place of shrinkage.
NewtonResult box_ssn(const SmoothTerm& f, const Vector& lo, const Vector& hi,
                     double gamma, const Vector& x0, const SolverConfig& cfg);

struct SuperlinearDiagnostic {
  std::vector<double> ratios;
  bool available = false;
};

/// e_{k+1}/e_k for e_k = ||x^k - x_ref||. A ratio is kept while its
/// denominator lies above the noise floor 1e3 eps max(1, ||x_ref||); the walk
/// stops after the first numerator below that floor. Unavailable when no ratio
/// can be formed.
SuperlinearDiagnostic superlinear_diagnostic(const IterTrace& trace,
                                             const Vector& x_ref);

}  // namespace proxkit

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include <json.hpp>

#include "proxkit/functionals.hpp"
#include "proxkit/linalg.hpp"
#include "proxkit/trace.hpp"

namespace proxkit {

/// Differentiable term with Lipschitz gradient. The Hessian is only needed by
/// the Newton solvers.
struct SmoothTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::optional<double> lipschitz;
  std::function<Matrix(const Vector&)> hessian;
};

/// (1/2)||Ax - b||^2 with L = ||A||^2 (power iteration).
SmoothTerm least_squares(const LinearOperator& a, const Vector& b);

/// (1/2)x'Qx + c'x with L = ||Q||.
SmoothTerm quadratic_term(const Matrix& q, const Vector& c);

/// min F(x) + G(Ax). Explicit methods read `smooth` (with A = identity);
/// the primal-dual method reads `f_prox` and `a`.
struct CompositeProblem {
  std::optional<SmoothTerm> smooth;
  std::optional<ProxFunctional> f_prox;
  ProxFunctional g = ProxFunctional::zero();
  std::optional<LinearOperator> a;

  /// F(x) + G(Ax), using whichever F is present (smooth first).
  double objective(const Vector& x) const;
};

struct SolverConfig {
  std::size_t max_iter = 1000;
  double tol = 1e-8;
  // Step for proximal point / explicit methods / Douglas-Rachford. Explicit
  // methods default to 1/L when unset.
  std::optional<double> gamma;
  // Primal-dual steps.
  double tau = 0.0;
  double sigma = 0.0;
  bool line_search = false;
  bool fista = false;
  std::uint64_t seed = 0;
  bool record_iterates = false;
  // Reference solution for Fejer distances.
  std::optional<Vector> reference;
};

SolverConfig config_from_json(const nlohmann::json& j,
                              SolverConfig base = SolverConfig{});
nlohmann::json to_json(const SolverConfig& cfg);

struct SolveResult {
  Vector x;
  IterTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
};

struct PrimalDualResult {
  Vector x;
  Vector y;
  IterTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
};

/// x^{k+1} = prox_{gamma G}(x^k); stops once ||x^{k+1} - x^k|| <= tol.
SolveResult proximal_point(const ProxFunctional& g, const Vector& x0,
                           const SolverConfig& cfg);

/// Forward-backward splitting with fixed step or halving line search.
/// Throws NumericalError when the line search drives gamma below
/// machine-meaningful size.
SolveResult prox_gradient(const CompositeProblem& p, const Vector& x0,
                          const SolverConfig& cfg);

/// Accelerated forward-backward splitting with the tau_k extrapolation.
SolveResult fista(const CompositeProblem& p, const Vector& x0,
                  const SolverConfig& cfg);

/// FISTA extrapolation parameter: (1 + sqrt(1 + 4 tau^2)) / 2.
double fista_next_tau(double tau);

/// Douglas-Rachford on F + G, returning the x-iterate; stops once
/// ||y^{k+1} - x^{k+1}|| <= tol.
SolveResult douglas_rachford(const ProxFunctional& f, const ProxFunctional& g,
                             const Vector& z0, const SolverConfig& cfg);

/// Validated primal-dual steps: sigma tau ||A||^2 < 1.
struct PrimalDualSteps {
  double tau;
  double sigma;
  double product;  // sigma tau ||A||^2

  /// Throws ConfigError quoting the computed product when it is >= 1.
  static PrimalDualSteps checked(double tau, double sigma,
                                 const LinearOperator& a);
};

/// Primal-dual extragradient method for min F(x) + G(Ax). Dual prox is taken
/// through prox_conjugate. Converged when the fixed-point residual is below tol
/// and, whenever it is finite, the certified duality gap is below tol too.
PrimalDualResult primal_dual(const CompositeProblem& p, const Vector& x0,
                             const Vector& y0, const SolverConfig& cfg);

/// [F(x) + G(Ax)] - [-F*(-A*y) - G*(y)]; +inf when a conjugate is infinite.
double duality_gap(const CompositeProblem& p, const Vector& x, const Vector& y);

/// Duality gap at (x, theta y) with the largest theta in [0, 1] that keeps
/// the dual objective finite. Weak duality makes it a valid suboptimality bound.
double certified_duality_gap(const CompositeProblem& p, const Vector& x,
                             const Vector& y);

/// Runs Douglas-Rachford and primal-dual (A = Id, tau = gamma,
/// sigma = 1/gamma) side by side; returns max_k ||z^k - (x^k - gamma y^k)||.
double dr_as_pdhg_check(const ProxFunctional& f, const ProxFunctional& g,
                        const Vector& z0, double gamma, std::size_t iters);

}  // namespace proxkit

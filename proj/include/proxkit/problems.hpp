#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "proxkit/functionals.hpp"
#include "proxkit/linalg.hpp"
#include "proxkit/splitting.hpp"

namespace proxkit {

// (1/2)||Ax - b||^2 + alpha ||x||_1
struct LassoSpec {
  Matrix a;
  Vector b;
  double alpha = 1.0;
};

// (1/2)x'Qx + c'x over lo <= x <= hi; bounds may be infinite.
struct BoxQPSpec {
  Matrix q;
  Vector c;
  Vector lo;
  Vector hi;
};

// (1/2)||x - b||^2 + alpha sum_i huber_gamma(x_i), huber_gamma the Moreau
// envelope of |.| with parameter gamma.
struct HuberDenoiseSpec {
  Vector b;
  double gamma = 1.0;
  double alpha = 1.0;
};

// (1/2)||Su - z||^2 + (alpha/2)||u||^2 over lo <= u <= hi.
struct ControlSpec {
  Matrix s;
  Vector z;
  double alpha = 1.0;
  double lo = -1.0;
  double hi = 1.0;
};

struct ProblemSpec {
  std::variant<LassoSpec, BoxQPSpec, HuberDenoiseSpec, ControlSpec> kind;
  std::uint64_t seed = 0;

  Eigen::Index n() const;
  std::string kind_name() const;  // lasso, boxqp, huber, control
};

// Validating constructors. Throw ParameterError / DimensionError.
ProblemSpec make_lasso(Matrix a, Vector b, double alpha, std::uint64_t seed = 0);
ProblemSpec make_boxqp(Matrix q, Vector c, Vector lo, Vector hi,
                       std::uint64_t seed = 0);
ProblemSpec make_huber(Vector b, double gamma, double alpha, std::uint64_t seed = 0);
ProblemSpec make_control(Matrix s, Vector z, double alpha, double lo, double hi,
                         std::uint64_t seed = 0);

/// A is m x n standard normal; b = A x_true + 0.01 noise with 10% of x_true
/// nonzero (at least one).
ProblemSpec gen_lasso(Eigen::Index m, Eigen::Index n, double alpha,
                      std::uint64_t seed);
/// Q = M'M/n + 0.1 I, c = 2 * normal.
ProblemSpec gen_boxqp(Eigen::Index n, std::uint64_t seed, double lo = -1.0,
                      double hi = 1.0);
ProblemSpec gen_huber(Eigen::Index n, double gamma, double alpha,
                      std::uint64_t seed);
/// S = I + 0.5 normal / sqrt(n), z = 3 * normal.
ProblemSpec gen_control(Eigen::Index n, double alpha, double lo, double hi,
                        std::uint64_t seed);

/// Condition number of the problem's SPD curvature matrix (A'A + alpha I for
/// lasso, Q for box QP, S'S + alpha I for control, 1 + alpha/gamma bound for
/// Huber).
double condition_estimate(const ProblemSpec& spec);

/// Objective value; +inf outside the feasible box.
double objective(const ProblemSpec& spec, const Vector& x);

nlohmann::json to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const nlohmann::json& j);

struct OracleSolution {
  Vector x;
  double objective = 0.0;
  double kkt = 0.0;
  // Lasso: sign of each coordinate. Box QP / control: -1 at lower bound,
  // 0 free, +1 at upper bound.
  std::vector<int> pattern;
  // Box QP / control: nonnegative bound multipliers (0 on free coordinates).
  Vector multiplier;
};

/// Enumerates all 3^N sign patterns. Throws NumericalError if none verifies.
OracleSolution oracle_lasso(const ProblemSpec& spec, Eigen::Index max_dim = 12);

/// Enumerates all 3^N bound configurations. Accepts BoxQP and Control specs.
OracleSolution oracle_boxqp(const ProblemSpec& spec, Eigen::Index max_dim = 12);

/// Candidate for one sign pattern, or nullopt if it fails verification.
std::optional<Vector> lasso_pattern_solve(const LassoSpec& p,
                                          const std::vector<int>& pattern);
std::optional<Vector> boxqp_pattern_solve(const BoxQPSpec& p,
                                          const std::vector<int>& pattern);

/// Control problem rewritten as (1/2)u'(S'S + alpha I)u - (S'z)'u on the box.
BoxQPSpec as_boxqp(const ControlSpec& c);

/// First-order residual built from Fenchel-Young gaps. Lasso: the gaps at
/// (x, theta y) with y = Ax - b (or `aux`) and theta scaling A'y into the
/// alpha-ball. Box QP / control: distance to the box plus the gap of the
/// indicator at the projected point against -grad. Huber: ||grad||.
double kkt_residual(const ProblemSpec& spec, const Vector& x,
                    const std::optional<Vector>& aux = std::nullopt);

/// Smooth term plus prox term (A = identity), for the explicit methods.
CompositeProblem smooth_form(const ProblemSpec& spec);

/// F + G(Ax) with both parts prox-friendly, for the primal-dual method.
/// Throws ConfigError for Huber.
CompositeProblem split_form(const ProblemSpec& spec);

/// F and G of min F + G, both prox-friendly, for Douglas-Rachford.
std::pair<ProxFunctional, ProxFunctional> dr_pair(const ProblemSpec& spec);

}  // namespace proxkit

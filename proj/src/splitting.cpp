#include "proxkit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "proxkit/errors.hpp"

namespace proxkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_config(const SolverConfig& cfg, const char* who) {
  if (!(cfg.tol > 0.0))
    throw ConfigError(std::string(who) + ": tol must be positive");
  if (cfg.gamma && !(*cfg.gamma > 0.0))
    throw ConfigError(std::string(who) + ": gamma must be positive");
}

const SmoothTerm& require_smooth(const CompositeProblem& p, const char* who) {
  if (!p.smooth)
    throw ConfigError(std::string(who) + ": problem has no smooth term");
  if (p.a) {
    const auto& m = p.a->matrix();
    if (m.rows() != m.cols() || !m.isIdentity(0.0))
      throw ConfigError(std::string(who) +
                        ": explicit splitting requires A = identity");
  }
  return *p.smooth;
}

double initial_step(const SmoothTerm& f, const SolverConfig& cfg,
                    const char* who) {
  if (cfg.gamma) return *cfg.gamma;
  if (f.lipschitz && *f.lipschitz > 0.0) return 1.0 / *f.lipschitz;
  if (cfg.line_search) return 1.0;
  throw ConfigError(std::string(who) +
                    ": no Lipschitz constant and no line search; set gamma");
}

struct ForwardBackwardStep {
  Vector next;
  double gamma;
};

// One prox-gradient step from `x`. With line search, gamma is halved until
// F(x+) <= F(x) - gamma <grad, T> + gamma/2 ||T||^2 for T = (x - x+)/gamma.
ForwardBackwardStep forward_backward(const SmoothTerm& f,
                                     const ProxFunctional& g, const Vector& x,
                                     double gamma, bool line_search,
                                     double gamma_floor, std::size_t iterate) {
  const Vector grad = f.gradient(x);
  if (!line_search) return {prox(g, gamma, x - gamma * grad), gamma};

  const double fx = f.value(x);
  const double slack = 10.0 * kEps * (1.0 + std::abs(fx));
  for (;;) {
    Vector next = prox(g, gamma, x - gamma * grad);
    const Vector t = (x - next) / gamma;
    const double bound =
        fx - gamma * grad.dot(t) + 0.5 * gamma * t.squaredNorm();
    if (f.value(next) <= bound + slack) return {std::move(next), gamma};
    gamma *= 0.5;
    if (gamma < gamma_floor) {
      throw NumericalError("line search underflow at iterate " +
                           std::to_string(iterate) + ": gamma fell below " +
                           std::to_string(gamma_floor));
    }
  }
}

double smooth_objective(const SmoothTerm& f, const ProxFunctional& g,
                        const Vector& x) {
  return ext_add(f.value(x), value(g, x));
}

// Shared primal-dual step without step-size validation (the DR
// identification runs exactly on the boundary sigma tau ||A||^2 = 1).
void primal_dual_step(const ProxFunctional& f, const ProxFunctional& g,
                      const LinearOperator& a, double tau, double sigma,
                      Vector& x, Vector& y) {
  const Vector x_next = prox(f, tau, x - tau * a.adjoint_apply(y));
  const Vector x_bar = 2.0 * x_next - x;
  y = prox_conjugate(g, sigma, y + sigma * a.apply(x_bar));
  x = x_next;
}

std::string format_product(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SmoothTerm least_squares(const LinearOperator& a, const Vector& b) {
  require_dim(b, a.rows(), "least_squares");
  const double norm_a = op_norm(a).value;
  SmoothTerm f;
  f.value = [a, b](const Vector& x) { return 0.5 * (a.apply(x) - b).squaredNorm(); };
  f.gradient = [a, b](const Vector& x) { return a.adjoint_apply(a.apply(x) - b); };
  f.lipschitz = norm_a * norm_a;
  const Matrix ata = a.matrix().transpose() * a.matrix();
  f.hessian = [ata](const Vector&) { return ata; };
  return f;
}

SmoothTerm quadratic_term(const Matrix& q, const Vector& c) {
  const LinearOperator qop(q);
  require_dim(c, q.rows(), "quadratic_term");
  SmoothTerm f;
  f.value = [q, c](const Vector& x) { return 0.5 * x.dot(q * x) + c.dot(x); };
  f.gradient = [q, c](const Vector& x) -> Vector { return q * x + c; };
  f.lipschitz = op_norm(qop).value;
  f.hessian = [q](const Vector&) { return q; };
  return f;
}

double CompositeProblem::objective(const Vector& x) const {
  if (smooth) return ext_add(smooth->value(x), value(g, a ? a->apply(x) : x));
  if (f_prox) return ext_add(value(*f_prox, x), value(g, a ? a->apply(x) : x));
  return value(g, a ? a->apply(x) : x);
}

SolverConfig config_from_json(const nlohmann::json& j, SolverConfig base) {
  if (!j.is_object()) throw ConfigError("solver config JSON must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "max_iter")
      base.max_iter = val.get<std::size_t>();
    else if (key == "tol")
      base.tol = val.get<double>();
    else if (key == "gamma")
      base.gamma = val.get<double>();
    else if (key == "tau")
      base.tau = val.get<double>();
    else if (key == "sigma")
      base.sigma = val.get<double>();
    else if (key == "line_search")
      base.line_search = val.get<bool>();
    else if (key == "fista")
      base.fista = val.get<bool>();
    else if (key == "seed")
      base.seed = val.get<std::uint64_t>();
    else if (key == "record_iterates")
      base.record_iterates = val.get<bool>();
    else
      throw ConfigError("solver config: unknown key '" + key + "'");
  }
  if (!(base.tol > 0.0)) throw ParameterError("solver config: tol must be positive");
  if (base.gamma && !(*base.gamma > 0.0))
    throw ParameterError("solver config: gamma must be positive");
  if (base.tau < 0.0 || base.sigma < 0.0)
    throw ParameterError("solver config: tau and sigma must be nonnegative");
  return base;
}

nlohmann::json to_json(const SolverConfig& cfg) {
  nlohmann::json j{{"max_iter", cfg.max_iter},
                   {"tol", cfg.tol},
                   {"tau", cfg.tau},
                   {"sigma", cfg.sigma},
                   {"line_search", cfg.line_search},
                   {"fista", cfg.fista},
                   {"seed", cfg.seed},
                   {"record_iterates", cfg.record_iterates}};
  if (cfg.gamma) j["gamma"] = *cfg.gamma;
  return j;
}

SolveResult proximal_point(const ProxFunctional& g, const Vector& x0,
                           const SolverConfig& cfg) {
  check_config(cfg, "proximal_point");
  const double gamma = cfg.gamma.value_or(1.0);
  Stopwatch clock;
  SolveResult out;
  out.x = x0;
  out.trace.rows.push_back({0, value(g, x0), kNaN, kNaN, gamma, 0.0});
  record_point(out.trace, x0, cfg.record_iterates, cfg.reference);

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    Vector next = prox(g, gamma, out.x);
    const double residual = (next - out.x).norm();
    out.x = std::move(next);
    out.iterations = k;
    out.trace.rows.push_back(
        {k, value(g, out.x), residual, kNaN, gamma, clock.elapsed_ms()});
    record_point(out.trace, out.x, cfg.record_iterates, cfg.reference);
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SolveResult prox_gradient(const CompositeProblem& p, const Vector& x0,
                          const SolverConfig& cfg) {
  check_config(cfg, "prox_gradient");
  const SmoothTerm& f = require_smooth(p, "prox_gradient");
  const double gamma0 = initial_step(f, cfg, "prox_gradient");
  const double gamma_floor = gamma0 * kEps;

  Stopwatch clock;
  SolveResult out;
  out.x = x0;
  out.trace.rows.push_back({0, smooth_objective(f, p.g, x0), kNaN, kNaN, gamma0, 0.0});
  record_point(out.trace, x0, cfg.record_iterates, cfg.reference);

  double gamma = gamma0;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    // Line search restarts one doubling above the last accepted step.
    const double trial = cfg.line_search ? std::min(2.0 * gamma, gamma0) : gamma0;
    auto step = forward_backward(f, p.g, out.x, trial, cfg.line_search,
                                 gamma_floor, k - 1);
    gamma = step.gamma;
    const double residual = (step.next - out.x).norm();
    out.x = std::move(step.next);
    out.iterations = k;
    out.trace.rows.push_back({k, smooth_objective(f, p.g, out.x), residual, kNaN,
                              gamma, clock.elapsed_ms()});
    record_point(out.trace, out.x, cfg.record_iterates, cfg.reference);
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double fista_next_tau(double tau) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau * tau));
}

SolveResult fista(const CompositeProblem& p, const Vector& x0,
                  const SolverConfig& cfg) {
  check_config(cfg, "fista");
  const SmoothTerm& f = require_smooth(p, "fista");
  const double gamma0 = initial_step(f, cfg, "fista");
  const double gamma_floor = gamma0 * kEps;

  Stopwatch clock;
  SolveResult out;
  out.x = x0;
  out.trace.rows.push_back({0, smooth_objective(f, p.g, x0), kNaN, kNaN, gamma0, 0.0});
  record_point(out.trace, x0, cfg.record_iterates, cfg.reference);

  double tau = 1.0;
  out.trace.tau.push_back(tau);
  Vector x_bar = x0;
  double gamma = gamma0;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    // Backtracking here never grows gamma again.
    auto step = forward_backward(f, p.g, x_bar, gamma, cfg.line_search,
                                 gamma_floor, k - 1);
    gamma = step.gamma;
    const double residual = (step.next - x_bar).norm();
    const double tau_next = fista_next_tau(tau);
    x_bar = step.next + ((1.0 - tau) / tau_next) * (out.x - step.next);
    out.x = std::move(step.next);
    tau = tau_next;
    out.trace.tau.push_back(tau);
    out.iterations = k;
    out.trace.rows.push_back({k, smooth_objective(f, p.g, out.x), residual, kNaN,
                              gamma, clock.elapsed_ms()});
    record_point(out.trace, out.x, cfg.record_iterates, cfg.reference);
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SolveResult douglas_rachford(const ProxFunctional& f, const ProxFunctional& g,
                             const Vector& z0, const SolverConfig& cfg) {
  check_config(cfg, "douglas_rachford");
  const double gamma = cfg.gamma.value_or(1.0);
  Stopwatch clock;
  SolveResult out;
  Vector z = z0;
  out.x = prox(f, gamma, z0);
  out.trace.rows.push_back({0, kNaN, kNaN, kNaN, gamma, 0.0});
  record_point(out.trace, z0, cfg.record_iterates, cfg.reference);

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    out.x = prox(f, gamma, z);
    const Vector y = prox(g, gamma, 2.0 * out.x - z);
    z += y - out.x;
    const double residual = (y - out.x).norm();
    out.iterations = k;
    out.trace.rows.push_back({k, ext_add(value(f, out.x), value(g, out.x)),
                              residual, kNaN, gamma, clock.elapsed_ms()});
    record_point(out.trace, out.x, cfg.record_iterates, cfg.reference);
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

PrimalDualSteps PrimalDualSteps::checked(double tau, double sigma,
                                         const LinearOperator& a) {
  if (!(tau > 0.0) || !(sigma > 0.0))
    throw ConfigError("primal-dual: tau and sigma must be positive");
  const double norm_a = op_norm(a).value;
  const double product = sigma * tau * norm_a * norm_a;
  // The power-iteration estimate approaches ||A|| from below, so products
  // within 1e-9 of the boundary are treated as on it.
  if (!(product * (1.0 + 1e-9) < 1.0)) {
    throw ConfigError("primal-dual step rule violated: sigma*tau*||A||^2 = " +
                      format_product(product) + " >= 1");
  }
  return {tau, sigma, product};
}

PrimalDualResult primal_dual(const CompositeProblem& p, const Vector& x0,
                             const Vector& y0, const SolverConfig& cfg) {
  check_config(cfg, "primal_dual");
  if (!p.f_prox) throw ConfigError("primal_dual: problem has no prox-capable F");
  if (!p.a) throw ConfigError("primal_dual: problem has no operator A");
  const auto steps = PrimalDualSteps::checked(cfg.tau, cfg.sigma, *p.a);
  require_dim(x0, p.a->cols(), "primal_dual: x0");
  require_dim(y0, p.a->rows(), "primal_dual: y0");

  Stopwatch clock;
  PrimalDualResult out;
  out.x = x0;
  out.y = y0;
  out.trace.rows.push_back({0, p.objective(x0), kNaN,
                            certified_duality_gap(p, x0, y0), steps.tau, 0.0});
  record_point(out.trace, x0, cfg.record_iterates, cfg.reference);

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const Vector x_prev = out.x;
    const Vector y_prev = out.y;
    primal_dual_step(*p.f_prox, p.g, *p.a, steps.tau, steps.sigma, out.x, out.y);
    const double residual = std::sqrt((out.x - x_prev).squaredNorm() +
                                      (out.y - y_prev).squaredNorm());
    const double gap = certified_duality_gap(p, out.x, out.y);
    out.iterations = k;
    out.trace.rows.push_back(
        {k, p.objective(out.x), residual, gap, steps.tau, clock.elapsed_ms()});
    record_point(out.trace, out.x, cfg.record_iterates, cfg.reference);
    if (residual <= cfg.tol && (gap <= cfg.tol || gap == kInf)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double duality_gap(const CompositeProblem& p, const Vector& x, const Vector& y) {
  if (!p.f_prox) throw ConfigError("duality_gap: problem has no prox-capable F");
  const LinearOperator a = p.a ? *p.a : LinearOperator::identity(x.size());
  const Vector ax = a.apply(x);
  const double primal = ext_add(value(*p.f_prox, x), value(p.g, ax));
  const double f_star = value(conjugate(*p.f_prox), Vector(-a.adjoint_apply(y)));
  const double g_star = value(conjugate(p.g), y);
  const double gap = ext_add(primal, ext_add(f_star, g_star));
  if (gap == kInf) return kInf;
  // Conjugate terms cancel against the primal value, so small negative
  // values are roundoff.
  return std::max(gap, 0.0);
}

double certified_duality_gap(const CompositeProblem& p, const Vector& x,
                             const Vector& y) {
  const double direct = duality_gap(p, x, y);
  if (direct < kInf) return direct;
  if (!(duality_gap(p, x, Vector::Zero(y.size())) < kInf)) return kInf;
  // Effective domains are convex and contain 0 here, so finiteness along
  // theta -> theta y is an interval [0, theta*].
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (duality_gap(p, x, Vector(mid * y)) < kInf)
      lo = mid;
    else
      hi = mid;
  }
  return duality_gap(p, x, Vector(lo * y));
}

double dr_as_pdhg_check(const ProxFunctional& f, const ProxFunctional& g,
                        const Vector& z0, double gamma, std::size_t iters) {
  if (!(gamma > 0.0)) throw ParameterError("dr_as_pdhg_check: gamma must be positive");
  const LinearOperator id = LinearOperator::identity(z0.size());
  Vector z = z0;
  Vector x = z0;
  Vector y = Vector::Zero(z0.size());
  double deviation = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    const Vector xd = prox(f, gamma, z);
    const Vector yd = prox(g, gamma, 2.0 * xd - z);
    z += yd - xd;
    primal_dual_step(f, g, id, gamma, 1.0 / gamma, x, y);
    deviation = std::max(deviation, (z - (x - gamma * y)).norm());
  }
  return deviation;
}

}  // namespace proxkit

#include "proxkit/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "proxkit/errors.hpp"
#include "proxkit/functionals.hpp"

namespace proxkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDivergenceFactor = 1e6;
constexpr double kInnerTol = 1e-13;
constexpr Eigen::Index kDenseLimit = 200;

bool is_symmetric(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double condition_estimate(const Matrix& m, bool symmetric) {
  if (m.rows() > kDenseLimit) return kNaN;
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    const auto abs_ev = eig.eigenvalues().cwiseAbs();
    return abs_ev.maxCoeff() / abs_ev.minCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

Vector dense_solve(const Matrix& m, const Vector& rhs) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible())
    throw NumericalError("Newton system is singular (rank " +
                         std::to_string(lu.rank()) + " of " +
                         std::to_string(m.rows()) + ")");
  return lu.solve(rhs);
}

Vector solve_block(const Matrix& m, const Vector& rhs, bool symmetric) {
  if (symmetric) {
    try {
      return solve_spd(LinearOperator(m), rhs, kInnerTol);
    } catch (const NumericalError&) {
      if (m.rows() > kDenseLimit) throw;
    }
  } else if (m.rows() > kDenseLimit) {
    throw NumericalError("nonsymmetric Newton block larger than the dense limit");
  }
  return dense_solve(m, rhs);
}

bool identity_rows_outside(const Matrix& m, const NewtonDerivativeMask& mask) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (mask.active[static_cast<std::size_t>(i)]) continue;
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      if (m(i, k) != (i == k ? 1.0 : 0.0)) return false;
  }
  return true;
}

// The identity rows of the Newton step compute x + (bound - x), which can miss
// the bound by an ulp. Coordinates whose projection argument lies outside the
// box are set to the projection output itself.
void snap_to_bounds(NewtonResult& r, const Vector& arg, const Vector& lo,
                    const Vector& hi) {
  for (Eigen::Index i = 0; i < r.x.size(); ++i) {
    if (arg[i] < lo[i]) r.x[i] = lo[i];
    else if (arg[i] > hi[i]) r.x[i] = hi[i];
  }
  if (!r.trace.iterates.empty()) r.trace.iterates.back() = r.x;
}

}  // namespace

NewtonDerivativeMask NewtonDerivativeMask::threshold(const Vector& arg,
                                                     double threshold) {
  NewtonDerivativeMask mask;
  mask.active.resize(static_cast<std::size_t>(arg.size()));
  for (Eigen::Index i = 0; i < arg.size(); ++i)
    mask.active[static_cast<std::size_t>(i)] = std::abs(arg[i]) >= threshold;
  return mask;
}

std::size_t NewtonDerivativeMask::count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

NewtonSolve solve_newton_system(const NewtonSystem& system) {
  const Matrix& m = system.matrix.matrix();
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DimensionError("Newton system matrix not square");
  require_dim(system.rhs, n, "Newton system rhs");

  if (system.partition) {
    const auto& mask = *system.partition;
    if (mask.active.size() != static_cast<std::size_t>(n))
      throw DimensionError("Newton partition size does not match the system");
    if (identity_rows_outside(m, mask)) {
      std::vector<Eigen::Index> inner_idx, fixed_idx;
      for (Eigen::Index i = 0; i < n; ++i)
        (mask.active[static_cast<std::size_t>(i)] ? inner_idx : fixed_idx)
            .push_back(i);
      Vector step(n);
      for (auto i : fixed_idx) step[i] = system.rhs[i];
      if (inner_idx.empty()) return {step, 1.0};

      const auto t = static_cast<Eigen::Index>(inner_idx.size());
      Matrix block(t, t);
      Vector rhs(t);
      for (Eigen::Index a = 0; a < t; ++a) {
        const auto i = inner_idx[static_cast<std::size_t>(a)];
        double r = system.rhs[i];
        for (auto j : fixed_idx) r -= m(i, j) * step[j];
        rhs[a] = r;
        for (Eigen::Index b = 0; b < t; ++b)
          block(a, b) = m(i, inner_idx[static_cast<std::size_t>(b)]);
      }
      const bool sym = is_symmetric(block);
      const Vector inner = solve_block(block, rhs, sym);
      for (Eigen::Index a = 0; a < t; ++a)
        step[inner_idx[static_cast<std::size_t>(a)]] = inner[a];
      return {step, condition_estimate(block, sym)};
    }
  }
  const bool sym = is_symmetric(m);
  return {solve_block(m, system.rhs, sym), condition_estimate(m, sym)};
}

NewtonResult ssn_solve(const ResidualFn& residual,
                       const NewtonDerivativeFn& derivative, const Vector& x0,
                       const SolverConfig& cfg,
                       const std::function<double(const Vector&)>& objective) {
  if (!(cfg.tol > 0.0)) throw ConfigError("ssn_solve: tol must be positive");
  auto objective_at = [&](const Vector& x) { return objective ? objective(x) : kNaN; };

  Stopwatch clock;
  NewtonResult out;
  out.x = x0;
  Vector r = residual(out.x);
  require_dim(r, x0.size(), "ssn_solve: residual");
  double rn = r.norm();
  const double r0 = rn;
  out.trace.rows.push_back({0, objective_at(out.x), rn, kNaN, kNaN, 0.0});
  record_point(out.trace, out.x, true, cfg.reference);

  for (std::size_t k = 1; k <= cfg.max_iter && rn > cfg.tol; ++k) {
    NewtonDerivative d = derivative(out.x);
    NewtonSolve solved;
    try {
      solved = solve_newton_system({std::move(d.matrix), -r, std::move(d.partition)});
    } catch (const NumericalError& e) {
      throw NumericalError("ssn_solve: iterate " + std::to_string(k - 1) + ": " +
                           e.what());
    }
    out.x += solved.step;
    r = residual(out.x);
    rn = r.norm();
    out.iterations = k;
    out.trace.condition.push_back(solved.condition);
    out.trace.rows.push_back({k, objective_at(out.x), rn, kNaN,
                              solved.step.norm(), clock.elapsed_ms()});
    record_point(out.trace, out.x, true, cfg.reference);
    if (!std::isfinite(rn) || rn > kDivergenceFactor * std::max(r0, cfg.tol)) {
      out.diverged = true;
      break;
    }
  }
  out.converged = !out.diverged && rn <= cfg.tol;
  return out;
}

Vector l1_residual(const SmoothTerm& f, double alpha, double gamma,
                   const Vector& x) {
  const Vector v = x - gamma * f.gradient(x);
  return x - prox(ProxFunctional::l1(), gamma * alpha, v);
}

NewtonDerivative l1_derivative(const SmoothTerm& f, double alpha, double gamma,
                               const Vector& x) {
  const Vector v = x - gamma * f.gradient(x);
  auto mask = NewtonDerivativeMask::threshold(v, gamma * alpha);
  const Matrix h = f.hessian(x);
  Matrix m = Matrix::Identity(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (mask.active[static_cast<std::size_t>(i)]) m.row(i) = gamma * h.row(i);
  return {LinearOperator(std::move(m)), std::move(mask)};
}

NewtonResult l1_ssn(const SmoothTerm& f, double alpha, double gamma,
                    const Vector& x0, const SolverConfig& cfg) {
  if (!(alpha > 0.0) || !(gamma > 0.0))
    throw ParameterError("l1_ssn: alpha and gamma must be positive");
  if (!f.hessian) throw ConfigError("l1_ssn: smooth term has no Hessian");
  return ssn_solve(
      [&](const Vector& x) { return l1_residual(f, alpha, gamma, x); },
      [&](const Vector& x) { return l1_derivative(f, alpha, gamma, x); }, x0,
      cfg, [&](const Vector& x) { return f.value(x) + alpha * x.lpNorm<1>(); });
}

Vector regularized_multiplier(const Vector& p, double gamma, double alpha) {
  return yosida(ProxFunctional::inf_ball(alpha), gamma, p);
}

double regularized_multiplier_slope(double t, double gamma, double alpha) {
  return std::abs(t) >= alpha ? 1.0 / gamma : 0.0;
}

NewtonResult moreau_yosida_ssn(const SmoothTerm& f, double gamma,
                               const Vector& x0, const SolverConfig& cfg,
                               double alpha) {
  if (!(alpha > 0.0) || !(gamma > 0.0))
    throw ParameterError("moreau_yosida_ssn: alpha and gamma must be positive");
  if (!f.hessian) throw ConfigError("moreau_yosida_ssn: smooth term has no Hessian");
  auto residual = [&](const Vector& u) -> Vector {
    return u - regularized_multiplier(Vector(-f.gradient(u)), gamma, alpha);
  };
  auto derivative = [&](const Vector& u) -> NewtonDerivative {
    auto mask = NewtonDerivativeMask::threshold(f.gradient(u), alpha);
    const Matrix h = f.hessian(u);
    Matrix m = Matrix::Identity(u.size(), u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
      if (mask.active[static_cast<std::size_t>(i)]) m.row(i) += h.row(i) / gamma;
    return {LinearOperator(std::move(m)), std::move(mask)};
  };
  return ssn_solve(residual, derivative, x0, cfg, [&](const Vector& u) {
    return f.value(u) + alpha * u.lpNorm<1>() + 0.5 * gamma * u.squaredNorm();
  });
}

std::vector<double> ContinuationSchedule::values() const {
  if (!(gamma0 > 0.0) || !(floor > 0.0) || !(factor > 0.0 && factor < 1.0))
    throw ParameterError(
        "continuation schedule needs gamma0 > 0, floor > 0, factor in (0,1)");
  std::vector<double> out;
  for (double g = gamma0; g >= floor * (1.0 - 1e-12); g *= factor) out.push_back(g);
  return out;
}

ContinuationResult continuation(const SmoothTerm& f,
                                const ContinuationSchedule& schedule,
                                const Vector& x0, const SolverConfig& cfg,
                                double alpha) {
  ContinuationResult out;
  out.x = x0;
  std::size_t offset = 0;
  double ms_offset = 0.0;
  for (double gamma : schedule.values()) {
    NewtonResult stage;
    try {
      stage = moreau_yosida_ssn(f, gamma, out.x, cfg, alpha);
    } catch (const NumericalError&) {
      out.failed_gamma = gamma;
      return out;
    }
    if (!stage.converged) {
      out.failed_gamma = gamma;
      return out;
    }
    for (auto row : stage.trace.rows) {
      row.iter += offset;
      row.ms += ms_offset;
      row.gamma = gamma;
      out.trace.rows.push_back(row);
    }
    offset += stage.iterations;
    ms_offset = out.trace.rows.back().ms;
    out.trace.condition.insert(out.trace.condition.end(),
                               stage.trace.condition.begin(),
                               stage.trace.condition.end());
    out.trace.iterates.insert(out.trace.iterates.end(),
                              stage.trace.iterates.begin(),
                              stage.trace.iterates.end());
    out.x = stage.x;
    out.gammas.push_back(gamma);
    out.stage_solutions.push_back(stage.x);
    out.stage_iterations.push_back(stage.iterations);
  }
  out.completed = true;
  return out;
}

NewtonResult control_ssn(const LinearOperator& s, const Vector& z, double alpha,
                         double lo, double hi, const Vector& u0,
                         const SolverConfig& cfg) {
  if (!(alpha > 0.0)) throw ParameterError("control_ssn: alpha must be positive");
  if (!(lo < hi)) throw ParameterError("control_ssn: need lo < hi");
  require_dim(z, s.rows(), "control_ssn: target");
  require_dim(u0, s.cols(), "control_ssn: initial control");

  const Matrix k = s.matrix().transpose() * s.matrix();
  const Vector stz = s.adjoint_apply(z);
  auto adjoint_state = [&](const Vector& u) -> Vector { return -(k * u - stz) / alpha; };

  auto residual = [&](const Vector& u) -> Vector {
    return u - adjoint_state(u).cwiseMax(lo).cwiseMin(hi);
  };
  auto derivative = [&](const Vector& u) -> NewtonDerivative {
    const Vector p = adjoint_state(u);
    NewtonDerivativeMask mask;
    mask.active.resize(static_cast<std::size_t>(u.size()));
    Matrix m = Matrix::Identity(u.size(), u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const bool free = p[i] >= lo && p[i] <= hi;
      mask.active[static_cast<std::size_t>(i)] = free;
      if (free) m.row(i) += k.row(i) / alpha;
    }
    return {LinearOperator(std::move(m)), std::move(mask)};
  };
  NewtonResult out = ssn_solve(residual, derivative, u0, cfg, [&](const Vector& u) {
    return 0.5 * (s.apply(u) - z).squaredNorm() + 0.5 * alpha * u.squaredNorm();
  });
  snap_to_bounds(out, adjoint_state(out.x), Vector::Constant(u0.size(), lo),
                 Vector::Constant(u0.size(), hi));
  return out;
}

NewtonResult box_ssn(const SmoothTerm& f, const Vector& lo, const Vector& hi,
                     double gamma, const Vector& x0, const SolverConfig& cfg) {
  if (!(gamma > 0.0)) throw ParameterError("box_ssn: gamma must be positive");
  if (!f.hessian) throw ConfigError("box_ssn: smooth term has no Hessian");
  require_dim(lo, x0.size(), "box_ssn: lower bound");
  require_dim(hi, x0.size(), "box_ssn: upper bound");
  auto residual = [&](const Vector& x) -> Vector {
    return x - (x - gamma * f.gradient(x)).cwiseMax(lo).cwiseMin(hi);
  };
  auto derivative = [&](const Vector& x) -> NewtonDerivative {
    const Vector v = x - gamma * f.gradient(x);
    const Matrix h = f.hessian(x);
    NewtonDerivativeMask mask;
    mask.active.resize(static_cast<std::size_t>(x.size()));
    Matrix m = Matrix::Identity(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const bool free = v[i] >= lo[i] && v[i] <= hi[i];
      mask.active[static_cast<std::size_t>(i)] = free;
      if (free) m.row(i) = gamma * h.row(i);
    }
    return {LinearOperator(std::move(m)), std::move(mask)};
  };
  const auto box = ProxFunctional::box(lo, hi);
  NewtonResult out = ssn_solve(residual, derivative, x0, cfg, [&](const Vector& x) {
    return ext_add(f.value(x), value(box, x));
  });
  snap_to_bounds(out, out.x - gamma * f.gradient(out.x), lo, hi);
  return out;
}

SuperlinearDiagnostic superlinear_diagnostic(const IterTrace& trace,
                                             const Vector& x_ref) {
  SuperlinearDiagnostic out;
  const auto& xs = trace.iterates;
  if (xs.size() < 2) return out;
  const double floor =
      1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, x_ref.norm());
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double e = (xs[k] - x_ref).norm();
    if (e < floor) break;
    const double e_next = (xs[k + 1] - x_ref).norm();
    out.ratios.push_back(e_next / e);
    if (e_next < floor) break;
  }
  out.available = !out.ratios.empty();
  return out;
}

}  // namespace proxkit

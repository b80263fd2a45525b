#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>


#include "cli.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/newton.hpp"
#include "proxkit/random.hpp"

namespace proxkit::cli {

namespace {

constexpr Eigen::Index kDim = 5;

struct Entry {
  std::string label;
  ProxFunctional f;
};

std::vector<Entry> catalog(Rng& rng) {
  Vector lo(kDim), hi(kDim);
  lo << -1.0, -0.5, 0.0, -2.0, -1.0;
  hi << 1.0, 2.0, 0.5, -1.0, 3.0;
  const Matrix m = rng.normal_matrix(kDim, kDim);
  const Matrix q = m.transpose() * m / kDim + 0.5 * Matrix::Identity(kDim, kDim);
  const Vector c = rng.normal_vector(kDim);
  return {
      {"squared_l2", ProxFunctional::squared_l2()},
      {"l1", ProxFunctional::l1()},
      {"l2_norm", ProxFunctional::l2_norm()},
      {"zero", ProxFunctional::zero()},
      {"box", ProxFunctional::box(lo, hi)},
      {"box_support", ProxFunctional::box_support(lo, hi)},
      {"inf_ball", ProxFunctional::inf_ball(0.7)},
      {"l2_ball", ProxFunctional::l2_ball(1.3)},
      {"quadratic", ProxFunctional::quadratic(0.5 * (q + q.transpose()), c, 0.3)},
      {"scaled_l1", ProxFunctional::scaled(2.5, ProxFunctional::l1())},
      {"scaled_squared_l2", ProxFunctional::scaled(0.4, ProxFunctional::squared_l2())},
      {"shifted_l1", ProxFunctional::shifted(c, ProxFunctional::l1())},
      {"tilted_l2_norm", ProxFunctional::tilted(c, ProxFunctional::l2_norm())},
      {"separable",
       ProxFunctional::separable({ProxFunctional::l1(), ProxFunctional::box(0.0, 1.0),
                                  ProxFunctional::squared_l2(),
                                  ProxFunctional::scaled(3.0, ProxFunctional::l1()),
                                  ProxFunctional::inf_ball(0.2)})},
  };
}

std::vector<CheckLine> check_moreau(const CheckOptions& o) {
  Rng rng(o.seed);
  std::vector<CheckLine> lines;
  for (const auto& e : catalog(rng)) {
    const ProxFunctional conj = conjugate(e.f);
    double worst = 0.0;
    for (std::size_t t = 0; t < o.trials; ++t) {
      const Vector x = 3.0 * rng.normal_vector(kDim);
      const Vector err = x - prox(e.f, 1.0, x) - prox(conj, 1.0, x);
      worst = std::max(worst, err.lpNorm<Eigen::Infinity>());
    }
    lines.push_back({"moreau decomposition " + e.label, worst, 1e-12, worst <= 1e-12, ""});
  }
  return lines;
}

std::vector<CheckLine> check_envelope(const CheckOptions& o) {
  Rng rng(o.seed);
  std::vector<CheckLine> lines;
  const auto entries = catalog(rng);
  for (double gamma : {0.1, 1.0, 10.0}) {
    for (const auto& e : entries) {
      double worst = 0.0;
      for (std::size_t t = 0; t < o.trials; ++t) {
        Vector x = 3.0 * rng.normal_vector(kDim);
        const Vector g = yosida(e.f, gamma, x);
        Vector fd(kDim);
        for (Eigen::Index i = 0; i < kDim; ++i) {
          const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
          const double xi = x[i];
          x[i] = xi + h;
          const double up = moreau_envelope(e.f, gamma, x);
          x[i] = xi - h;
          const double down = moreau_envelope(e.f, gamma, x);
          x[i] = xi;
          fd[i] = (up - down) / (2.0 * h);
        }
        const double rel =
            (fd - g).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, rel);
      }
      char label[96];
      std::snprintf(label, sizeof(label), "envelope gradient %s gamma=%g", e.label.c_str(),
                    gamma);
      lines.push_back({label, worst, 1e-5, worst <= 1e-5, ""});
    }
  }
  return lines;
}

ProblemSpec problem_or_default(const CheckOptions& o) {
  return o.problem ? *o.problem : gen_lasso(40, 20, 0.5, o.seed);
}

std::vector<CheckLine> check_rate(const CheckOptions& o) {
  const ProblemSpec spec = problem_or_default(o);
  const CompositeProblem p = smooth_form(spec);
  const Vector x0 = Vector::Zero(spec.n());

  SolverConfig ref_cfg;
  ref_cfg.max_iter = o.ref_iter;
  ref_cfg.tol = 1e-300;
  const SolveResult ref = fista(p, x0, ref_cfg);
  const double j_star = p.objective(ref.x);
  const double dist2 = (x0 - ref.x).squaredNorm();

  SolverConfig cfg;
  cfg.max_iter = 500;
  cfg.tol = 1e-300;
  const double gamma = 1.0 / *p.smooth->lipschitz;
  cfg.gamma = gamma;
  const SolveResult run = prox_gradient(p, x0, cfg);
  double worst = 0.0;
  std::size_t violations = 0;
  for (const auto& row : run.trace.rows) {
    if (row.iter == 0) continue;
    const double k = static_cast<double>(row.iter);
    const double excess = row.objective - j_star;
    const double bound = dist2 / (2.0 * k * gamma);
    if (excess > bound + 1e-12) ++violations;
    if (dist2 > 0.0) worst = std::max(worst, k * excess * 2.0 * gamma / dist2);
  }
  return {{"k (J(x^k) - J*) 2 gamma / ||x0 - x*||^2", worst, 1.0, violations == 0,
           std::to_string(violations) + " violations over " +
               std::to_string(run.trace.rows.size() - 1) + " iterates"}};
}

std::vector<CheckLine> check_superlinear(const CheckOptions& o) {
  const ProblemSpec spec = problem_or_default(o);
  const CompositeProblem p = smooth_form(spec);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 50;
  const Vector x0 = Vector::Zero(spec.n());
  const double gamma = default_ssn_gamma(spec);
  NewtonResult r;
  if (const auto* l = std::get_if<LassoSpec>(&spec.kind))
    r = l1_ssn(*p.smooth, l->alpha, gamma, x0, cfg);
  else if (const auto* b = std::get_if<BoxQPSpec>(&spec.kind))
    r = box_ssn(*p.smooth, b->lo, b->hi, gamma, x0, cfg);
  else if (const auto* c = std::get_if<ControlSpec>(&spec.kind)) {
    const BoxQPSpec q = as_boxqp(*c);
    r = box_ssn(*p.smooth, q.lo, q.hi, gamma, x0, cfg);
  } else {
    throw ConfigError("check superlinear needs a lasso, boxqp or control problem");
  }
  const auto diag = superlinear_diagnostic(r.trace, r.x);
  std::vector<CheckLine> lines;
  if (!diag.available) {
    lines.push_back({"last error ratio", 0.0, 0.1, r.converged,
                     "no usable ratio: converged at the start point"});
  } else {
    const double last = diag.ratios.back();
    lines.push_back({"last error ratio", last, 0.1, last <= 0.1,
                     "final ratio " + std::to_string(last)});
  }
  lines.push_back({"ssn iterations", static_cast<double>(r.iterations), 15.0,
                   r.converged && r.iterations <= 15, ""});
  return lines;
}

double max_increase(const std::vector<double>& d) {
  double worst = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) worst = std::max(worst, d[k] - d[k - 1]);
  return worst;
}

std::vector<CheckLine> check_fejer(const CheckOptions& o) {
  const ProblemSpec spec = problem_or_default(o);
  const CompositeProblem p = smooth_form(spec);
  const Vector x0 = Vector::Zero(spec.n());
  std::vector<CheckLine> lines;

  // References come from the same solver run 10x longer at 1e-3 x tolerance.
  SolverConfig cfg;
  cfg.max_iter = 2000;
  cfg.tol = 1e-9;
  cfg.gamma = 1.0 / *p.smooth->lipschitz;
  SolverConfig ref = cfg;
  ref.max_iter *= 10;
  ref.tol *= 1e-3;
  cfg.reference = prox_gradient(p, x0, ref).x;
  const double pg = max_increase(prox_gradient(p, x0, cfg).trace.fejer);
  lines.push_back({"prox_gradient distance increase", pg, 1e-12, pg <= 1e-12, ""});

  // Proximal point on the strongly convex quadratic part of the objective.
  const Matrix h = p.smooth->hessian(x0);
  const Matrix reg = h + 0.1 * Matrix::Identity(h.rows(), h.cols());
  const auto quad = ProxFunctional::quadratic(0.5 * (reg + reg.transpose()),
                                              -p.smooth->gradient(x0));
  SolverConfig pp;
  pp.max_iter = 2000;
  pp.tol = 1e-9;
  pp.gamma = 1.0;
  SolverConfig pp_ref = pp;
  pp_ref.max_iter *= 10;
  pp_ref.tol *= 1e-3;
  pp.reference = proximal_point(quad, x0, pp_ref).x;
  const double ppd = max_increase(proximal_point(quad, x0, pp).trace.fejer);
  lines.push_back({"proximal_point distance increase", ppd, 1e-12, ppd <= 1e-12, ""});
  return lines;
}

}  // namespace

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names{"moreau", "envelope", "rate",
                                              "superlinear", "fejer"};
  return names;
}

std::vector<CheckLine> run_check(const std::string& suite, const CheckOptions& opts) {
  if (suite == "moreau") return check_moreau(opts);
  if (suite == "envelope") return check_envelope(opts);
  if (suite == "rate") return check_rate(opts);
  if (suite == "superlinear") return check_superlinear(opts);
  if (suite == "fejer") return check_fejer(opts);
  throw ConfigError("unknown check suite '" + suite + "'");
}

}  // namespace proxkit::cli

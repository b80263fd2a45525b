// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/newton.hpp"
#include "proxkit/problems.hpp"
#include "proxkit/random.hpp"
#include "proxkit/splitting.hpp"

using namespace proxkit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

SolverConfig config(std::size_t max_iter, double tol) {
  SolverConfig c;
  c.max_iter = max_iter;
  c.tol = tol;
  return c;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Small lasso instances shared by several criteria: N = 1..8, m = 2N.
std::vector<ProblemSpec> small_lassos() {
  std::vector<ProblemSpec> out;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 8);
    out.push_back(gen_lasso(2 * n, n, 0.5, 1000 + seed));
  }
  return out;
}

// N = 50 instances for the rate and acceleration criteria, with a long FISTA
// run as the reference minimizer.
struct RateInstance {
  ProblemSpec spec;
  Vector x_star;
  double j_star;
};

const std::vector<RateInstance>& rate_instances() {
  static const std::vector<RateInstance> cache = [] {
    std::vector<RateInstance> out;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ProblemSpec spec = gen_lasso(30, 50, 0.5, 2000 + seed);
      const CompositeProblem p = smooth_form(spec);
      const Vector x = fista(p, Vector::Zero(50), config(100000, 1e-300)).x;
      out.push_back({spec, x, p.objective(x)});
    }
    return out;
  }();
  return cache;
}

Outcome prox_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  double worst = 0.0;
  std::string worst_kind;
  for (const auto& s : oracle::scalar_catalog()) {
    for (int t = 0; t < 200; ++t) {
      const double gamma = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
      const double x = rng.uniform(-10, 10);
      const double err = std::abs(prox(s.f, gamma, Vector::Constant(1, x))[0] -
                                  oracle::scalar_prox(s, gamma, x));
      if (err > worst) {
        worst = err;
        worst_kind = s.label;
      }
    }
  }
  const double secs = elapsed_s(t0);
  return {worst <= 1e-8 && secs < 5.0,
          fmt("worst %.2e", worst) + " (" + worst_kind + ")" + fmt(", %.2f s", secs)};
}

Outcome moreau_decomposition() {
  Rng rng(2);
  double worst = 0.0;
  std::size_t entries = 0;
  for (Eigen::Index n : {1, 5, 12}) {
    for (const auto& [label, f] : oracle::vector_catalog(rng, n)) {
      const ProxFunctional conj = conjugate(f);
      for (int t = 0; t < 100; ++t) {
        const Vector x = 3.0 * rng.normal_vector(n);
        const Vector px = prox(f, 1.0, x);
        worst = std::max(worst, (px + prox(conj, 1.0, x) - x).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (px + prox_conjugate(f, 1.0, x) - x).lpNorm<Eigen::Infinity>());
      }
      ++entries;
    }
  }
  return {worst <= 1e-12, fmt("worst %.2e over ", worst) + std::to_string(entries) + " entries"};
}

Outcome envelope_gradient() {
  Rng rng(3);
  double worst = 0.0;
  const Eigen::Index n = 5;
  const auto catalog = oracle::vector_catalog(rng, n);
  for (double gamma : {0.1, 1.0, 10.0}) {
    for (const auto& [label, f] : catalog) {
      for (int t = 0; t < 100; ++t) {
        Vector x = 3.0 * rng.normal_vector(n);
        const Vector g = yosida(f, gamma, x);
        Vector fd(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
          const double xi = x[i];
          x[i] = xi + h;
          const double up = moreau_envelope(f, gamma, x);
          x[i] = xi - h;
          const double down = moreau_envelope(f, gamma, x);
          x[i] = xi;
          fd[i] = (up - down) / (2 * h);
        }
        worst = std::max(worst, (fd - g).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, g.lpNorm<Eigen::Infinity>()));
      }
    }
  }
  return {worst <= 1e-5, fmt("worst relative error %.2e", worst)};
}

Outcome rate_certificate() {
  std::size_t violations = 0, checked = 0;
  double worst_ratio = 0.0;
  for (const auto& inst : rate_instances()) {
    const CompositeProblem p = smooth_form(inst.spec);
    const double gamma = 1.0 / *p.smooth->lipschitz;
    SolverConfig cfg = config(500, 1e-300);
    cfg.gamma = gamma;
    const auto run = prox_gradient(p, Vector::Zero(50), cfg);
    const double d2 = inst.x_star.squaredNorm();
    for (const auto& row : run.trace.rows) {
      if (row.iter == 0) continue;
      const double k = static_cast<double>(row.iter);
      const double excess = row.objective - inst.j_star;
      if (excess > d2 / (2 * k * gamma) + 1e-12) ++violations;
      worst_ratio = std::max(worst_ratio, 2 * k * gamma * excess / d2);
      ++checked;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " +
                               std::to_string(checked) + " iterates" +
                               fmt(", max k(J-J*)2gamma/d^2 = %.3f", worst_ratio)};
}

Outcome fista_dominance() {
  int wins = 0;
  double worst_tau = 0.0;
  for (const auto& inst : rate_instances()) {
    const CompositeProblem p = smooth_form(inst.spec);
    const auto pg = prox_gradient(p, Vector::Zero(50), config(200, 1e-300));
    const auto fa = fista(p, Vector::Zero(50), config(200, 1e-300));
    if (p.objective(fa.x) - inst.j_star <= p.objective(pg.x) - inst.j_star) ++wins;
    const auto& tau = fa.trace.tau;
    for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
      const double t = tau[k + 1];
      worst_tau = std::max(worst_tau, std::abs(t * t - t - tau[k] * tau[k]) / std::max(1.0, t * t));
    }
  }
  return {wins >= 9 && worst_tau <= 1e-12,
          std::to_string(wins) + "/10 instances" + fmt(", tau identity %.1e", worst_tau)};
}

Outcome cross_solver() {
  const auto t0 = std::chrono::steady_clock::now();
  const SolverConfig cfg = config(200000, 1e-10);
  double worst = 0.0;
  std::string worst_solver;
  std::size_t failures = 0;
  std::string first_failure;
  for (const auto& spec : small_lassos()) {
    const double j = oracle_lasso(spec).objective;
    for (const std::string solver : {"pg", "fista", "dr", "pdhg", "ssn"}) {
      try {
        const auto r = cli::run_solver(spec, solver, cfg);
        const double err = std::abs(objective(spec, r.x) - j);
        if (err > worst) {
          worst = err;
          worst_solver = solver;
        }
      } catch (const std::exception& e) {
        if (failures++ == 0) first_failure = solver + ": " + e.what();
      }
    }
  }
  const double secs = elapsed_s(t0);
  return {worst <= 1e-6 && failures == 0 && secs < 30.0,
          fmt("worst objective error %.2e", worst) + " (" + worst_solver + "), " +
              std::to_string(failures) + " failures" + fmt(", %.2f s", secs) +
              (first_failure.empty() ? "" : "; first: " + first_failure)};
}

Outcome step_gate() {
  std::size_t rejected_ok = 0, rejected_total = 0, converged = 0, runs = 0;
  double worst_gap = 0.0;
  for (const auto& spec : small_lassos()) {
    const CompositeProblem p = split_form(spec);
    const double norm_a = op_norm(*p.a).value;
    const Vector x0 = Vector::Zero(spec.n());
    const Vector y0 = Vector::Zero(p.a->rows());
    for (double target : {1.0, 1.0001, 1.44, 4.0}) {
      SolverConfig cfg = config(10, 1e-9);
      cfg.tau = 2.0 * std::sqrt(target) / norm_a;
      cfg.sigma = 0.5 * std::sqrt(target) / norm_a;
      const double product = cfg.sigma * cfg.tau * norm_a * norm_a;
      ++rejected_total;
      try {
        primal_dual(p, x0, y0, cfg);
      } catch (const ConfigError& e) {
        if (std::string(e.what()).find(fmt("%.6g", product)) != std::string::npos) ++rejected_ok;
      }
    }
    for (double target : {0.5, 0.9, 0.99}) {
      for (double skew : {1.0, 3.0}) {
        SolverConfig cfg = config(1000000, 1e-10);
        cfg.tau = skew * std::sqrt(target) / norm_a;
        cfg.sigma = std::sqrt(target) / (skew * norm_a);
        const auto r = primal_dual(p, x0, y0, cfg);
        const double gap = certified_duality_gap(p, r.x, r.y);
        worst_gap = std::max(worst_gap, gap);
        if (r.converged && gap <= 1e-8) ++converged;
        ++runs;
      }
    }
  }
  return {rejected_ok == rejected_total && converged == runs,
          std::to_string(rejected_ok) + "/" + std::to_string(rejected_total) +
              " rejections quote the product, " + std::to_string(converged) + "/" +
              std::to_string(runs) + fmt(" runs certified, worst gap %.2e", worst_gap)};
}

Outcome dr_identification() {
  Rng rng(8);
  const auto catalog = oracle::vector_catalog(rng, 6);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto& f = catalog[rng.next_u64() % catalog.size()].second;
    const auto& g = catalog[rng.next_u64() % catalog.size()].second;
    const double gamma = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    worst = std::max(worst, dr_as_pdhg_check(f, g, 3.0 * rng.normal_vector(6), gamma, 50));
  }
  return {worst <= 1e-10, fmt("max deviation %.2e", worst)};
}

Outcome superlinear() {
  double worst_ratio = 0.0;
  std::size_t max_iters = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(seed % 4) * 10;
    const ProblemSpec spec = gen_lasso(2 * n, n, 0.5, 3000 + seed);
    const CompositeProblem p = smooth_form(spec);
    const auto r = l1_ssn(*p.smooth, 0.5, cli::default_ssn_gamma(spec), Vector::Zero(n),
                          config(50, 1e-12));
    const Vector ref = fista(p, Vector::Zero(n), config(100000, 1e-15)).x;
    const auto d = superlinear_diagnostic(r.trace, ref);
    max_iters = std::max(max_iters, r.iterations);
    if (!r.converged || !d.available || r.iterations > 15) {
      ++failures;
      continue;
    }
    worst_ratio = std::max(worst_ratio, d.ratios.back());
  }

  // Negative control: gradient descent on diag(1, ..., 10, ...) with step 2/11.
  IterTrace gd;
  Vector scale(10);
  scale << 1, 1, 1, 1, 1, 10, 10, 10, 10, 10;
  Vector x = Vector::Ones(10);
  for (int k = 0; k < 60; ++k) {
    gd.iterates.push_back(x);
    x -= (2.0 / 11.0) * scale.cwiseProduct(x);
  }
  const auto control = superlinear_diagnostic(gd, Vector::Zero(10));
  double control_min = control.available ? 1.0 : 0.0;
  for (double r : control.ratios) control_min = std::min(control_min, r);

  return {failures == 0 && worst_ratio <= 0.1 && control_min >= 0.5,
          fmt("worst last ratio %.2e", worst_ratio) + ", max " + std::to_string(max_iters) +
              " iterations, " + std::to_string(failures) + " failures" +
              fmt(", control min ratio %.4f", control_min)};
}

Outcome continuation_consistency() {
  double worst_increase = 0.0, worst_final = 0.0;
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(4000 + seed);
    const Eigen::Index n = 10;
    const Matrix m = rng.normal_matrix(n, n);
    Matrix h = m.transpose() * m / 10.0 + 20.0 * Matrix::Identity(n, n);
    h = 0.5 * (h + h.transpose());
    Vector u(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i % 3 == 0) {
        u[i] = 0.0;
        s[i] = rng.uniform(-0.8, 0.8);
      } else {
        u[i] = rng.uniform(0.1, 0.5) * (rng.uniform() < 0.5 ? -1 : 1);
        s[i] = u[i] > 0 ? 1.0 : -1.0;
      }
    }
    const SmoothTerm f = quadratic_term(h, -(h * u + s));
    const auto ref = l1_ssn(f, 1.0, 1.0 / *f.lipschitz, Vector::Zero(n), config(50, 1e-12));
    const auto run = continuation(f, ContinuationSchedule{1.0, 0.5, std::ldexp(1.0, -10)},
                                  Vector::Zero(n), config(50, 1e-10));
    if (!ref.converged || !run.completed || run.stage_solutions.size() != 11) {
      ++failures;
      continue;
    }
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& sol : run.stage_solutions) {
      const double d = (sol - ref.x).norm();
      if (std::isfinite(prev)) worst_increase = std::max(worst_increase, d - prev);
      prev = d;
    }
    worst_final = std::max(worst_final, prev);
  }
  return {failures == 0 && worst_increase <= 1e-12 && worst_final <= 1e-4,
          fmt("worst final distance %.2e", worst_final) +
              fmt(", worst increase %.1e, ", worst_increase) + std::to_string(failures) +
              " failures"};
}

Outcome control_problem() {
  double worst = 0.0;
  std::size_t failures = 0, active = 0, exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 8);
    const ProblemSpec spec = gen_control(n, 2.0, -1.0, 1.0, 5000 + seed);
    const auto& c = std::get<ControlSpec>(spec.kind);
    const auto r = control_ssn(LinearOperator(c.s), c.z, c.alpha, c.lo, c.hi, Vector::Zero(n),
                               config(50, 1e-12));
    if (!r.converged) {
      ++failures;
      continue;
    }
    const auto o = oracle_boxqp(spec);
    worst = std::max(worst, (r.x - o.x).lpNorm<Eigen::Infinity>());
    const Vector p = -(c.s.transpose() * (c.s * r.x - c.z)) / c.alpha;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (o.pattern[i] == 0 || o.multiplier[i] <= 1e-10) continue;
      ++active;
      const double proj = std::clamp(p[i], c.lo, c.hi);
      const double bound = o.pattern[i] < 0 ? c.lo : c.hi;
      if (r.x[i] == proj && r.x[i] == bound) ++exact;
    }
  }
  return {failures == 0 && worst <= 1e-8 && exact == active,
          fmt("worst deviation %.2e", worst) + ", " + std::to_string(exact) + "/" +
              std::to_string(active) + " active coordinates exact, " + std::to_string(failures) +
              " failures"};
}

double max_increase(const std::vector<double>& d) {
  double worst = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) worst = std::max(worst, d[k] - d[k - 1]);
  return worst;
}

Outcome fejer() {
  constexpr std::size_t kIter = 20000;
  constexpr double kTol = 1e-9;
  double worst_pg = 0.0, worst_pp = 0.0;
  std::size_t instances = 0;
  std::vector<ProblemSpec> specs = small_lassos();
  for (const auto& inst : rate_instances()) specs.push_back(inst.spec);
  for (const auto& spec : specs) {
    const CompositeProblem p = smooth_form(spec);
    const Vector x0 = Vector::Zero(spec.n());
    SolverConfig cfg = config(kIter, kTol);
    cfg.gamma = 1.0 / *p.smooth->lipschitz;
    SolverConfig ref_cfg = config(10 * kIter, 1e-3 * kTol);
    ref_cfg.gamma = cfg.gamma;
    cfg.reference = prox_gradient(p, x0, ref_cfg).x;
    worst_pg = std::max(worst_pg, max_increase(prox_gradient(p, x0, cfg).trace.fejer));

    // Proximal point on the quadratic data term.
    const ProxFunctional g = dr_pair(spec).second;
    SolverConfig pp = config(kIter, kTol);
    pp.gamma = 1.0;
    SolverConfig pp_ref = config(10 * kIter, 1e-3 * kTol);
    pp_ref.gamma = 1.0;
    pp.reference = proximal_point(g, x0, pp_ref).x;
    worst_pp = std::max(worst_pp, max_increase(proximal_point(g, x0, pp).trace.fejer));
    ++instances;
  }
  return {worst_pg <= 1e-12 && worst_pp <= 1e-12,
          fmt("worst increase prox_gradient %.1e", worst_pg) +
              fmt(", proximal_point %.1e over ", worst_pp) + std::to_string(instances) +
              " instances"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"prox matches golden-section minimization", prox_oracle},
      {"Moreau decomposition", moreau_decomposition},
      {"envelope gradient equals Yosida approximation", envelope_gradient},
      {"O(1/k) rate certificate for prox_gradient", rate_certificate},
      {"FISTA dominance and tau recursion", fista_dominance},
      {"cross-solver agreement with enumeration oracle", cross_solver},
      {"primal-dual step rule gate", step_gate},
      {"Douglas-Rachford as primal-dual", dr_identification},
      {"semismooth Newton superlinearity", superlinear},
      {"Moreau-Yosida continuation consistency", continuation_consistency},
      {"control problem against box oracle", control_problem},
      {"Fejer monotonicity", fejer},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%-4s %2zu %-48s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), elapsed_s(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "proxkit/errors.hpp"
#include "proxkit/newton.hpp"

namespace proxkit::cli {

namespace fs = std::filesystem;

namespace {

SmoothTerm smooth_of(const ProblemSpec& spec) { return *smooth_form(spec).smooth; }

RunOutcome from(SolveResult r) {
  return {std::move(r.x), std::move(r.trace), r.converged, r.iterations, {}, {}};
}

RunOutcome from(NewtonResult r) {
  return {std::move(r.x), std::move(r.trace), r.converged, r.iterations, {}, {}};
}

const LassoSpec& need_lasso(const ProblemSpec& spec, const std::string& solver) {
  const auto* p = std::get_if<LassoSpec>(&spec.kind);
  if (!p)
    throw ConfigError("solver '" + solver + "' needs a lasso problem, got " +
                      spec.kind_name());
  return *p;
}

ProblemSpec read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("problem file '" + path + "' is not valid JSON: " + e.what());
  }
  return problem_from_json(j);
}

nlohmann::json read_config(const std::string& text) {
  try {
    if (fs::exists(text)) {
      std::ifstream in(text);
      nlohmann::json j;
      in >> j;
      return j;
    }
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("--config is neither a JSON file nor JSON: ") +
                      e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Writes into a sibling temporary directory and renames it into place. An
// existing target is only replaced if it holds a previous run.
void publish_run_dir(const fs::path& target,
                     const std::vector<std::pair<std::string, std::string>>& files) {
  if (fs::exists(target)) {
    if (!fs::is_directory(target) ||
        (!fs::is_empty(target) && !fs::exists(target / "manifest.json")))
      throw ConfigError("output path '" + target.string() +
                        "' exists and is not a previous run directory");
  }
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(parent);
  std::random_device rd;
  fs::path tmp;
  do {
    std::ostringstream name;
    name << '.' << target.filename().string() << ".tmp-" << std::hex << rd();
    tmp = parent / name.str();
  } while (fs::exists(tmp));
  fs::create_directory(tmp);
  try {
    for (const auto& [name, text] : files) write_text(tmp / name, text);
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

struct Common {
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_out) {
  app->add_option("--seed", c.seed, "random seed")->envname("PROXKIT_SEED");
  app->add_option("--tol", c.tol, "stopping tolerance")
      ->envname("PROXKIT_TOL")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iter", c.max_iter, "iteration limit")
      ->envname("PROXKIT_MAX_ITER")
      ->check(CLI::PositiveNumber);
  if (with_out) app->add_option("--out", c.out, "output path")->envname("PROXKIT_OUT");
}

// gen ----------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  long n = 10;
  long m = 0;
  double alpha = 0.5;
  double gamma = 0.1;
  double lo = -1.0;
  double hi = 1.0;
  Common common;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 1 || a.m < 0) throw ParameterError("gen: --n must be >= 1 and --m >= 1");
  ProblemSpec spec;
  const auto seed = a.common.seed;
  if (a.kind == "lasso")
    spec = gen_lasso(a.m > 0 ? a.m : a.n, a.n, a.alpha, seed);
  else if (a.kind == "boxqp")
    spec = gen_boxqp(a.n, seed, a.lo, a.hi);
  else if (a.kind == "huber")
    spec = gen_huber(a.n, a.gamma, a.alpha, seed);
  else
    spec = gen_control(a.n, a.alpha, a.lo, a.hi, seed);

  const std::string text = to_json(spec).dump(1) + "\n";
  std::ostream& report = a.common.out.empty() ? err : out;
  if (a.common.out.empty()) {
    out << text;
  } else {
    const fs::path path(a.common.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text(path, text);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s n=%ld%s seed=%llu condition=%.6g\n",
                spec.kind_name().c_str(), static_cast<long>(spec.n()),
                a.kind == "lasso"
                    ? (" m=" + std::to_string(a.m > 0 ? a.m : a.n)).c_str()
                    : "",
                static_cast<unsigned long long>(seed), condition_estimate(spec));
  report << buf;
  return kExitOk;
}

// solve --------------------------------------------------------------------

struct SolveArgs {
  std::string problem;
  std::string solver;
  std::optional<double> gamma;
  double tau = 0.0;
  double sigma = 0.0;
  bool line_search = false;
  std::string config;
  Common common;
};

SolverConfig build_config(const SolveArgs& a, const CLI::App& app) {
  SolverConfig cfg;
  cfg.tol = a.common.tol;
  cfg.max_iter = a.common.max_iter;
  cfg.seed = a.common.seed;
  if (!a.config.empty()) {
    cfg = config_from_json(read_config(a.config), cfg);
    // Flags given on the command line (or through the environment) win over
    // the config blob.
    if (app.get_option("--tol")->count() > 0) cfg.tol = a.common.tol;
    if (app.get_option("--max-iter")->count() > 0) cfg.max_iter = a.common.max_iter;
    if (app.get_option("--seed")->count() > 0) cfg.seed = a.common.seed;
  }
  if (a.gamma) cfg.gamma = a.gamma;
  if (app.get_option("--tau")->count() > 0) cfg.tau = a.tau;
  if (app.get_option("--sigma")->count() > 0) cfg.sigma = a.sigma;
  if (a.line_search) cfg.line_search = true;
  return cfg;
}

std::string trace_csv(const IterTrace& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

int cmd_solve(const SolveArgs& a, const CLI::App& app, std::ostream& out,
              std::ostream& err) {
  const SolverConfig cfg = build_config(a, app);
  const ProblemSpec spec = read_problem(a.problem);
  const std::string out_dir = a.common.out.empty() ? std::string("run") : a.common.out;

  RunOutcome r;
  try {
    r = run_solver(spec, a.solver, cfg);
  } catch (const NumericalError& e) {
    err << "solve: numerical failure: " << e.what() << "\n";
    return kExitFailure;
  }

  nlohmann::json solution;
  solution["solver"] = a.solver;
  solution["problem_kind"] = spec.kind_name();
  solution["converged"] = r.converged;
  solution["iterations"] = r.iterations;
  solution["x"] = to_json(r.x);
  const double obj = objective(spec, r.x);
  solution["objective"] = std::isfinite(obj) ? nlohmann::json(obj) : nlohmann::json("inf");
  const double kkt = kkt_residual(spec, r.x);
  solution["kkt_residual"] =
      std::isfinite(kkt) ? nlohmann::json(kkt) : nlohmann::json("inf");
  if (r.dual) solution["y"] = to_json(*r.dual);
  if (!r.gammas.empty()) solution["gammas"] = r.gammas;

  nlohmann::json manifest;
  manifest["problem"] = fs::absolute(a.problem).string();
  manifest["solver"] = a.solver;
  manifest["config"] = to_json(cfg);
  manifest["output_dir"] = fs::absolute(out_dir).string();
  manifest["seed"] = cfg.seed;

  publish_run_dir(out_dir, {{"trace.csv", trace_csv(r.trace)},
                            {"solution.json", solution.dump(1) + "\n"},
                            {"manifest.json", manifest.dump(1) + "\n"}});
  out << a.solver << ": " << (r.converged ? "converged" : "not converged") << " after "
      << r.iterations << " iterations, objective " << std::setprecision(12) << obj
      << " -> " << out_dir << "\n";
  return r.converged ? kExitOk : kExitUnconverged;
}

// check --------------------------------------------------------------------

struct CheckArgs {
  std::string suite;
  std::size_t trials = 100;
  std::string problem;
  std::size_t ref_iter = 100000;
  Common common;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  CheckOptions opts;
  opts.trials = a.trials;
  opts.seed = a.common.seed;
  opts.ref_iter = a.ref_iter;
  if (!a.problem.empty()) opts.problem = read_problem(a.problem);
  const auto lines = run_check(a.suite, opts);
  bool all = true;
  for (const auto& l : lines) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-4s %-40s worst=%.3e tol=%.1e", l.pass ? "PASS" : "FAIL",
                  l.invariant.c_str(), l.worst, l.tol);
    out << buf;
    if (!l.note.empty()) out << "  " << l.note;
    out << "\n";
    all = all && l.pass;
  }
  out << "check " << a.suite << ": " << (all ? "pass" : "FAIL") << "\n";
  return all ? kExitOk : kExitFailure;
}

// bench --------------------------------------------------------------------

int cmd_bench(const std::string& problem, const Common& c, std::ostream& out) {
  const ProblemSpec spec = read_problem(problem);
  SolverConfig cfg;
  cfg.tol = c.tol;
  cfg.max_iter = c.max_iter;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-13s %8s %10s %22s %12s %s\n", "solver", "iters",
                "ms", "objective", "kkt", "status");
  out << buf;
  for (const auto& name : solver_names()) {
    Stopwatch clock;
    try {
      const RunOutcome r = run_solver(spec, name, cfg);
      std::snprintf(buf, sizeof(buf), "%-13s %8zu %10.2f %22.15g %12.3e %s\n",
                    name.c_str(), r.iterations, clock.elapsed_ms(),
                    objective(spec, r.x), kkt_residual(spec, r.x),
                    r.converged ? "converged" : "max_iter");
    } catch (const ConfigError&) {
      continue;  // solver does not apply to this problem kind
    } catch (const NumericalError& e) {
      std::snprintf(buf, sizeof(buf), "%-13s %8s %10.2f %22s %12s failed: %.60s\n",
                    name.c_str(), "-", clock.elapsed_ms(), "-", "-", e.what());
    }
    out << buf;
  }
  return kExitOk;
}

}  // namespace

double default_ssn_gamma(const ProblemSpec& spec) {
  const double lipschitz = *smooth_of(spec).lipschitz;
  // The l1 active-set iteration cycles from x0 = 0 on many random instances
  // at gamma = 1/L; a tenfold larger gamma leaves the fixed point unchanged
  // and avoids it. The box variant behaves the other way round.
  return std::holds_alternative<LassoSpec>(spec.kind) ? 10.0 / lipschitz
                                                      : 1.0 / lipschitz;
}

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{
      "pg", "fista", "dr", "pdhg", "ssn", "myssn", "continuation", "control"};
  return names;
}

RunOutcome run_solver(const ProblemSpec& spec, const std::string& solver,
                      const SolverConfig& cfg) {
  const Vector x0 = Vector::Zero(spec.n());
  if (solver == "pg") return from(prox_gradient(smooth_form(spec), x0, cfg));
  if (solver == "fista") return from(fista(smooth_form(spec), x0, cfg));
  if (solver == "dr") {
    const auto [f, g] = dr_pair(spec);
    SolverConfig c = cfg;
    if (!c.gamma) c.gamma = 1.0 / *smooth_of(spec).lipschitz;
    return from(douglas_rachford(f, g, x0, c));
  }
  if (solver == "pdhg") {
    const CompositeProblem p = split_form(spec);
    SolverConfig c = cfg;
    const double norm_a = op_norm(*p.a).value;
    // Unset steps default to sigma tau ||A||^2 = 0.9801.
    if (c.tau <= 0.0 && c.sigma <= 0.0) c.tau = c.sigma = 0.99 / norm_a;
    else if (c.tau <= 0.0) c.tau = 0.9801 / (c.sigma * norm_a * norm_a);
    else if (c.sigma <= 0.0) c.sigma = 0.9801 / (c.tau * norm_a * norm_a);
    PrimalDualResult r = primal_dual(p, x0, Vector::Zero(p.a->rows()), c);
    return {std::move(r.x), std::move(r.trace), r.converged, r.iterations,
            std::move(r.y), {}};
  }
  if (solver == "ssn") {
    const SmoothTerm f = smooth_of(spec);
    const double gamma = cfg.gamma.value_or(default_ssn_gamma(spec));
    if (const auto* p = std::get_if<LassoSpec>(&spec.kind))
      return from(l1_ssn(f, p->alpha, gamma, x0, cfg));
    if (const auto* p = std::get_if<BoxQPSpec>(&spec.kind))
      return from(box_ssn(f, p->lo, p->hi, gamma, x0, cfg));
    if (const auto* p = std::get_if<ControlSpec>(&spec.kind)) {
      const BoxQPSpec q = as_boxqp(*p);
      return from(box_ssn(f, q.lo, q.hi, gamma, x0, cfg));
    }
    // Huber: smooth, Newton on the gradient directly.
    return from(ssn_solve(f.gradient,
                          [&](const Vector& x) {
                            return NewtonDerivative{LinearOperator(f.hessian(x)), {}};
                          },
                          x0, cfg, f.value));
  }
  if (solver == "myssn") {
    const LassoSpec& p = need_lasso(spec, solver);
    return from(moreau_yosida_ssn(smooth_of(spec), cfg.gamma.value_or(1.0 / 1024.0),
                                  x0, cfg, p.alpha));
  }
  if (solver == "continuation") {
    const LassoSpec& p = need_lasso(spec, solver);
    ContinuationSchedule schedule;
    if (cfg.gamma) schedule.floor = *cfg.gamma;
    ContinuationResult r = continuation(smooth_of(spec), schedule, x0, cfg, p.alpha);
    const std::size_t iterations = r.trace.rows.empty() ? 0 : r.trace.rows.back().iter;
    return {std::move(r.x), std::move(r.trace), r.completed, iterations, {},
            std::move(r.gammas)};
  }
  if (solver == "control") {
    const auto* p = std::get_if<ControlSpec>(&spec.kind);
    if (!p) throw ConfigError("solver 'control' needs a control problem");
    return from(control_ssn(LinearOperator(p->s), p->z, p->alpha, p->lo, p->hi, x0, cfg));
  }
  throw ConfigError("unknown solver '" + solver + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"proxkit: proximal splitting and semismooth Newton solvers", "proxkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a problem instance");
  gen_cmd->add_option("kind", gen.kind, "problem kind")
      ->required()
      ->check(CLI::IsMember({"lasso", "boxqp", "huber", "control"}));
  gen_cmd->add_option("--n", gen.n, "number of unknowns");
  gen_cmd->add_option("--m", gen.m, "rows of A (lasso; defaults to n)");
  gen_cmd->add_option("--alpha", gen.alpha, "regularization weight");
  gen_cmd->add_option("--gamma", gen.gamma, "Huber smoothing parameter");
  gen_cmd->add_option("--lo", gen.lo, "lower bound");
  gen_cmd->add_option("--hi", gen.hi, "upper bound");
  add_common(gen_cmd, gen.common, true);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "run a solver on a problem file");
  solve_cmd->add_option("--problem", solve.problem, "problem JSON")->required();
  solve_cmd->add_option("--solver", solve.solver, "solver name")
      ->required()
      ->check(CLI::IsMember(solver_names()));
  solve_cmd->add_option("--gamma", solve.gamma, "step / regularization parameter");
  solve_cmd->add_option("--tau", solve.tau, "primal step (pdhg)");
  solve_cmd->add_option("--sigma", solve.sigma, "dual step (pdhg)");
  solve_cmd->add_flag("--line-search", solve.line_search, "backtracking (pg, fista)");
  solve_cmd->add_option("--config", solve.config, "JSON config overrides (file or text)");
  add_common(solve_cmd, solve.common, true);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "run a property suite");
  check_cmd->add_option("suite", check.suite, "suite name")
      ->required()
      ->check(CLI::IsMember(check_suites()));
  check_cmd->add_option("--trials", check.trials, "random trials per invariant");
  check_cmd->add_option("--problem", check.problem, "problem JSON");
  check_cmd->add_option("--ref-iter", check.ref_iter, "FISTA iterations for J*");
  add_common(check_cmd, check.common, false);

  std::string bench_problem;
  Common bench;
  auto* bench_cmd = app.add_subcommand("bench", "run every applicable solver");
  bench_cmd->add_option("--problem", bench_problem, "problem JSON")->required();
  add_common(bench_cmd, bench, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out, err);
    if (*solve_cmd) return cmd_solve(solve, *solve_cmd, out, err);
    if (*check_cmd) return cmd_check(check, out);
    return cmd_bench(bench_problem, bench, out);
  } catch (const std::invalid_argument& e) {
    // ParameterError, DimensionError and ConfigError all land here.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace proxkit::cli

#include "proxkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "proxkit/errors.hpp"
#include "proxkit/random.hpp"

namespace proxkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ParameterError(std::string(what) + " must be positive and finite");
}

void require_dims(Eigen::Index n, const char* what) {
  if (n < 1) throw ParameterError(std::string(what) + ": dimensions must be >= 1");
}

void require_finite(const Matrix& m, const char* what) {
  if (m.size() == 0 || !m.allFinite())
    throw ParameterError(std::string(what) + " must be nonempty and finite");
}

void require_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + " is not positive definite");
}

double spd_condition(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return ev.maxCoeff() / ev.minCoeff();
}

Matrix control_hessian(const ControlSpec& c) {
  return c.s.transpose() * c.s + c.alpha * Matrix::Identity(c.s.cols(), c.s.cols());
}

// Distinct indices drawn by a partial Fisher-Yates shuffle.
std::vector<Eigen::Index> sample_support(Rng& rng, Eigen::Index n, Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const auto j = i + static_cast<Eigen::Index>(rng.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Vector planted_signal(Rng& rng, Eigen::Index n, double scale) {
  const Eigen::Index k = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::lround(0.1 * static_cast<double>(n))));
  Vector x = Vector::Zero(n);
  for (auto i : sample_support(rng, n, k)) x[i] = scale * rng.normal();
  return x;
}

double huber_sum(const Vector& x, double gamma) {
  return moreau_envelope(ProxFunctional::l1(), gamma, x);
}

Vector huber_gradient(const Vector& x, double gamma) {
  return yosida(ProxFunctional::l1(), gamma, x);
}

// Calls fn(pattern) for each of the 3^n patterns over {-1, 0, +1}.
template <class Fn>
void for_each_pattern(Eigen::Index n, Fn&& fn) {
  std::vector<int> pattern(static_cast<std::size_t>(n), 0);
  while (true) {
    fn(pattern);
    std::size_t i = 0;
    for (; i < pattern.size(); ++i) {
      // 0 -> 1 -> -1 -> carry
      if (pattern[i] == 0) {
        pattern[i] = 1;
        break;
      }
      if (pattern[i] == 1) {
        pattern[i] = -1;
        break;
      }
      pattern[i] = 0;
    }
    if (i == pattern.size()) return;
  }
}

void check_pattern(const std::vector<int>& pattern, Eigen::Index n) {
  if (pattern.size() != static_cast<std::size_t>(n))
    throw DimensionError("pattern length " + std::to_string(pattern.size()) +
                         ", expected " + std::to_string(n));
  for (int p : pattern)
    if (p < -1 || p > 1) throw ParameterError("pattern entries must be -1, 0 or 1");
}

std::optional<Vector> lasso_candidate(const Matrix& gram, const Vector& atb,
                                      double alpha, const std::vector<int>& pattern) {
  const Eigen::Index n = gram.rows();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (pattern[static_cast<std::size_t>(i)] != 0) support.push_back(i);

  Vector x = Vector::Zero(n);
  if (!support.empty()) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix g(k, k);
    Vector rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto i = support[static_cast<std::size_t>(a)];
      rhs[a] = atb[i] - alpha * pattern[static_cast<std::size_t>(i)];
      for (Eigen::Index b = 0; b < k; ++b)
        g(a, b) = gram(i, support[static_cast<std::size_t>(b)]);
    }
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vector xs = llt.solve(rhs);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto i = support[static_cast<std::size_t>(a)];
      if (!(xs[a] * pattern[static_cast<std::size_t>(i)] > 0.0)) return std::nullopt;
      x[i] = xs[a];
    }
  }
  const Vector dual = atb - gram * x;
  const double tol = 1e-9 * std::max(1.0, alpha);
  for (Eigen::Index i = 0; i < n; ++i)
    if (pattern[static_cast<std::size_t>(i)] == 0 && std::abs(dual[i]) > alpha + tol)
      return std::nullopt;
  return x;
}

const BoxQPSpec* box_view(const ProblemSpec& spec, BoxQPSpec& storage) {
  if (const auto* b = std::get_if<BoxQPSpec>(&spec.kind)) return b;
  if (const auto* c = std::get_if<ControlSpec>(&spec.kind)) {
    storage = as_boxqp(*c);
    return &storage;
  }
  return nullptr;
}

}  // namespace

Eigen::Index ProblemSpec::n() const {
  return std::visit(Overloaded{
                        [](const LassoSpec& p) { return p.a.cols(); },
                        [](const BoxQPSpec& p) { return p.q.cols(); },
                        [](const HuberDenoiseSpec& p) { return p.b.size(); },
                        [](const ControlSpec& p) { return p.s.cols(); },
                    },
                    kind);
}

std::string ProblemSpec::kind_name() const {
  return std::visit(Overloaded{
                        [](const LassoSpec&) { return std::string("lasso"); },
                        [](const BoxQPSpec&) { return std::string("boxqp"); },
                        [](const HuberDenoiseSpec&) { return std::string("huber"); },
                        [](const ControlSpec&) { return std::string("control"); },
                    },
                    kind);
}

ProblemSpec make_lasso(Matrix a, Vector b, double alpha, std::uint64_t seed) {
  require_finite(a, "lasso: A");
  require_dim(b, a.rows(), "lasso: b");
  if (!b.allFinite()) throw ParameterError("lasso: b must be finite");
  require_positive(alpha, "lasso: alpha");
  const Eigen::Index n = a.cols();
  require_spd(a.transpose() * a + alpha * Matrix::Identity(n, n), "lasso: A'A + alpha I");
  return {LassoSpec{std::move(a), std::move(b), alpha}, seed};
}

ProblemSpec make_boxqp(Matrix q, Vector c, Vector lo, Vector hi,
                       std::uint64_t seed) {
  require_finite(q, "boxqp: Q");
  if (q.rows() != q.cols()) throw DimensionError("boxqp: Q must be square");
  require_dim(c, q.rows(), "boxqp: c");
  require_dim(lo, q.rows(), "boxqp: lo");
  require_dim(hi, q.rows(), "boxqp: hi");
  if (!c.allFinite()) throw ParameterError("boxqp: c must be finite");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || !(lo[i] <= hi[i]) ||
        lo[i] == kInf || hi[i] == -kInf)
      throw ParameterError("boxqp: need lo <= hi with lo < inf, hi > -inf");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * q.cwiseAbs().maxCoeff())
    throw ParameterError("boxqp: Q must be symmetric");
  require_spd(q, "boxqp: Q");
  return {BoxQPSpec{std::move(q), std::move(c), std::move(lo), std::move(hi)}, seed};
}

ProblemSpec make_huber(Vector b, double gamma, double alpha, std::uint64_t seed) {
  require_dims(b.size(), "huber");
  if (!b.allFinite()) throw ParameterError("huber: b must be finite");
  require_positive(gamma, "huber: gamma");
  require_positive(alpha, "huber: alpha");
  return {HuberDenoiseSpec{std::move(b), gamma, alpha}, seed};
}

ProblemSpec make_control(Matrix s, Vector z, double alpha, double lo, double hi,
                         std::uint64_t seed) {
  require_finite(s, "control: S");
  require_dim(z, s.rows(), "control: z");
  if (!z.allFinite()) throw ParameterError("control: z must be finite");
  require_positive(alpha, "control: alpha");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw ParameterError("control: need finite bounds lo < hi");
  ControlSpec c{std::move(s), std::move(z), alpha, lo, hi};
  require_spd(control_hessian(c), "control: S'S + alpha I");
  return {std::move(c), seed};
}

ProblemSpec gen_lasso(Eigen::Index m, Eigen::Index n, double alpha,
                      std::uint64_t seed) {
  require_dims(std::min(m, n), "gen lasso");
  require_positive(alpha, "gen lasso: alpha");
  Rng rng(seed);
  Matrix a = rng.normal_matrix(m, n);
  const Vector x_true = planted_signal(rng, n, 1.0);
  Vector b = a * x_true + 0.01 * rng.normal_vector(m);
  return make_lasso(std::move(a), std::move(b), alpha, seed);
}

ProblemSpec gen_boxqp(Eigen::Index n, std::uint64_t seed, double lo, double hi) {
  require_dims(n, "gen boxqp");
  if (!(lo < hi)) throw ParameterError("gen boxqp: need lo < hi");
  Rng rng(seed);
  const Matrix m = rng.normal_matrix(n, n);
  Matrix q = m.transpose() * m / static_cast<double>(n) +
             0.1 * Matrix::Identity(n, n);
  q = 0.5 * (q + q.transpose());
  Vector c = 2.0 * rng.normal_vector(n);
  return make_boxqp(std::move(q), std::move(c), Vector::Constant(n, lo),
                    Vector::Constant(n, hi), seed);
}

ProblemSpec gen_huber(Eigen::Index n, double gamma, double alpha,
                      std::uint64_t seed) {
  require_dims(n, "gen huber");
  require_positive(gamma, "gen huber: gamma");
  require_positive(alpha, "gen huber: alpha");
  Rng rng(seed);
  const Vector x_true = planted_signal(rng, n, 3.0);
  Vector b = x_true + 0.1 * rng.normal_vector(n);
  return make_huber(std::move(b), gamma, alpha, seed);
}

ProblemSpec gen_control(Eigen::Index n, double alpha, double lo, double hi,
                        std::uint64_t seed) {
  require_dims(n, "gen control");
  require_positive(alpha, "gen control: alpha");
  Rng rng(seed);
  Matrix s = Matrix::Identity(n, n) +
             0.5 * rng.normal_matrix(n, n) / std::sqrt(static_cast<double>(n));
  Vector z = 3.0 * rng.normal_vector(n);
  return make_control(std::move(s), std::move(z), alpha, lo, hi, seed);
}

double condition_estimate(const ProblemSpec& spec) {
  return std::visit(
      Overloaded{
          [](const LassoSpec& p) {
            return spd_condition(p.a.transpose() * p.a +
                                 p.alpha * Matrix::Identity(p.a.cols(), p.a.cols()));
          },
          [](const BoxQPSpec& p) { return spd_condition(p.q); },
          [](const HuberDenoiseSpec& p) { return 1.0 + p.alpha / p.gamma; },
          [](const ControlSpec& p) { return spd_condition(control_hessian(p)); },
      },
      spec.kind);
}

double objective(const ProblemSpec& spec, const Vector& x) {
  require_dim(x, spec.n(), "objective");
  return std::visit(
      Overloaded{
          [&](const LassoSpec& p) {
            return 0.5 * (p.a * x - p.b).squaredNorm() + p.alpha * x.lpNorm<1>();
          },
          [&](const BoxQPSpec& p) {
            return ext_add(0.5 * x.dot(p.q * x) + p.c.dot(x),
                           value(ProxFunctional::box(p.lo, p.hi), x));
          },
          [&](const HuberDenoiseSpec& p) {
            return 0.5 * (x - p.b).squaredNorm() + p.alpha * huber_sum(x, p.gamma);
          },
          [&](const ControlSpec& p) {
            return ext_add(0.5 * (p.s * x - p.z).squaredNorm() +
                               0.5 * p.alpha * x.squaredNorm(),
                           value(ProxFunctional::box(p.lo, p.hi), x));
          },
      },
      spec.kind);
}

nlohmann::json to_json(const ProblemSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind_name();
  j["seed"] = spec.seed;
  std::visit(Overloaded{
                 [&](const LassoSpec& p) {
                   j["a"] = to_json(p.a);
                   j["b"] = to_json(p.b);
                   j["alpha"] = p.alpha;
                 },
                 [&](const BoxQPSpec& p) {
                   j["q"] = to_json(p.q);
                   j["c"] = to_json(p.c);
                   j["lo"] = bounds_to_json(p.lo);
                   j["hi"] = bounds_to_json(p.hi);
                 },
                 [&](const HuberDenoiseSpec& p) {
                   j["b"] = to_json(p.b);
                   j["gamma"] = p.gamma;
                   j["alpha"] = p.alpha;
                 },
                 [&](const ControlSpec& p) {
                   j["s"] = to_json(p.s);
                   j["z"] = to_json(p.z);
                   j["alpha"] = p.alpha;
                   j["lo"] = p.lo;
                   j["hi"] = p.hi;
                 },
             },
             spec.kind);
  return j;
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ParameterError("problem JSON needs a \"kind\" field");
  try {
    const auto kind = j.at("kind").get<std::string>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (kind == "lasso")
      return make_lasso(matrix_from_json(j.at("a")), vector_from_json(j.at("b")),
                        j.at("alpha").get<double>(), seed);
    if (kind == "boxqp")
      return make_boxqp(matrix_from_json(j.at("q")), vector_from_json(j.at("c")),
                        bounds_from_json(j.at("lo")), bounds_from_json(j.at("hi")),
                        seed);
    if (kind == "huber")
      return make_huber(vector_from_json(j.at("b")), j.at("gamma").get<double>(),
                        j.at("alpha").get<double>(), seed);
    if (kind == "control")
      return make_control(matrix_from_json(j.at("s")), vector_from_json(j.at("z")),
                          j.at("alpha").get<double>(), j.at("lo").get<double>(),
                          j.at("hi").get<double>(), seed);
    throw ParameterError("unknown problem kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed problem JSON: ") + e.what());
  }
}

std::optional<Vector> lasso_pattern_solve(const LassoSpec& p,
                                          const std::vector<int>& pattern) {
  check_pattern(pattern, p.a.cols());
  return lasso_candidate(p.a.transpose() * p.a, p.a.transpose() * p.b, p.alpha,
                         pattern);
}

std::optional<Vector> boxqp_pattern_solve(const BoxQPSpec& p,
                                          const std::vector<int>& pattern) {
  const Eigen::Index n = p.q.rows();
  check_pattern(pattern, n);
  Vector x(n);
  std::vector<Eigen::Index> free_idx, fixed_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = pattern[static_cast<std::size_t>(i)];
    if (s == 0) {
      free_idx.push_back(i);
      continue;
    }
    x[i] = s < 0 ? p.lo[i] : p.hi[i];
    if (!std::isfinite(x[i])) return std::nullopt;
    fixed_idx.push_back(i);
  }
  if (!free_idx.empty()) {
    const auto k = static_cast<Eigen::Index>(free_idx.size());
    Matrix qff(k, k);
    Vector rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto i = free_idx[static_cast<std::size_t>(a)];
      double r = -p.c[i];
      for (auto j : fixed_idx) r -= p.q(i, j) * x[j];
      rhs[a] = r;
      for (Eigen::Index b = 0; b < k; ++b)
        qff(a, b) = p.q(i, free_idx[static_cast<std::size_t>(b)]);
    }
    Eigen::LLT<Matrix> llt(qff);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vector xf = llt.solve(rhs);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto i = free_idx[static_cast<std::size_t>(a)];
      const double lo_slack = 1e-12 * (1.0 + std::abs(p.lo[i]));
      const double hi_slack = 1e-12 * (1.0 + std::abs(p.hi[i]));
      if (xf[a] < p.lo[i] - lo_slack || xf[a] > p.hi[i] + hi_slack)
        return std::nullopt;
      x[i] = std::clamp(xf[a], p.lo[i], p.hi[i]);
    }
  }
  const Vector grad = p.q * x + p.c;
  const double tol = 1e-9 * (1.0 + p.c.lpNorm<Eigen::Infinity>());
  for (auto i : fixed_idx) {
    const int s = pattern[static_cast<std::size_t>(i)];
    // At the lower bound the gradient must point inward (>= 0), at the upper
    // bound outward (<= 0).
    if (s < 0 && grad[i] < -tol) return std::nullopt;
    if (s > 0 && grad[i] > tol) return std::nullopt;
  }
  return x;
}

BoxQPSpec as_boxqp(const ControlSpec& c) {
  const Eigen::Index n = c.s.cols();
  return {control_hessian(c), -(c.s.transpose() * c.z), Vector::Constant(n, c.lo),
          Vector::Constant(n, c.hi)};
}

OracleSolution oracle_lasso(const ProblemSpec& spec, Eigen::Index max_dim) {
  const auto* p = std::get_if<LassoSpec>(&spec.kind);
  if (!p) throw ParameterError("oracle_lasso: problem is " + spec.kind_name());
  const Eigen::Index n = p->a.cols();
  if (n > max_dim)
    throw ParameterError("oracle_lasso: N = " + std::to_string(n) + " exceeds " +
                         std::to_string(max_dim));
  const Matrix gram = p->a.transpose() * p->a;
  const Vector atb = p->a.transpose() * p->b;

  std::optional<OracleSolution> best;
  for_each_pattern(n, [&](const std::vector<int>& pattern) {
    auto x = lasso_candidate(gram, atb, p->alpha, pattern);
    if (!x) return;
    const double obj = objective(spec, *x);
    if (!best || obj < best->objective) {
      best = OracleSolution{};
      best->x = std::move(*x);
      best->objective = obj;
      best->pattern = pattern;
    }
  });
  if (!best)
    throw NumericalError("oracle_lasso: no sign pattern verified (internal error)");
  best->kkt = kkt_residual(spec, best->x);
  return *best;
}

OracleSolution oracle_boxqp(const ProblemSpec& spec, Eigen::Index max_dim) {
  BoxQPSpec storage;
  const BoxQPSpec* p = box_view(spec, storage);
  if (!p) throw ParameterError("oracle_boxqp: problem is " + spec.kind_name());
  const Eigen::Index n = p->q.rows();
  if (n > max_dim)
    throw ParameterError("oracle_boxqp: N = " + std::to_string(n) + " exceeds " +
                         std::to_string(max_dim));

  std::optional<OracleSolution> best;
  for_each_pattern(n, [&](const std::vector<int>& pattern) {
    auto x = boxqp_pattern_solve(*p, pattern);
    if (!x) return;
    const double obj = objective(spec, *x);
    if (!best || obj < best->objective) {
      best = OracleSolution{};
      best->x = std::move(*x);
      best->objective = obj;
      best->pattern = pattern;
    }
  });
  if (!best)
    throw NumericalError("oracle_boxqp: no bound configuration verified (internal error)");
  const Vector grad = p->q * best->x + p->c;
  best->multiplier = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = best->pattern[static_cast<std::size_t>(i)];
    if (s < 0) best->multiplier[i] = grad[i];
    if (s > 0) best->multiplier[i] = -grad[i];
  }
  best->kkt = kkt_residual(spec, best->x);
  return *best;
}

double kkt_residual(const ProblemSpec& spec, const Vector& x,
                    const std::optional<Vector>& aux) {
  require_dim(x, spec.n(), "kkt_residual");
  auto box_residual = [&](const BoxQPSpec& p) {
    const Vector proj = x.cwiseMax(p.lo).cwiseMin(p.hi);
    const Vector grad = p.q * proj + p.c;
    return ext_add((x - proj).norm(),
                   fenchel_young_gap(ProxFunctional::box(p.lo, p.hi), proj, -grad));
  };
  return std::visit(
      Overloaded{
          [&](const LassoSpec& p) {
            const Vector ax = p.a * x;
            Vector y = aux ? *aux : Vector(ax - p.b);
            require_dim(y, p.a.rows(), "kkt_residual: dual");
            const Vector aty = p.a.transpose() * y;
            const double sup = aty.lpNorm<Eigen::Infinity>();
            if (sup > p.alpha) y *= p.alpha / sup;
            const Vector slope = -(p.a.transpose() * y);
            const auto f = ProxFunctional::scaled(p.alpha, ProxFunctional::l1());
            const auto g = ProxFunctional::shifted(p.b, ProxFunctional::squared_l2());
            return ext_add(fenchel_young_gap(f, x, slope), fenchel_young_gap(g, ax, y));
          },
          [&](const BoxQPSpec& p) { return box_residual(p); },
          [&](const HuberDenoiseSpec& p) {
            return (x - p.b + p.alpha * huber_gradient(x, p.gamma)).norm();
          },
          [&](const ControlSpec& p) { return box_residual(as_boxqp(p)); },
      },
      spec.kind);
}

CompositeProblem smooth_form(const ProblemSpec& spec) {
  CompositeProblem out;
  std::visit(
      Overloaded{
          [&](const LassoSpec& p) {
            out.smooth = least_squares(LinearOperator(p.a), p.b);
            out.g = ProxFunctional::scaled(p.alpha, ProxFunctional::l1());
          },
          [&](const BoxQPSpec& p) {
            out.smooth = quadratic_term(p.q, p.c);
            out.g = ProxFunctional::box(p.lo, p.hi);
          },
          [&](const HuberDenoiseSpec& p) {
            SmoothTerm f;
            f.value = [p](const Vector& x) {
              return 0.5 * (x - p.b).squaredNorm() + p.alpha * huber_sum(x, p.gamma);
            };
            f.gradient = [p](const Vector& x) -> Vector {
              return x - p.b + p.alpha * huber_gradient(x, p.gamma);
            };
            f.lipschitz = 1.0 + p.alpha / p.gamma;
            f.hessian = [p](const Vector& x) -> Matrix {
              Vector d(x.size());
              for (Eigen::Index i = 0; i < x.size(); ++i)
                d[i] = 1.0 + (std::abs(x[i]) <= p.gamma ? p.alpha / p.gamma : 0.0);
              return d.asDiagonal();
            };
            out.smooth = std::move(f);
          },
          [&](const ControlSpec& p) {
            const BoxQPSpec q = as_boxqp(p);
            SmoothTerm f = quadratic_term(q.q, q.c);
            const double offset = 0.5 * p.z.squaredNorm();
            f.value = [inner = f.value, offset](const Vector& u) {
              return inner(u) + offset;
            };
            out.smooth = std::move(f);
            out.g = ProxFunctional::box(q.lo, q.hi);
          },
      },
      spec.kind);
  return out;
}

CompositeProblem split_form(const ProblemSpec& spec) {
  CompositeProblem out;
  std::visit(
      Overloaded{
          [&](const LassoSpec& p) {
            out.f_prox = ProxFunctional::scaled(p.alpha, ProxFunctional::l1());
            out.g = ProxFunctional::shifted(p.b, ProxFunctional::squared_l2());
            out.a = LinearOperator(p.a);
          },
          // Box as the primal term keeps the primal iterate feasible.
          [&](const BoxQPSpec& p) {
            out.f_prox = ProxFunctional::box(p.lo, p.hi);
            out.g = ProxFunctional::quadratic(p.q, -p.c);
            out.a = LinearOperator::identity(p.q.rows());
          },
          [&](const HuberDenoiseSpec&) {
            throw ConfigError("huber problem has no primal-dual splitting");
          },
          [&](const ControlSpec& p) {
            const BoxQPSpec q = as_boxqp(p);
            out.f_prox = ProxFunctional::box(q.lo, q.hi);
            out.g = ProxFunctional::quadratic(q.q, -q.c, 0.5 * p.z.squaredNorm());
            out.a = LinearOperator::identity(q.q.rows());
          },
      },
      spec.kind);
  return out;
}

std::pair<ProxFunctional, ProxFunctional> dr_pair(const ProblemSpec& spec) {
  return std::visit(
      Overloaded{
          [](const LassoSpec& p) {
            return std::pair{
                ProxFunctional::scaled(p.alpha, ProxFunctional::l1()),
                ProxFunctional::quadratic(p.a.transpose() * p.a,
                                          p.a.transpose() * p.b,
                                          0.5 * p.b.squaredNorm())};
          },
          [](const BoxQPSpec& p) {
            return std::pair{ProxFunctional::box(p.lo, p.hi),
                             ProxFunctional::quadratic(p.q, -p.c)};
          },
          [](const HuberDenoiseSpec&) -> std::pair<ProxFunctional, ProxFunctional> {
            throw ConfigError("huber problem has no Douglas-Rachford splitting");
          },
          [](const ControlSpec& p) {
            const BoxQPSpec q = as_boxqp(p);
            return std::pair{ProxFunctional::box(q.lo, q.hi),
                             ProxFunctional::quadratic(q.q, -q.c,
                                                       0.5 * p.z.squaredNorm())};
          },
      },
      spec.kind);
}

}  // namespace proxkit

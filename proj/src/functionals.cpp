#include "proxkit/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "proxkit/errors.hpp"

namespace proxkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Indicator membership tolerates relative roundoff of this size, so that a
// projection composed with a shift (x0 + P(x - x0)) - x0 still tests feasible.
constexpr double kFeasibilitySlack = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double bound(const Vector& v, Eigen::Index i) {
  return v.size() == 1 ? v[0] : v[i];
}

bool within_upper(double x, double hi) {
  return x <= hi + kFeasibilitySlack * (1.0 + std::abs(hi));
}

bool within_lower(double x, double lo) {
  return x >= lo - kFeasibilitySlack * (1.0 + std::abs(lo));
}

void validate_box(const Vector& lo, const Vector& hi, const char* what) {
  if (lo.size() == 0 || hi.size() == 0)
    throw DimensionError(std::string(what) + ": empty bound vector");
  if (lo.size() != hi.size() && lo.size() != 1 && hi.size() != 1)
    throw DimensionError(std::string(what) + ": bound sizes differ");
  const Eigen::Index n = std::max(lo.size(), hi.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = bound(lo, i);
    const double h = bound(hi, i);
    if (std::isnan(l) || std::isnan(h) || l > h || l == kInf || h == -kInf)
      throw ParameterError(std::string(what) +
                           ": bounds must satisfy lo <= hi with a nonempty box");
  }
}

Eigen::Index box_dim(const Vector& lo, const Vector& hi) {
  return std::max(lo.size(), hi.size());
}

FunctionalPtr share(const ProxFunctional& f) {
  return std::make_shared<const ProxFunctional>(f);
}

void check_gamma(double gamma, const char* what) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ParameterError(std::string(what) + ": gamma must be positive, got " +
                         std::to_string(gamma));
}

void check_dim(const ProxFunctional& f, const Vector& x, const char* what) {
  if (auto d = f.dim()) require_dim(x, *d, what);
}

Vector solve_shifted_identity(const Matrix& q, double gamma, const Vector& rhs) {
  const Matrix system =
      Matrix::Identity(q.rows(), q.cols()) + gamma * q;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success)
    throw NumericalError("quadratic prox: I + gamma Q is not positive definite");
  return llt.solve(rhs);
}

bool close(double a, double b, double rel_tol) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

bool close(const Vector& a, const Vector& b, double rel_tol) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i], rel_tol)) return false;
  return true;
}

bool close(const Matrix& a, const Matrix& b, double rel_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (!close(a(i, k), b(i, k), rel_tol)) return false;
  return true;
}

}  // namespace

nlohmann::json bounds_to_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == kInf)
      j.push_back("inf");
    else if (v[i] == -kInf)
      j.push_back("-inf");
    else
      j.push_back(v[i]);
  }
  return j;
}

Vector bounds_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParameterError("bounds JSON must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (j[i].is_string()) {
      const auto s = j[i].get<std::string>();
      if (s == "inf")
        v[idx] = kInf;
      else if (s == "-inf")
        v[idx] = -kInf;
      else
        throw ParameterError("bounds JSON: unknown token '" + s + "'");
    } else {
      v[idx] = j[i].get<double>();
    }
  }
  return v;
}

namespace {

double box_support_value(const Vector& lo, const Vector& hi, const Vector& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) {
      const double h = bound(hi, i);
      if (h == kInf) return kInf;
      total += h * y[i];
    } else if (y[i] < 0.0) {
      const double l = bound(lo, i);
      if (l == -kInf) return kInf;
      total += l * y[i];
    }
  }
  return total;
}

}  // namespace

double ext_add(double a, double b) {
  if ((a == kInf && b == -kInf) || (a == -kInf && b == kInf))
    throw NumericalError("extended-real arithmetic: inf - inf is undefined");
  return a + b;
}

double ext_sub(double a, double b) { return ext_add(a, -b); }

// ---------------------------------------------------------------------------
// Construction

ProxFunctional ProxFunctional::squared_l2() { return ProxFunctional(kinds::SquaredL2{}); }
ProxFunctional ProxFunctional::l1() { return ProxFunctional(kinds::L1{}); }
ProxFunctional ProxFunctional::l2_norm() { return ProxFunctional(kinds::L2Norm{}); }
ProxFunctional ProxFunctional::zero() { return ProxFunctional(kinds::Zero{}); }

ProxFunctional ProxFunctional::box(double lo, double hi) {
  return box(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

ProxFunctional ProxFunctional::box(Vector lo, Vector hi) {
  validate_box(lo, hi, "box");
  return ProxFunctional(kinds::BoxIndicator{std::move(lo), std::move(hi)});
}

ProxFunctional ProxFunctional::box_support(Vector lo, Vector hi) {
  validate_box(lo, hi, "box_support");
  return ProxFunctional(kinds::BoxSupport{std::move(lo), std::move(hi)});
}

ProxFunctional ProxFunctional::inf_ball(double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw ParameterError("inf_ball: radius must be finite and nonnegative");
  return ProxFunctional(kinds::InfBallIndicator{radius});
}

ProxFunctional ProxFunctional::l2_ball(double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw ParameterError("l2_ball: radius must be finite and nonnegative");
  return ProxFunctional(kinds::L2BallIndicator{radius});
}

ProxFunctional ProxFunctional::quadratic(Matrix q, Vector c, double offset) {
  if (q.rows() == 0 || q.rows() != q.cols())
    throw DimensionError("quadratic: Q must be square and nonempty");
  require_dim(c, q.rows(), "quadratic: linear term");
  if (!q.allFinite() || !c.allFinite() || !std::isfinite(offset))
    throw ParameterError("quadratic: non-finite data");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ParameterError("quadratic: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
    throw ParameterError("quadratic: Q must be positive semidefinite");
  return ProxFunctional(kinds::Quadratic{std::move(q), std::move(c), offset});
}

ProxFunctional ProxFunctional::scaled(double alpha, const ProxFunctional& f) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("scaled: alpha must be positive and finite");
  if (alpha == 1.0) return f;
  return std::visit(
      Overloaded{
          [&](const kinds::Zero&) { return f; },
          [&](const kinds::BoxIndicator&) { return f; },
          [&](const kinds::InfBallIndicator&) { return f; },
          [&](const kinds::L2BallIndicator&) { return f; },
          [&](const kinds::BoxSupport& k) {
            return box_support(alpha * k.lo, alpha * k.hi);
          },
          [&](const kinds::Quadratic& k) {
            return ProxFunctional(
                kinds::Quadratic{alpha * k.q, alpha * k.c, alpha * k.offset});
          },
          [&](const kinds::Scaled& k) { return scaled(alpha * k.alpha, *k.inner); },
          [&](const kinds::Shifted& k) {
            return shifted(k.center, scaled(alpha, *k.inner));
          },
          [&](const kinds::Tilted& k) {
            return tilted(alpha * k.slope, scaled(alpha, *k.inner));
          },
          [&](const kinds::SeparableSum& k) {
            std::vector<ProxFunctional> parts;
            for (const auto& p : k.parts) parts.push_back(scaled(alpha, *p));
            return separable(parts);
          },
          [&](const auto&) {
            return ProxFunctional(kinds::Scaled{alpha, share(f)});
          },
      },
      f.kind());
}

ProxFunctional ProxFunctional::shifted(Vector center, const ProxFunctional& f) {
  if (center.size() == 0) throw DimensionError("shifted: empty center");
  if (!center.allFinite()) throw ParameterError("shifted: non-finite center");
  if (auto d = f.dim()) require_dim(center, *d, "shifted");
  return ProxFunctional(kinds::Shifted{std::move(center), share(f)});
}

ProxFunctional ProxFunctional::tilted(Vector slope, const ProxFunctional& f) {
  if (slope.size() == 0) throw DimensionError("tilted: empty slope");
  if (!slope.allFinite()) throw ParameterError("tilted: non-finite slope");
  if (auto d = f.dim()) require_dim(slope, *d, "tilted");
  return ProxFunctional(kinds::Tilted{std::move(slope), share(f)});
}

ProxFunctional ProxFunctional::separable(const std::vector<ProxFunctional>& parts) {
  if (parts.empty()) throw DimensionError("separable: no parts");
  kinds::SeparableSum sum;
  for (const auto& p : parts) {
    if (auto d = p.dim(); d && *d != 1)
      throw DimensionError("separable: every part must be scalar");
    sum.parts.push_back(share(p));
  }
  return ProxFunctional(std::move(sum));
}

std::string ProxFunctional::name() const {
  return std::visit(
      Overloaded{
          [](const kinds::SquaredL2&) { return std::string("squared_l2"); },
          [](const kinds::L1&) { return std::string("l1"); },
          [](const kinds::L2Norm&) { return std::string("l2_norm"); },
          [](const kinds::Zero&) { return std::string("zero"); },
          [](const kinds::BoxIndicator&) { return std::string("box"); },
          [](const kinds::BoxSupport&) { return std::string("box_support"); },
          [](const kinds::InfBallIndicator&) { return std::string("inf_ball"); },
          [](const kinds::L2BallIndicator&) { return std::string("l2_ball"); },
          [](const kinds::Quadratic&) { return std::string("quadratic"); },
          [](const kinds::Scaled&) { return std::string("scaled"); },
          [](const kinds::Shifted&) { return std::string("shifted"); },
          [](const kinds::Tilted&) { return std::string("tilted"); },
          [](const kinds::SeparableSum&) { return std::string("separable"); },
      },
      kind_);
}

std::optional<Eigen::Index> ProxFunctional::dim() const {
  return std::visit(
      Overloaded{
          [](const kinds::BoxIndicator& k) -> std::optional<Eigen::Index> {
            const auto n = box_dim(k.lo, k.hi);
            return n > 1 ? std::optional<Eigen::Index>(n) : std::nullopt;
          },
          [](const kinds::BoxSupport& k) -> std::optional<Eigen::Index> {
            const auto n = box_dim(k.lo, k.hi);
            return n > 1 ? std::optional<Eigen::Index>(n) : std::nullopt;
          },
          [](const kinds::Quadratic& k) -> std::optional<Eigen::Index> {
            return k.q.rows();
          },
          [](const kinds::Scaled& k) { return k.inner->dim(); },
          [](const kinds::Shifted& k) -> std::optional<Eigen::Index> {
            return k.center.size();
          },
          [](const kinds::Tilted& k) -> std::optional<Eigen::Index> {
            return k.slope.size();
          },
          [](const kinds::SeparableSum& k) -> std::optional<Eigen::Index> {
            return static_cast<Eigen::Index>(k.parts.size());
          },
          [](const auto&) -> std::optional<Eigen::Index> { return std::nullopt; },
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Evaluation

double value(const ProxFunctional& f, const Vector& x) {
  check_dim(f, x, "value");
  return std::visit(
      Overloaded{
          [&](const kinds::SquaredL2&) { return 0.5 * x.squaredNorm(); },
          [&](const kinds::L1&) { return x.lpNorm<1>(); },
          [&](const kinds::L2Norm&) { return x.norm(); },
          [&](const kinds::Zero&) { return 0.0; },
          [&](const kinds::BoxIndicator& k) {
            for (Eigen::Index i = 0; i < x.size(); ++i)
              if (!within_lower(x[i], bound(k.lo, i)) ||
                  !within_upper(x[i], bound(k.hi, i)))
                return kInf;
            return 0.0;
          },
          [&](const kinds::BoxSupport& k) {
            return box_support_value(k.lo, k.hi, x);
          },
          [&](const kinds::InfBallIndicator& k) {
            const double m = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
            return within_upper(m, k.radius) ? 0.0 : kInf;
          },
          [&](const kinds::L2BallIndicator& k) {
            return within_upper(x.norm(), k.radius) ? 0.0 : kInf;
          },
          [&](const kinds::Quadratic& k) {
            return 0.5 * x.dot(k.q * x) - k.c.dot(x) + k.offset;
          },
          [&](const kinds::Scaled& k) { return k.alpha * value(*k.inner, x); },
          [&](const kinds::Shifted& k) {
            return value(*k.inner, Vector(x - k.center));
          },
          [&](const kinds::Tilted& k) {
            return ext_add(value(*k.inner, x), k.slope.dot(x));
          },
          [&](const kinds::SeparableSum& k) {
            double total = 0.0;
            for (std::size_t i = 0; i < k.parts.size(); ++i)
              total = ext_add(
                  total, value(*k.parts[i],
                               Vector::Constant(1, x[static_cast<Eigen::Index>(i)])));
            return total;
          },
      },
      f.kind());
}

Vector prox(const ProxFunctional& f, double gamma, const Vector& x) {
  check_gamma(gamma, "prox");
  check_dim(f, x, "prox");
  return std::visit(
      Overloaded{
          [&](const kinds::SquaredL2&) -> Vector { return x / (1.0 + gamma); },
          [&](const kinds::L1&) -> Vector {
            Vector z(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              const double t = x[i];
              z[i] = t > gamma ? t - gamma : (t < -gamma ? t + gamma : 0.0);
            }
            return z;
          },
          [&](const kinds::L2Norm&) -> Vector {
            const double n = x.norm();
            if (n <= gamma) return Vector::Zero(x.size());
            return (1.0 - gamma / n) * x;
          },
          [&](const kinds::Zero&) -> Vector { return x; },
          [&](const kinds::BoxIndicator& k) -> Vector {
            Vector z(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
              z[i] = std::clamp(x[i], bound(k.lo, i), bound(k.hi, i));
            return z;
          },
          [&](const kinds::BoxSupport& k) -> Vector {
            // Moreau: x - gamma * P_box(x / gamma) = x - clamp(x, gamma lo, gamma hi).
            Vector z(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
              z[i] = x[i] - std::clamp(x[i], gamma * bound(k.lo, i),
                                       gamma * bound(k.hi, i));
            return z;
          },
          [&](const kinds::InfBallIndicator& k) -> Vector {
            return x.cwiseMax(-k.radius).cwiseMin(k.radius);
          },
          [&](const kinds::L2BallIndicator& k) -> Vector {
            const double n = x.norm();
            if (n <= k.radius) return x;
            return (k.radius / n) * x;
          },
          [&](const kinds::Quadratic& k) -> Vector {
            return solve_shifted_identity(k.q, gamma, x + gamma * k.c);
          },
          [&](const kinds::Scaled& k) -> Vector {
            return prox(*k.inner, gamma * k.alpha, x);
          },
          [&](const kinds::Shifted& k) -> Vector {
            return k.center + prox(*k.inner, gamma, Vector(x - k.center));
          },
          [&](const kinds::Tilted& k) -> Vector {
            return prox(*k.inner, gamma, Vector(x - gamma * k.slope));
          },
          [&](const kinds::SeparableSum& k) -> Vector {
            Vector z(x.size());
            for (std::size_t i = 0; i < k.parts.size(); ++i) {
              const auto idx = static_cast<Eigen::Index>(i);
              z[idx] = prox(*k.parts[i], gamma, Vector::Constant(1, x[idx]))[0];
            }
            return z;
          },
      },
      f.kind());
}

ProxFunctional conjugate(const ProxFunctional& f) {
  using PF = ProxFunctional;
  return std::visit(
      Overloaded{
          [](const kinds::SquaredL2&) { return PF::squared_l2(); },
          [](const kinds::L1&) { return PF::inf_ball(1.0); },
          [](const kinds::L2Norm&) { return PF::l2_ball(1.0); },
          [](const kinds::Zero&) { return PF::inf_ball(0.0); },
          [](const kinds::BoxIndicator& k) { return PF::box_support(k.lo, k.hi); },
          [](const kinds::BoxSupport& k) { return PF::box(k.lo, k.hi); },
          [](const kinds::InfBallIndicator& k) {
            return k.radius == 0.0 ? PF::zero() : PF::scaled(k.radius, PF::l1());
          },
          [](const kinds::L2BallIndicator& k) {
            return k.radius == 0.0 ? PF::zero()
                                   : PF::scaled(k.radius, PF::l2_norm());
          },
          [](const kinds::Quadratic& k) {
            Eigen::LLT<Matrix> llt(k.q);
            if (llt.info() != Eigen::Success)
              throw ParameterError(
                  "conjugate: quadratic needs positive definite Q");
            Matrix qinv = llt.solve(Matrix::Identity(k.q.rows(), k.q.cols()));
            qinv = 0.5 * (qinv + qinv.transpose()).eval();
            const Vector qinv_c = qinv * k.c;
            return PF::quadratic(qinv, -qinv_c, 0.5 * k.c.dot(qinv_c) - k.offset);
          },
          [](const kinds::Scaled& k) {
            // Only the normalized forms reach here.
            return std::visit(
                Overloaded{
                    [&](const kinds::SquaredL2&) {
                      return PF::scaled(1.0 / k.alpha, PF::squared_l2());
                    },
                    [&](const kinds::L1&) { return PF::inf_ball(k.alpha); },
                    [&](const kinds::L2Norm&) { return PF::l2_ball(k.alpha); },
                    [&](const auto&) -> PF {
                      throw ParameterError("conjugate: unnormalized scaled node");
                    },
                },
                k.inner->kind());
          },
          [](const kinds::Shifted& k) {
            return PF::tilted(k.center, conjugate(*k.inner));
          },
          [](const kinds::Tilted& k) {
            return PF::shifted(k.slope, conjugate(*k.inner));
          },
          [](const kinds::SeparableSum& k) {
            std::vector<PF> parts;
            for (const auto& p : k.parts) parts.push_back(conjugate(*p));
            return PF::separable(parts);
          },
      },
      f.kind());
}

Vector prox_conjugate(const ProxFunctional& f, double gamma, const Vector& x) {
  check_gamma(gamma, "prox_conjugate");
  return x - gamma * prox(f, 1.0 / gamma, x / gamma);
}

double moreau_envelope(const ProxFunctional& f, double gamma, const Vector& x) {
  const Vector p = prox(f, gamma, x);
  return (p - x).squaredNorm() / (2.0 * gamma) + value(f, p);
}

Vector yosida(const ProxFunctional& f, double gamma, const Vector& x) {
  return (x - prox(f, gamma, x)) / gamma;
}

double fenchel_young_gap(const ProxFunctional& f, const Vector& x,
                         const Vector& xstar) {
  require_dim(xstar, x.size(), "fenchel_young_gap");
  const double fx = value(f, x);
  const double fstar = value(conjugate(f), xstar);
  const double pairing = x.dot(xstar);
  const double gap = ext_sub(ext_add(fx, fstar), pairing);
  if (gap == kInf) return kInf;
  const double scale = 1.0 + std::abs(fx) + std::abs(fstar) + std::abs(pairing);
  if (gap < -1e-12 * scale)
    throw NumericalError("fenchel_young_gap: negative gap " +
                         std::to_string(gap) + " violates Fenchel-Young");
  return std::max(gap, 0.0);
}

Vector regularized_minimizer(const ProxFunctional& f, double gamma,
                             Eigen::Index n) {
  check_gamma(gamma, "regularized_minimizer");
  const Eigen::Index dim = f.dim().value_or(n);
  return -prox_conjugate(f, gamma, Vector::Zero(dim)) / gamma;
}

bool structurally_equal(const ProxFunctional& a, const ProxFunctional& b,
                        double rel_tol) {
  if (a.kind().index() != b.kind().index()) return false;
  return std::visit(
      Overloaded{
          [&](const kinds::BoxIndicator& k) {
            const auto& o = std::get<kinds::BoxIndicator>(b.kind());
            return close(k.lo, o.lo, rel_tol) && close(k.hi, o.hi, rel_tol);
          },
          [&](const kinds::BoxSupport& k) {
            const auto& o = std::get<kinds::BoxSupport>(b.kind());
            return close(k.lo, o.lo, rel_tol) && close(k.hi, o.hi, rel_tol);
          },
          [&](const kinds::InfBallIndicator& k) {
            return close(k.radius, std::get<kinds::InfBallIndicator>(b.kind()).radius,
                         rel_tol);
          },
          [&](const kinds::L2BallIndicator& k) {
            return close(k.radius, std::get<kinds::L2BallIndicator>(b.kind()).radius,
                         rel_tol);
          },
          [&](const kinds::Quadratic& k) {
            const auto& o = std::get<kinds::Quadratic>(b.kind());
            // Offsets and linear terms may be exactly zero on one side and
            // roundoff-sized on the other, so compare them on the scale of Q.
            const double scale = std::max(1.0, k.q.cwiseAbs().maxCoeff());
            return close(k.q, o.q, rel_tol) &&
                   (k.c - o.c).cwiseAbs().maxCoeff() <=
                       rel_tol * scale * std::max(1.0, k.c.cwiseAbs().maxCoeff()) &&
                   std::abs(k.offset - o.offset) <=
                       rel_tol * scale * std::max(1.0, std::abs(k.offset));
          },
          [&](const kinds::Scaled& k) {
            const auto& o = std::get<kinds::Scaled>(b.kind());
            return close(k.alpha, o.alpha, rel_tol) &&
                   structurally_equal(*k.inner, *o.inner, rel_tol);
          },
          [&](const kinds::Shifted& k) {
            const auto& o = std::get<kinds::Shifted>(b.kind());
            return close(k.center, o.center, rel_tol) &&
                   structurally_equal(*k.inner, *o.inner, rel_tol);
          },
          [&](const kinds::Tilted& k) {
            const auto& o = std::get<kinds::Tilted>(b.kind());
            return close(k.slope, o.slope, rel_tol) &&
                   structurally_equal(*k.inner, *o.inner, rel_tol);
          },
          [&](const kinds::SeparableSum& k) {
            const auto& o = std::get<kinds::SeparableSum>(b.kind());
            if (k.parts.size() != o.parts.size()) return false;
            for (std::size_t i = 0; i < k.parts.size(); ++i)
              if (!structurally_equal(*k.parts[i], *o.parts[i], rel_tol))
                return false;
            return true;
          },
          [&](const auto&) { return true; },
      },
      a.kind());
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const ProxFunctional& f) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      Overloaded{
          [&](const kinds::BoxIndicator& k) {
            params["lo"] = bounds_to_json(k.lo);
            params["hi"] = bounds_to_json(k.hi);
          },
          [&](const kinds::BoxSupport& k) {
            params["lo"] = bounds_to_json(k.lo);
            params["hi"] = bounds_to_json(k.hi);
          },
          [&](const kinds::InfBallIndicator& k) { params["radius"] = k.radius; },
          [&](const kinds::L2BallIndicator& k) { params["radius"] = k.radius; },
          [&](const kinds::Quadratic& k) {
            params["q"] = to_json(k.q);
            params["c"] = to_json(k.c);
            params["offset"] = k.offset;
          },
          [&](const kinds::Scaled& k) {
            params["alpha"] = k.alpha;
            params["inner"] = to_json(*k.inner);
          },
          [&](const kinds::Shifted& k) {
            params["center"] = to_json(k.center);
            params["inner"] = to_json(*k.inner);
          },
          [&](const kinds::Tilted& k) {
            params["slope"] = to_json(k.slope);
            params["inner"] = to_json(*k.inner);
          },
          [&](const kinds::SeparableSum& k) {
            auto parts = nlohmann::json::array();
            for (const auto& p : k.parts) parts.push_back(to_json(*p));
            params["parts"] = std::move(parts);
          },
          [&](const auto&) {},
      },
      f.kind());
  return {{"kind", f.name()}, {"params", std::move(params)}};
}

ProxFunctional functional_from_json(const nlohmann::json& j) {
  using PF = ProxFunctional;
  if (!j.is_object() || !j.contains("kind"))
    throw ParameterError("functional JSON needs a 'kind' field");
  const auto kind = j.at("kind").get<std::string>();
  const nlohmann::json params =
      j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (kind == "squared_l2") return PF::squared_l2();
  if (kind == "l1") return PF::l1();
  if (kind == "l2_norm") return PF::l2_norm();
  if (kind == "zero") return PF::zero();
  if (kind == "box")
    return PF::box(bounds_from_json(params.at("lo")),
                   bounds_from_json(params.at("hi")));
  if (kind == "box_support")
    return PF::box_support(bounds_from_json(params.at("lo")),
                           bounds_from_json(params.at("hi")));
  if (kind == "inf_ball") return PF::inf_ball(params.at("radius").get<double>());
  if (kind == "l2_ball") return PF::l2_ball(params.at("radius").get<double>());
  if (kind == "quadratic")
    return PF::quadratic(matrix_from_json(params.at("q")),
                         vector_from_json(params.at("c")),
                         params.value("offset", 0.0));
  if (kind == "scaled")
    return PF::scaled(params.at("alpha").get<double>(),
                      functional_from_json(params.at("inner")));
  if (kind == "shifted")
    return PF::shifted(vector_from_json(params.at("center")),
                       functional_from_json(params.at("inner")));
  if (kind == "tilted")
    return PF::tilted(vector_from_json(params.at("slope")),
                      functional_from_json(params.at("inner")));
  if (kind == "separable") {
    std::vector<PF> parts;
    for (const auto& p : params.at("parts")) parts.push_back(functional_from_json(p));
    return PF::separable(parts);
  }
  throw ParameterError("unknown functional kind '" + kind + "'");
}

}  // namespace proxkit

#include "proxkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proxkit/errors.hpp"
#include "proxkit/random.hpp"

namespace proxkit {

namespace {
constexpr std::uint64_t kPowerIterationSeed = 0x5eed'0f'9011ULL;
}

double inner(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw DimensionError("inner: operand sizes " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()) + " differ");
  }
  return x.dot(y);
}

double norm(const Vector& x) { return x.norm(); }

bool all_finite(const Vector& x) { return x.allFinite(); }

void require_dim(const Vector& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(n) + ", got " +
                         std::to_string(x.size()));
  }
}

LinearOperator::LinearOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0)
    throw DimensionError("LinearOperator: empty matrix");
  if (!m_.allFinite())
    throw ParameterError("LinearOperator: matrix has non-finite entries");
}

LinearOperator::LinearOperator(const LinearOperator& other)
    : m_(other.m_), norm_cache_(other.norm_cache_.load()) {}

LinearOperator& LinearOperator::operator=(const LinearOperator& other) {
  if (this != &other) {
    m_ = other.m_;
    norm_cache_.store(other.norm_cache_.load());
  }
  return *this;
}

LinearOperator LinearOperator::identity(Eigen::Index n) {
  LinearOperator id(Matrix::Identity(n, n));
  id.cache_norm(1.0);
  return id;
}

Vector LinearOperator::apply(const Vector& x) const {
  require_dim(x, m_.cols(), "LinearOperator::apply");
  return m_ * x;
}

Vector LinearOperator::adjoint_apply(const Vector& y) const {
  require_dim(y, m_.rows(), "LinearOperator::adjoint_apply");
  return m_.transpose() * y;
}

std::optional<double> LinearOperator::cached_norm() const {
  const double v = norm_cache_.load();
  if (v < 0.0) return std::nullopt;
  return v;
}

void LinearOperator::cache_norm(double estimate) const {
  norm_cache_.store(estimate);
}

NormEstimate op_norm(const LinearOperator& a, double tol,
                     std::size_t max_iter) {
  if (!(tol > 0.0)) throw ParameterError("op_norm: tol must be positive");
  if (auto cached = a.cached_norm()) return {*cached, true, 0};

  NormEstimate est;
  if (a.matrix().isZero(0.0)) {
    est.converged = true;
    a.cache_norm(0.0);
    return est;
  }

  Rng rng(kPowerIterationSeed);
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();

  double previous = 0.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    const Vector av = a.apply(v);
    const double sigma = av.norm();
    est.value = std::max(est.value, sigma);
    est.iterations = k;
    Vector w = a.adjoint_apply(av);
    const double wn = w.norm();
    if (wn == 0.0) {
      // v landed in the kernel; restart along a fresh direction.
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
      v.normalize();
      continue;
    }
    v = w / wn;
    if (k > 1 && std::abs(sigma - previous) <= tol * sigma) {
      est.converged = true;
      break;
    }
    previous = sigma;
  }
  if (est.converged) a.cache_norm(est.value);
  return est;
}

Vector solve_spd(const LinearOperator& m, const Vector& b, double tol,
                 std::size_t max_iter) {
  if (m.rows() != m.cols()) throw DimensionError("solve_spd: matrix not square");
  require_dim(b, m.rows(), "solve_spd");
  if (!(tol > 0.0)) throw ParameterError("solve_spd: tol must be positive");

  const double bnorm = b.norm();
  Vector x = Vector::Zero(b.size());
  if (bnorm == 0.0) return x;
  if (max_iter == 0) max_iter = 10 * static_cast<std::size_t>(b.size());

  const double target = tol * bnorm;
  const Matrix& mat = m.matrix();
  std::size_t iter = 0;
  // The recursive residual drifts from the true one, so restart from the
  // current iterate until the true residual meets the contract.
  while (iter < max_iter) {
    Vector r = b - mat * x;
    double rr = r.squaredNorm();
    if (std::sqrt(rr) <= target) return x;
    Vector p = r;
    while (iter < max_iter) {
      ++iter;
      const Vector mp = mat * p;
      const double curvature = p.dot(mp);
      if (!(curvature > 0.0)) {
        throw NumericalError(
            "solve_spd: nonpositive curvature at CG iteration " +
            std::to_string(iter) + " (matrix is not SPD)");
      }
      const double step = rr / curvature;
      x += step * p;
      r -= step * mp;
      const double rr_next = r.squaredNorm();
      if (std::sqrt(rr_next) <= target) break;
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
  }
  if ((b - mat * x).norm() <= target) return x;
  throw NumericalError("solve_spd: residual tolerance not reached in " +
                       std::to_string(max_iter) + " iterations");
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(std::move(row));
  }
  return j;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParameterError("vector JSON must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParameterError("matrix JSON must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DimensionError("matrix JSON rows have unequal lengths");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

}  // namespace proxkit

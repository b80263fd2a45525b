#pragma once

#include <atomic>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

namespace proxkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean inner product. Throws DimensionError on mismatched sizes.
double inner(const Vector& x, const Vector& y);
double norm(const Vector& x);
bool all_finite(const Vector& x);

// Throws DimensionError unless x has n entries; `what` names the operand.
void require_dim(const Vector& x, Eigen::Index n, const char* what);

/// Dense linear map X -> Y with adjoint application and a cached operator-norm
/// estimate. The cache is write-once-per-value: every writer stores the same
/// deterministic power-iteration result, so concurrent readers are safe.
class LinearOperator {
 public:
  explicit LinearOperator(Matrix m);
  LinearOperator(const LinearOperator& other);
  LinearOperator& operator=(const LinearOperator& other);

  static LinearOperator identity(Eigen::Index n);

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& y) const;

  std::optional<double> cached_norm() const;
  void cache_norm(double estimate) const;

 private:
  Matrix m_;
  mutable std::atomic<double> norm_cache_{-1.0};
};

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Largest singular value by power iteration on A*A from a fixed seeded start.
/// The returned value is the largest ||Av||/||v|| seen over all probes, so it
/// never exceeds the true norm. Converged results are cached on `a`.
NormEstimate op_norm(const LinearOperator& a, double tol = 1e-12,
                     std::size_t max_iter = 10000);

/// Conjugate gradients for symmetric positive definite `m`. Returns s with
/// ||m s - b|| <= tol ||b||; throws NumericalError on nonpositive curvature or
/// when the tolerance cannot be reached within max_iter (0 selects 10 n).
Vector solve_spd(const LinearOperator& m, const Vector& b, double tol,
                 std::size_t max_iter = 0);

// JSON: vectors are arrays, matrices are row-major arrays of rows.
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace proxkit

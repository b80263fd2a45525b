#include <cmath>
#include <thread>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/linalg.hpp"
#include "proxkit/random.hpp"

using namespace proxkit;

TEST_CASE("inner products") {
  Vector x(2), y(2);
  x << 1, 2;
  y << 3, 4;
  CHECK(inner(x, y) == 11.0);
  Vector v(2);
  v << 3, 4;
  CHECK(inner(v, v) == 25.0);
  CHECK(inner(v, Vector::Zero(2)) == 0.0);
  CHECK(norm(v) == 5.0);
  CHECK_THROWS_AS(inner(x, Vector::Zero(3)), DimensionError);
}

TEST_CASE("inner is symmetric and bilinear") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vector x = rng.normal_vector(7), y = rng.normal_vector(7), z = rng.normal_vector(7);
    const double a = rng.normal();
    CHECK(inner(x, y) == doctest::Approx(inner(y, x)).epsilon(1e-14));
    CHECK(inner(a * x + z, y) == doctest::Approx(a * inner(x, y) + inner(z, y)).epsilon(1e-12));
  }
}

TEST_CASE("op_norm examples") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1, 2, 3;
  const auto e = op_norm(LinearOperator(d), 1e-12);
  CHECK(e.converged);
  CHECK(std::abs(e.value - oracle::svd_norm(d)) <= 1e-9);

  CHECK(op_norm(LinearOperator::identity(6)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(op_norm(LinearOperator(2.0 * Matrix::Identity(4, 4))).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(LinearOperator(Matrix::Zero(3, 2))).value == 0.0);
}

TEST_CASE("op_norm agrees with the singular value decomposition") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.next_u64() % 50);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 50);
    const Matrix a = rng.normal_matrix(m, n);
    const LinearOperator op(a);
    const double est = op_norm(op).value;
    const double ref = oracle::svd_norm(a);
    CHECK(std::abs(est - ref) <= 1e-6 * ref);
    CHECK(est <= ref * (1 + 1e-12));
    REQUIRE(op.cached_norm().has_value());
    CHECK(*op.cached_norm() == est);
  }
}

TEST_CASE("norm cache is shared safely between threads") {
  Rng rng(5);
  const LinearOperator op(rng.normal_matrix(30, 20));
  std::vector<double> seen(4);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < seen.size(); ++i)
    pool.emplace_back([&, i] { seen[i] = op_norm(op).value; });
  for (auto& t : pool) t.join();
  for (double s : seen) CHECK(s == seen[0]);
}

TEST_CASE("adjoint consistency") {
  Rng rng(7);
  const LinearOperator a(rng.normal_matrix(9, 6));
  for (int t = 0; t < 100; ++t) {
    const Vector x = rng.normal_vector(6), y = rng.normal_vector(9);
    const double lhs = inner(a.apply(x), y);
    const double rhs = inner(x, a.adjoint_apply(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + norm(x) * norm(y)));
  }
  CHECK_THROWS_AS(a.apply(Vector::Zero(9)), DimensionError);
  CHECK_THROWS_AS(a.adjoint_apply(Vector::Zero(6)), DimensionError);
}

TEST_CASE("solve_spd examples") {
  Vector b(2);
  b << 1, 2;
  CHECK((solve_spd(LinearOperator::identity(2), b, 1e-12) - b).norm() <= 1e-12);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2, 4;
  Vector rhs(2);
  rhs << 2, 4;
  const Vector s = solve_spd(LinearOperator(d), rhs, 1e-12);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("solve_spd matches a dense factorization") {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const Matrix m0 = rng.normal_matrix(5, 5);
    const Matrix m = m0.transpose() * m0 + 0.1 * Matrix::Identity(5, 5);
    const Vector b = rng.normal_vector(5);
    const Vector s = solve_spd(LinearOperator(m), b, 1e-12);
    CHECK((s - oracle::dense_solve(m, b)).norm() <= 1e-8 * std::max(1.0, s.norm()));
    CHECK((m * s - b).norm() <= 1e-12 * b.norm());
  }
}

TEST_CASE("solve_spd detects negative curvature") {
  Matrix m = Matrix::Identity(3, 3);
  m(1, 1) = -1.0;
  Vector b = Vector::Ones(3);
  CHECK_THROWS_AS(solve_spd(LinearOperator(m), b, 1e-10), NumericalError);
}

TEST_CASE("json round trip") {
  Rng rng(1);
  const Matrix m = rng.normal_matrix(3, 4);
  CHECK(matrix_from_json(to_json(m)) == m);
  const Vector v = rng.normal_vector(5);
  CHECK(vector_from_json(to_json(v)) == v);
  CHECK(to_json(m)[1][2].get<double>() == m(1, 2));
}

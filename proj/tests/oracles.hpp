#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "proxkit/functionals.hpp"
#include "proxkit/linalg.hpp"
#include "proxkit/random.hpp"

namespace oracle {

using proxkit::Matrix;
using proxkit::Vector;
using Real = long double;

inline constexpr Real kInfL = std::numeric_limits<Real>::infinity();

// Golden-section minimization of a unimodal function on [lo, hi] in long
// double.
inline Real golden_section(const std::function<Real(Real)>& f, Real lo, Real hi,
                           int iters = 200) {
  const Real r = (std::sqrt(Real(5)) - 1) / 2;
  Real a = lo, b = hi;
  Real c = b - r * (b - a), d = a + r * (b - a);
  Real fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 0; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

// Scalar convex function with an explicit effective domain [lo, hi].
struct Scalar {
  std::string label;
  proxkit::ProxFunctional f;  // the N = 1 library object
  std::function<Real(Real)> value;
  Real lo = -kInfL;
  Real hi = kInfL;
};

// argmin_z 1/2 (z - t)^2 + gamma f(z) by golden section over the domain.
inline double scalar_prox(const Scalar& s, double gamma, double t) {
  const Real width = 20 + 20 * Real(gamma) + std::abs(Real(t));
  const Real lo = std::max<Real>(s.lo, t - width);
  const Real hi = std::min<Real>(s.hi, t + width);
  if (lo >= hi) return static_cast<double>(lo);
  auto obj = [&](Real z) { return (z - t) * (z - t) / 2 + Real(gamma) * s.value(z); };
  return static_cast<double>(golden_section(obj, lo, hi));
}

// Every scalar catalog kind, plus composites that stay scalar.
inline std::vector<Scalar> scalar_catalog() {
  using proxkit::ProxFunctional;
  const Vector c = Vector::Constant(1, 0.7);
  Matrix q(1, 1);
  q << 2.5;
  return {
      {"squared_l2", ProxFunctional::squared_l2(), [](Real z) { return z * z / 2; }},
      {"l1", ProxFunctional::l1(), [](Real z) { return std::abs(z); }},
      {"l2_norm", ProxFunctional::l2_norm(), [](Real z) { return std::abs(z); }},
      {"zero", ProxFunctional::zero(), [](Real) { return Real(0); }},
      {"box", ProxFunctional::box(-1.0, 2.0), [](Real) { return Real(0); }, -1, 2},
      {"box_support", ProxFunctional::box_support(Vector::Constant(1, -1.5), Vector::Constant(1, 0.5)),
       [](Real z) { return std::max(Real(-1.5) * z, Real(0.5) * z); }},
      {"inf_ball", ProxFunctional::inf_ball(0.8), [](Real) { return Real(0); }, -0.8L, 0.8L},
      {"l2_ball", ProxFunctional::l2_ball(1.3), [](Real) { return Real(0); }, -1.3L, 1.3L},
      {"quadratic", ProxFunctional::quadratic(q, Vector::Constant(1, -0.4), 0.2),
       [](Real z) { return Real(1.25) * z * z + Real(0.4) * z + Real(0.2); }},
      {"scaled_l1", ProxFunctional::scaled(2.5, ProxFunctional::l1()),
       [](Real z) { return Real(2.5) * std::abs(z); }},
      {"scaled_squared_l2", ProxFunctional::scaled(0.3, ProxFunctional::squared_l2()),
       [](Real z) { return Real(0.15) * z * z; }},
      {"scaled_l2_norm", ProxFunctional::scaled(1.7, ProxFunctional::l2_norm()),
       [](Real z) { return Real(1.7) * std::abs(z); }},
      {"shifted_l1", ProxFunctional::shifted(c, ProxFunctional::l1()),
       [](Real z) { return std::abs(z - Real(0.7)); }},
      {"tilted_l1", ProxFunctional::tilted(c, ProxFunctional::l1()),
       [](Real z) { return std::abs(z) + Real(0.7) * z; }},
      {"separable_l1", ProxFunctional::separable({ProxFunctional::l1()}),
       [](Real z) { return std::abs(z); }},
  };
}

// Vector catalog used by the decomposition, envelope and DR checks.
inline std::vector<std::pair<std::string, proxkit::ProxFunctional>> vector_catalog(
    proxkit::Rng& rng, Eigen::Index n) {
  using proxkit::ProxFunctional;
  Vector lo = -rng.normal_vector(n).cwiseAbs() - Vector::Constant(n, 0.1);
  Vector hi = rng.normal_vector(n).cwiseAbs() + Vector::Constant(n, 0.1);
  const Matrix m = rng.normal_matrix(n, n);
  Matrix q = m.transpose() * m / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n);
  q = 0.5 * (q + q.transpose());
  const Vector c = rng.normal_vector(n);
  std::vector<ProxFunctional> parts;
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (i % 4) {
      case 0: parts.push_back(ProxFunctional::l1()); break;
      case 1: parts.push_back(ProxFunctional::box(-0.5, 1.0)); break;
      case 2: parts.push_back(ProxFunctional::scaled(2.0, ProxFunctional::squared_l2())); break;
      default: parts.push_back(ProxFunctional::inf_ball(0.3)); break;
    }
  }
  return {
      {"squared_l2", ProxFunctional::squared_l2()},
      {"l1", ProxFunctional::l1()},
      {"l2_norm", ProxFunctional::l2_norm()},
      {"zero", ProxFunctional::zero()},
      {"box", ProxFunctional::box(lo, hi)},
      {"box_one_sided", ProxFunctional::box(Vector::Constant(n, 0.0),
                                            Vector::Constant(n, std::numeric_limits<double>::infinity()))},
      {"box_support", ProxFunctional::box_support(lo, hi)},
      {"inf_ball", ProxFunctional::inf_ball(0.7)},
      {"l2_ball", ProxFunctional::l2_ball(1.3)},
      {"quadratic", ProxFunctional::quadratic(q, c, 0.25)},
      {"scaled_l1", ProxFunctional::scaled(2.5, ProxFunctional::l1())},
      {"scaled_squared_l2", ProxFunctional::scaled(0.4, ProxFunctional::squared_l2())},
      {"scaled_l2_norm", ProxFunctional::scaled(1.5, ProxFunctional::l2_norm())},
      {"shifted_l1", ProxFunctional::shifted(c, ProxFunctional::l1())},
      {"shifted_box", ProxFunctional::shifted(c, ProxFunctional::box(lo, hi))},
      {"tilted_l2_norm", ProxFunctional::tilted(c, ProxFunctional::l2_norm())},
      {"separable", ProxFunctional::separable(parts)},
  };
}

inline double svd_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline Vector dense_solve(const Matrix& m, const Vector& b) {
  return m.fullPivLu().solve(b);
}

// sup_z t z - f(z) over a grid, refined around the best grid point.
inline double grid_conjugate(const std::function<double(double)>& f, double t,
                             double lo, double hi, int points = 20001) {
  double best_z = lo;
  double best = -std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double z = lo + h * i;
    const double v = t * z - f(z);
    if (v > best) {
      best = v;
      best_z = z;
    }
  }
  // Concave in z: golden section on the bracketing cells.
  auto neg = [&](Real z) { return -(Real(t) * z - Real(f(static_cast<double>(z)))); };
  const Real z = golden_section(neg, best_z - h, best_z + h);
  return std::max(best, t * static_cast<double>(z) - f(static_cast<double>(z)));
}

}  // namespace oracle

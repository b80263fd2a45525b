#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "proxkit/linalg.hpp"

namespace proxkit {

class ProxFunctional;
using FunctionalPtr = std::shared_ptr<const ProxFunctional>;

/// Catalog entries. Every kind is proper, convex and lsc on R^N and has a
/// closed-form prox; the catalog is closed under Fenchel conjugation.
namespace kinds {

struct SquaredL2 {};  // (1/2)||x||^2
struct L1 {};         // ||x||_1
struct L2Norm {};     // ||x||_2
struct Zero {};       // 0

// Indicator of {lo <= x <= hi}. Bounds may be infinite; a single-entry bound
// vector is broadcast over all coordinates.
struct BoxIndicator {
  Vector lo, hi;
};

// Support function of the box [lo, hi], i.e. the conjugate of BoxIndicator.
struct BoxSupport {
  Vector lo, hi;
};

struct InfBallIndicator {  // ||x||_inf <= radius
  double radius;
};

struct L2BallIndicator {  // ||x||_2 <= radius
  double radius;
};

// (1/2) x'Qx - c'x + offset with Q symmetric positive semidefinite.
struct Quadratic {
  Matrix q;
  Vector c;
  double offset;
};

struct Scaled {  // alpha * inner(x)
  double alpha;
  FunctionalPtr inner;
};

struct Shifted {  // inner(x - center)
  Vector center;
  FunctionalPtr inner;
};

struct Tilted {  // inner(x) + <slope, x>
  Vector slope;
  FunctionalPtr inner;
};

struct SeparableSum {  // sum_i parts[i](x_i)
  std::vector<FunctionalPtr> parts;
};

}  // namespace kinds

class ProxFunctional {
 public:
  using Kind =
      std::variant<kinds::SquaredL2, kinds::L1, kinds::L2Norm, kinds::Zero,
                   kinds::BoxIndicator, kinds::BoxSupport,
                   kinds::InfBallIndicator, kinds::L2BallIndicator,
                   kinds::Quadratic, kinds::Scaled, kinds::Shifted,
                   kinds::Tilted, kinds::SeparableSum>;

  static ProxFunctional squared_l2();
  static ProxFunctional l1();
  static ProxFunctional l2_norm();
  static ProxFunctional zero();
  static ProxFunctional box(double lo, double hi);
  static ProxFunctional box(Vector lo, Vector hi);
  static ProxFunctional box_support(Vector lo, Vector hi);
  static ProxFunctional inf_ball(double radius);
  static ProxFunctional l2_ball(double radius);
  static ProxFunctional quadratic(Matrix q, Vector c, double offset = 0.0);

  // The combinators normalize: scaling is absorbed by indicators and pushed
  // through shifts, tilts and separable sums, so that only SquaredL2, L1 and
  // L2Norm ever appear under a Scaled node.
  static ProxFunctional scaled(double alpha, const ProxFunctional& f);
  static ProxFunctional shifted(Vector center, const ProxFunctional& f);
  static ProxFunctional tilted(Vector slope, const ProxFunctional& f);
  static ProxFunctional separable(const std::vector<ProxFunctional>& parts);

  const Kind& kind() const { return kind_; }

  /// Kind tag as used in the JSON schema ("squared_l2", "l1", ...).
  std::string name() const;

  /// Fixed dimension if the functional carries per-coordinate data.
  std::optional<Eigen::Index> dim() const;

 private:
  explicit ProxFunctional(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// F(x); +inf outside the effective domain.
double value(const ProxFunctional& f, const Vector& x);

/// argmin_z (1/2)||z - x||^2 + gamma F(z). Throws ParameterError for gamma <= 0.
Vector prox(const ProxFunctional& f, double gamma, const Vector& x);

/// Catalog entry for F*.
ProxFunctional conjugate(const ProxFunctional& f);

/// prox of gamma F*, computed from F's own prox:
///   x - gamma prox_{F/gamma}(x/gamma).
Vector prox_conjugate(const ProxFunctional& f, double gamma, const Vector& x);

/// F_gamma(x) = ||prox - x||^2 / (2 gamma) + F(prox).
double moreau_envelope(const ProxFunctional& f, double gamma, const Vector& x);

/// (x - prox_{gamma F}(x)) / gamma, the gradient of the Moreau envelope.
Vector yosida(const ProxFunctional& f, double gamma, const Vector& x);

/// F(x) + F*(xstar) - <xstar, x>, clamped at zero against roundoff.
double fenchel_young_gap(const ProxFunctional& f, const Vector& x,
                         const Vector& xstar);

/// Minimizer of F + (gamma/2)||.||^2 obtained from the Yosida approximation of
/// dF* at zero: -(1/gamma) prox_{gamma F*}(0). Needs a fixed dimension or `n`.
Vector regularized_minimizer(const ProxFunctional& f, double gamma,
                             Eigen::Index n);

/// Same kind tree with parameters equal up to rel_tol (0 means exact).
bool structurally_equal(const ProxFunctional& a, const ProxFunctional& b,
                        double rel_tol = 0.0);

// Extended-real arithmetic on (-inf, +inf]. inf - inf raises NumericalError.
double ext_add(double a, double b);
double ext_sub(double a, double b);

nlohmann::json to_json(const ProxFunctional& f);
ProxFunctional functional_from_json(const nlohmann::json& j);

// Bound vectors with infinite entries written as "inf" / "-inf".
nlohmann::json bounds_to_json(const Vector& v);
Vector bounds_from_json(const nlohmann::json& j);

}  // namespace proxkit

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace proxkit {

struct ScalarPiece {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Piecewise continuously differentiable scalar function given as a continuous
/// selection of C^1 pieces.
///
/// `breakpoints` (sorted, strictly increasing) cut the line into
/// breakpoints.size() + 1 open intervals; `owners[j]` is the piece governing
/// interval j. Pieces that never own an interval may still be listed; they are
/// active where they touch the selection but never essentially active.
class ScalarPC1 {
 public:
  ScalarPC1(std::vector<ScalarPiece> pieces, std::vector<double> breakpoints,
            std::vector<std::size_t> owners, double continuity_tol = 1e-12);

  double operator()(double t) const;

  const std::vector<ScalarPiece>& pieces() const { return pieces_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::size_t>& owners() const { return owners_; }

  // Index of the interval containing t (t on a breakpoint belongs to the
  // interval on its right).
  std::size_t interval_of(double t) const;

  static ScalarPC1 abs();

 private:
  std::vector<ScalarPiece> pieces_;
  std::vector<double> breakpoints_;
  std::vector<std::size_t> owners_;
};

struct ClosedInterval {
  double lo;
  double hi;
};

/// Clarke subdifferential at t: the hull of derivatives of the essentially
/// active pieces. A breakpoint within eps of t is treated as t itself; two
/// breakpoints within eps raise NumericalError.
ClosedInterval clarke_interval(const ScalarPC1& f, double t, double eps);

}  // namespace proxkit

#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "proxkit/linalg.hpp"

namespace proxkit {

/// One iteration of a solver run. Columns that a solver cannot compute are NaN.
struct TraceRow {
  std::size_t iter = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double step = std::numeric_limits<double>::quiet_NaN();
  double ms = 0.0;
  // Regularization parameter; only set by continuation runs.
  double gamma = std::numeric_limits<double>::quiet_NaN();
};

/// Per-run record. Row 0 describes the starting point.
struct IterTrace {
  std::vector<TraceRow> rows;
  // ||x^k - x_ref|| for k = 0, 1, ... when a reference solution is supplied.
  std::vector<double> fejer;
  // x^0, x^1, ... when iterate recording is requested.
  std::vector<Vector> iterates;
  // FISTA extrapolation sequence tau_0, tau_1, ...
  std::vector<double> tau;
  // Newton runs: condition estimate of each solved system.
  std::vector<double> condition;

  std::vector<double> objectives() const;

  /// CSV with header iter,objective,residual,gap,step,ms (plus gamma when any
  /// row carries one). Values use 17 significant digits.
  void write_csv(std::ostream& os) const;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Appends iterate bookkeeping shared by every solver.
void record_point(IterTrace& trace, const Vector& x, bool keep_iterate,
                  const std::optional<Vector>& reference);

}  // namespace proxkit

#include "proxkit/scalar_pc1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "proxkit/errors.hpp"

namespace proxkit {

ScalarPC1::ScalarPC1(std::vector<ScalarPiece> pieces,
                     std::vector<double> breakpoints,
                     std::vector<std::size_t> owners, double continuity_tol)
    : pieces_(std::move(pieces)),
      breakpoints_(std::move(breakpoints)),
      owners_(std::move(owners)) {
  if (pieces_.empty()) throw ParameterError("ScalarPC1: no pieces");
  if (owners_.size() != breakpoints_.size() + 1)
    throw DimensionError("ScalarPC1: need one owner per interval");
  for (std::size_t j = 1; j < breakpoints_.size(); ++j)
    if (!(breakpoints_[j - 1] < breakpoints_[j]))
      throw ParameterError("ScalarPC1: breakpoints must be strictly increasing");
  for (auto o : owners_)
    if (o >= pieces_.size()) throw ParameterError("ScalarPC1: owner out of range");
  for (const auto& p : pieces_)
    if (!p.value || !p.derivative)
      throw ParameterError("ScalarPC1: piece without value or derivative");
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double b = breakpoints_[j];
    const double left = pieces_[owners_[j]].value(b);
    const double right = pieces_[owners_[j + 1]].value(b);
    if (std::abs(left - right) > continuity_tol * (1.0 + std::abs(left)))
      throw ParameterError("ScalarPC1: selection is discontinuous at " +
                           std::to_string(b));
  }
}

std::size_t ScalarPC1::interval_of(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
      breakpoints_.begin());
}

double ScalarPC1::operator()(double t) const {
  return pieces_[owners_[interval_of(t)]].value(t);
}

ScalarPC1 ScalarPC1::abs() {
  std::vector<ScalarPiece> pieces{
      {[](double t) { return -t; }, [](double) { return -1.0; }},
      {[](double t) { return t; }, [](double) { return 1.0; }},
  };
  return ScalarPC1(std::move(pieces), {0.0}, {0, 1});
}

ClosedInterval clarke_interval(const ScalarPC1& f, double t, double eps) {
  if (!(eps > 0.0)) throw ParameterError("clarke_interval: eps must be positive");
  const auto& bps = f.breakpoints();
  const auto first = std::lower_bound(bps.begin(), bps.end(), t - eps);
  const auto last = std::upper_bound(bps.begin(), bps.end(), t + eps);
  const auto near = last - first;
  if (near > 1)
    throw NumericalError(
        "clarke_interval: two breakpoints within eps of t; refine eps");

  std::vector<std::size_t> essential;
  if (near == 1) {
    const auto j = static_cast<std::size_t>(first - bps.begin());
    essential = {f.owners()[j], f.owners()[j + 1]};
  } else {
    essential = {f.owners()[f.interval_of(t)]};
  }

  ClosedInterval out{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
  for (auto idx : essential) {
    const double d = f.pieces()[idx].derivative(t);
    out.lo = std::min(out.lo, d);
    out.hi = std::max(out.hi, d);
  }
  return out;
}

}  // namespace proxkit

#include "proxkit/trace.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace proxkit {

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> IterTrace::objectives() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.objective);
  return out;
}

void IterTrace::write_csv(std::ostream& os) const {
  bool with_gamma = false;
  for (const auto& r : rows) with_gamma = with_gamma || !std::isnan(r.gamma);
  os << "iter,objective,residual,gap,step,ms";
  if (with_gamma) os << ",gamma";
  os << '\n';
  for (const auto& r : rows) {
    os << r.iter << ',' << format_value(r.objective) << ','
       << format_value(r.residual) << ',' << format_value(r.gap) << ','
       << format_value(r.step) << ',' << format_value(r.ms);
    if (with_gamma) os << ',' << format_value(r.gamma);
    os << '\n';
  }
}

void record_point(IterTrace& trace, const Vector& x, bool keep_iterate,
                  const std::optional<Vector>& reference) {
  if (keep_iterate) trace.iterates.push_back(x);
  if (reference) trace.fejer.push_back((x - *reference).norm());
}

}  // namespace proxkit

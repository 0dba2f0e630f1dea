#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace dtlab {

Grid Grid::interval(double lo, double hi, int n_interior) {
  require(hi > lo, Err::InvalidArgument, "interval must have positive length");
  require(n_interior >= 1, Err::InvalidArgument, "need at least one interior node");
  Grid g;
  g.dim = 1;
  g.lo[0] = lo;
  g.hi[0] = hi;
  g.N[0] = n_interior;
  g.h[0] = (hi - lo) / (n_interior + 1);
  return g;
}

Grid Grid::rectangle(double lo0, double hi0, int n0, double lo1, double hi1, int n1) {
  require(hi0 > lo0 && hi1 > lo1, Err::InvalidArgument, "rectangle must have positive extent");
  require(n0 >= 1 && n1 >= 1, Err::InvalidArgument, "need at least one interior node per axis");
  Grid g;
  g.dim = 2;
  g.lo = {lo0, lo1};
  g.hi = {hi0, hi1};
  g.N = {n0, n1};
  g.h = {(hi0 - lo0) / (n0 + 1), (hi1 - lo1) / (n1 + 1)};
  return g;
}

bool Grid::same_layout(const Grid& o) const {
  return dim == o.dim && lo == o.lo && hi == o.hi && N == o.N;
}

Field Field::zeros(const Grid& g, double t) {
  Field f;
  f.t = t;
  f.v.assign(g.total(), 0.0);
  return f;
}

Field Field::constant(const Grid& g, double value, double t) {
  Field f;
  f.t = t;
  f.v.assign(g.total(), value);
  return f;
}

double Field::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

double Field::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool Field::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double max_abs_diff(const Field& a, const Field& b) {
  require(a.v.size() == b.v.size(), Err::InvalidArgument, "fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
  return m;
}

std::size_t Trajectory::row_at_or_after(double t) const {
  const auto it = std::lower_bound(summary.begin(), summary.end(), t,
                                   [](const SummaryRow& r, double x) { return r.t < x; });
  if (it == summary.end()) return summary.empty() ? 0 : summary.size() - 1;
  return static_cast<std::size_t>(it - summary.begin());
}

}  // namespace dtlab

#pragma once

#include <cstdint>
#include <vector>

#include "core/linalg.hpp"

namespace dtlab {

// Uniform tensor grid on an interval or rectangle, interior points plus a
// one-node Dirichlet boundary ring. Node i along an axis sits at
// lo + i*h for i = 0..N+1, so h = (hi-lo)/(N+1).
struct Grid {
  int dim = 1;
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  std::array<int, 2> N{};  // interior node counts
  std::array<double, 2> h{};

  static Grid interval(double lo, double hi, int n_interior);
  static Grid rectangle(double lo0, double hi0, int n0, double lo1, double hi1, int n1);

  int nx() const { return N[0] + 2; }
  int ny() const { return dim == 2 ? N[1] + 2 : 1; }
  std::size_t total() const { return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()); }
  std::size_t at(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny()) + static_cast<std::size_t>(j);
  }
  double coord(int axis, int idx) const {
    return lo[static_cast<std::size_t>(axis)] + h[static_cast<std::size_t>(axis)] * idx;
  }
  Vec point(int i, int j = 0) const {
    Vec p(dim);
    p[0] = coord(0, i);
    if (dim == 2) p[1] = coord(1, j);
    return p;
  }
  bool on_boundary(int i, int j = 0) const {
    if (i == 0 || i == N[0] + 1) return true;
    return dim == 2 && (j == 0 || j == N[1] + 1);
  }
  double cell_volume() const { return dim == 2 ? h[0] * h[1] : h[0]; }
  bool same_layout(const Grid& o) const;
};

// Node values over the closed grid (boundary ring included) at one time.
struct Field {
  double t = 0.0;
  std::vector<double> v;

  static Field zeros(const Grid& g, double t = 0.0);
  static Field constant(const Grid& g, double value, double t = 0.0);

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;
};

// L-infinity distance between two fields on the same grid.
double max_abs_diff(const Field& a, const Field& b);

// Per-time extrema over the closed domain.
struct SummaryRow {
  double t = 0.0;
  double umax = 0.0;
  double umin = 0.0;
  double osc() const { return umax - umin; }
};

// Time-ordered record of a solve: every step's extrema, a subset of full
// fields, and the initial extrema over the closure.
struct Trajectory {
  Grid grid;
  double u_star = 0.0;
  double m_star = 0.0;  // min of u(.,0) over the closure
  double M_star = 0.0;  // max of u(.,0) over the closure
  std::uint64_t coeff_signature = 0;
  std::vector<SummaryRow> summary;       // one row per step, t ascending
  std::vector<Field> fields;             // recorded snapshots
  std::vector<std::size_t> field_steps;  // step index of each snapshot

  double t_end() const { return summary.empty() ? 0.0 : summary.back().t; }
  // Index of the first summary row with time >= t (last row if none).
  std::size_t row_at_or_after(double t) const;
};

}  // namespace dtlab

#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/parallel.hpp"

namespace dtlab {

namespace {

constexpr std::size_t kMaxSteps = 400000000;

std::size_t interior_count(const Grid& g) {
  return static_cast<std::size_t>(g.N[0]) * static_cast<std::size_t>(g.dim == 2 ? g.N[1] : 1);
}

// Diffusion samples per interior node (off-diagonal symmetrized).
struct DiffusionCoeffs {
  std::vector<double> a11, a22, a12;
};

// Flux samples per interior node: K entries row-major and B components.
struct FluxCoeffs {
  std::vector<double> k;  // dim*dim per node; empty when identically zero
  std::vector<double> b1, b2;
  bool k_zero = true;
  bool b_zero = true;
};

void check_mixed_admissible(double a11, double a22, double a12, const Grid& g, int i, int j) {
  const double lim = std::min(a11 * g.h[1] / g.h[0], a22 * g.h[0] / g.h[1]);
  if (std::fabs(a12) > lim * (1.0 + 1e-12))
    fail(Err::Monotonicity,
         "mixed-derivative coefficient breaks the positive-type stencil at node (" +
             std::to_string(i) + "," + std::to_string(j) + "): |a12| = " +
             std::to_string(std::fabs(a12)) + " > " + std::to_string(lim));
}

DiffusionCoeffs sample_diffusion(const std::function<Mat(const Vec&, double)>& a_fn, const Grid& g,
                                 double t) {
  DiffusionCoeffs dc;
  const std::size_t n = interior_count(g);
  dc.a11.resize(n);
  if (g.dim == 2) {
    dc.a22.resize(n);
    dc.a12.resize(n);
  }
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  std::size_t idx = 0;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const Mat a = a_fn(g.point(i, j), t).sym_part();
      require(a.n == g.dim, Err::InvalidArgument, "diffusion matrix dimension mismatch");
      dc.a11[idx] = a(0, 0);
      if (g.dim == 2) {
        dc.a22[idx] = a(1, 1);
        dc.a12[idx] = a(0, 1);
        check_mixed_admissible(dc.a11[idx], dc.a22[idx], dc.a12[idx], g, i, j);
      }
    }
  return dc;
}

FluxCoeffs sample_flux(const std::function<Mat(const Vec&, double)>& k_fn,
                       const std::function<Vec(const Vec&, double)>& b_fn, const Grid& g,
                       double t) {
  FluxCoeffs fc;
  const std::size_t n = interior_count(g);
  const std::size_t kd = static_cast<std::size_t>(g.dim) * static_cast<std::size_t>(g.dim);
  fc.k.assign(n * kd, 0.0);
  fc.b1.assign(n, 0.0);
  if (g.dim == 2) fc.b2.assign(n, 0.0);
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  std::size_t idx = 0;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const Vec x = g.point(i, j);
      const Mat kk = k_fn(x, t);
      require(kk.n == g.dim, Err::InvalidArgument, "flux matrix dimension mismatch");
      for (int r = 0; r < g.dim; ++r)
        for (int s = 0; s < g.dim; ++s) {
          const double v = kk(r, s);
          fc.k[idx * kd + static_cast<std::size_t>(r * g.dim + s)] = v;
          if (v != 0.0) fc.k_zero = false;
        }
      const Vec bb = b_fn(x, t);
      require(bb.n == g.dim, Err::InvalidArgument, "transport vector dimension mismatch");
      fc.b1[idx] = bb[0];
      if (bb[0] != 0.0) fc.b_zero = false;
      if (g.dim == 2) {
        fc.b2[idx] = bb[1];
        if (bb[1] != 0.0) fc.b_zero = false;
      }
    }
  if (fc.k_zero) fc.k.clear();
  return fc;
}

// Frozen first-order coefficient bhat = u B + P'(u) K grad u, centered
// gradient inside the nonlinear factor. The P' factor is skipped when
// K grad u vanishes, so laws with P' blowing up at a domain edge stay
// usable as long as the flux term is inactive there.
void bhat_from_state(const Field& u, const FluxCoeffs& fc, const StateLaw& law, const Grid& g,
                     std::vector<double>& bh1, std::vector<double>& bh2) {
  const std::size_t n = interior_count(g);
  bh1.assign(n, 0.0);
  if (g.dim == 2) bh2.assign(n, 0.0);
  if (fc.k_zero && fc.b_zero) return;
  const int ny = g.ny();
  const std::size_t kd = static_cast<std::size_t>(g.dim) * static_cast<std::size_t>(g.dim);
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  const double inv2h1 = 0.5 / g.h[0];
  const double inv2h2 = g.dim == 2 ? 0.5 / g.h[1] : 0.0;
  std::size_t idx = 0;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const std::size_t c = static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
                            static_cast<std::size_t>(j);
      const double u0 = u.v[c];
      double b1 = 0.0, b2 = 0.0;
      if (!fc.b_zero) {
        b1 = u0 * fc.b1[idx];
        if (g.dim == 2) b2 = u0 * fc.b2[idx];
      }
      if (!fc.k_zero) {
        const double g1 = (u.v[c + static_cast<std::size_t>(ny)] -
                           u.v[c - static_cast<std::size_t>(ny)]) * inv2h1;
        const double g2 = g.dim == 2 ? (u.v[c + 1] - u.v[c - 1]) * inv2h2 : 0.0;
        const double* kk = &fc.k[idx * kd];
        double kg1, kg2 = 0.0;
        if (g.dim == 2) {
          kg1 = kk[0] * g1 + kk[1] * g2;
          kg2 = kk[2] * g1 + kk[3] * g2;
        } else {
          kg1 = kk[0] * g1;
        }
        if (kg1 != 0.0 || kg2 != 0.0) {
          const double pp = law.pprime(u0);
          b1 += pp * kg1;
          if (g.dim == 2) b2 += pp * kg2;
        }
      }
      bh1[idx] = b1;
      if (g.dim == 2) bh2[idx] = b2;
    }
}

void bhat_from_callable(const std::function<Vec(const Vec&, double)>& b_fn, const Grid& g, double t,
                        std::vector<double>& bh1, std::vector<double>& bh2) {
  const std::size_t n = interior_count(g);
  bh1.assign(n, 0.0);
  if (g.dim == 2) bh2.assign(n, 0.0);
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  std::size_t idx = 0;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const Vec bb = b_fn(g.point(i, j), t);
      require(bb.n == g.dim, Err::InvalidArgument, "drift dimension mismatch");
      bh1[idx] = bb[0];
      if (g.dim == 2) bh2[idx] = bb[1];
    }
}

// Spec'd explicit-step denominator: sum_i 2|a_ii|/h_i^2 + |a12|/(h1 h2)
// + sum_i |bhat_i|/h_i. An upper bound for the scheme's center load, so
// dt = safety/denominator keeps every update weight nonnegative.
double max_center_load(const DiffusionCoeffs& dc, const std::vector<double>& bh1,
                       const std::vector<double>& bh2, const Grid& g) {
  const std::size_t n = dc.a11.size();
  const double ih1s = 1.0 / (g.h[0] * g.h[0]);
  const double ih2s = g.dim == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
  const double ih12 = g.dim == 2 ? 1.0 / (g.h[0] * g.h[1]) : 0.0;
  double load = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    double d = 2.0 * std::fabs(dc.a11[idx]) * ih1s;
    if (g.dim == 2)
      d += 2.0 * std::fabs(dc.a22[idx]) * ih2s + std::fabs(dc.a12[idx]) * ih12;
    if (!bh1.empty()) d += std::fabs(bh1[idx]) / g.h[0];
    if (g.dim == 2 && !bh2.empty()) d += std::fabs(bh2[idx]) / g.h[1];
    load = std::max(load, d);
  }
  return load;
}

// Discrete spatial operator <A, D2 u> - bhat . grad u at one interior node.
// Second differences and the sign-keyed 7-point mixed stencil are written
// as differences of differences, so constant fields map to exact zero.
// First-order terms switch from centered to upwind exactly when the
// centered weight would break positivity.
inline double cell_op(const double* u, std::size_t c, std::size_t sx, const DiffusionCoeffs& dc,
                      const std::vector<double>& bh1, const std::vector<double>& bh2,
                      std::size_t idx, const Grid& g) {
  const double u0 = u[c];
  const double uE = u[c + sx], uW = u[c - sx];
  const double h1 = g.h[0];
  double val = dc.a11[idx] * ((uE - u0) - (u0 - uW)) / (h1 * h1);
  double slack1 = dc.a11[idx] / (h1 * h1);
  double slack2 = 0.0;
  if (g.dim == 2) {
    const double h2 = g.h[1];
    const double uN = u[c + 1], uS = u[c - 1];
    val += dc.a22[idx] * ((uN - u0) - (u0 - uS)) / (h2 * h2);
    slack2 = dc.a22[idx] / (h2 * h2);
    const double a12 = dc.a12[idx];
    if (a12 != 0.0) {
      const double ih12 = 1.0 / (h1 * h2);
      if (a12 > 0.0) {
        const double uNE = u[c + sx + 1], uSW = u[c - sx - 1];
        val += a12 * (((uNE - uE) - (uN - u0)) + ((uSW - uW) - (uS - u0))) * ih12;
      } else {
        const double uSE = u[c + sx - 1], uNW = u[c - sx + 1];
        val += (-a12) * (((uSE - uE) - (uS - u0)) + ((uNW - uW) - (uN - u0))) * ih12;
      }
      slack1 -= std::fabs(a12) * ih12;
      slack2 -= std::fabs(a12) * ih12;
    }
    if (!bh2.empty()) {
      const double b2 = bh2[idx];
      if (b2 != 0.0) {
        if (std::fabs(b2) * 0.5 / h2 <= slack2)
          val -= b2 * (uN - uS) * 0.5 / h2;
        else if (b2 > 0.0)
          val -= b2 * (u0 - uS) / h2;
        else
          val -= b2 * (uN - u0) / h2;
      }
    }
  }
  if (!bh1.empty()) {
    const double b1 = bh1[idx];
    if (b1 != 0.0) {
      if (std::fabs(b1) * 0.5 / h1 <= slack1)
        val -= b1 * (uE - uW) * 0.5 / h1;
      else if (b1 > 0.0)
        val -= b1 * (u0 - uW) / h1;
      else
        val -= b1 * (uE - u0) / h1;
    }
  }
  return val;
}

// out = state + dt * op(state) on the interior; ring carries bc_value.
Field apply_step(const Field& state, const DiffusionCoeffs& dc, const std::vector<double>& bh1,
                 const std::vector<double>& bh2, const Grid& g, double dt, double bc_value) {
  Field out;
  out.t = state.t;
  out.v.assign(g.total(), bc_value);
  const double* u = state.v.data();
  double* w = out.v.data();
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  const std::size_t rows = static_cast<std::size_t>(g.N[0]);
  parallel_for(rows, [&](std::size_t r) {
    const int i = static_cast<int>(r) + 1;
    std::size_t idx = r * static_cast<std::size_t>(jmax);
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const std::size_t c = static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j);
      w[c] = u[c] + dt * cell_op(u, c, sx, dc, bh1, bh2, idx, g);
    }
  });
  return out;
}

// Interior values of op(state); ring zero.
Field apply_operator(const Field& state, const DiffusionCoeffs& dc, const std::vector<double>& bh1,
                     const std::vector<double>& bh2, const Grid& g) {
  Field out = Field::zeros(g, state.t);
  const double* u = state.v.data();
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  std::size_t idx = 0;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj, ++idx) {
      const int j = g.dim == 2 ? jj : 0;
      const std::size_t c = static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j);
      out.v[c] = cell_op(u, c, sx, dc, bh1, bh2, idx, g);
    }
  return out;
}

// Clamp round-off excursions back into closure(J); larger breaches error.
// Laws with P' singular at an open lower end get a positive floor.
void enforce_range(Field& f, const StateLaw& law, const Grid& g, double u_star,
                   bool flux_active) {
  const Interval& J = law.domain();
  const double tol = 1e-12 * (1.0 + std::fabs(u_star));
  // A state clamped onto an open domain edge would make the next P'(u)
  // evaluation blow up, so lift it just inside -- but only when the flux
  // term actually samples P'. Without flux the tail may decay freely.
  const bool floor_law = flux_active && law.kind() == LawKind::SlightlyCompressible;
  const double u_floor = 1e-12;
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj) {
      const int j = g.dim == 2 ? jj : 0;
      double& v = f.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)];
      if (v < J.lo) {
        require(v >= J.lo - tol, Err::RangeViolation,
                "state left the law domain: value " + std::to_string(v) + " below " +
                    std::to_string(J.lo));
        v = J.lo;
      } else if (v > J.hi) {
        require(v <= J.hi + tol, Err::RangeViolation,
                "state left the law domain: value " + std::to_string(v) + " above " +
                    std::to_string(J.hi));
        v = J.hi;
      }
      if (floor_law && v < u_floor) v = u_floor;
    }
}

}  // namespace

void validate_problem(const IBVProblem& p, const Grid& g) {
  require(g.dim == 1 || g.dim == 2, Err::InvalidArgument, "solver supports 1D and 2D only");
  require(p.coeffs.dim == g.dim, Err::InvalidArgument, "coefficient/grid dimension mismatch");
  require(p.coeffs.A && p.coeffs.K && p.coeffs.B, Err::InvalidArgument,
          "coefficient fields are unset");
  require(p.coeffs.law != nullptr, Err::InvalidArgument, "problem needs a state law");
  require(p.u0.v.size() == g.total(), Err::InvalidArgument,
          "initial field does not match the grid");
  require(p.u0.all_finite(), Err::InvalidArgument, "initial field has non-finite entries");

  const std::size_t sx = static_cast<std::size_t>(g.ny());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      if (!g.on_boundary(i, g.dim == 2 ? j : 0)) continue;
      require(p.u0.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)] == p.u_star,
              Err::Compatibility, "initial data must equal u_star on the boundary ring");
    }

  if (p.enforce_range) {
    const Interval& J = p.coeffs.law->domain();
    for (double v : p.u0.v)
      require(J.contains_closure(v), Err::RangeViolation,
              "initial data leaves the closure of the law domain");
  }

  sample_diffusion(p.coeffs.A, g, p.u0.t);  // validates the mixed-stencil condition
}

double stable_dt(const IBVProblem& p, const Grid& g, double safety, const Field& state) {
  require(safety > 0.0 && safety <= 1.0, Err::InvalidArgument, "safety must be in (0,1]");
  require(state.v.size() == g.total(), Err::InvalidArgument, "state does not match the grid");
  const DiffusionCoeffs dc = sample_diffusion(p.coeffs.A, g, state.t);
  const FluxCoeffs fc = sample_flux(p.coeffs.K, p.coeffs.B, g, state.t);
  std::vector<double> bh1, bh2;
  bhat_from_state(state, fc, *p.coeffs.law, g, bh1, bh2);
  const double load = max_center_load(dc, bh1, bh2, g);
  require(load > 0.0, Err::DegenerateCoefficients,
          "all coefficients vanish; no time scale to step with");
  return safety / load;
}

double stable_dt(const IBVProblem& p, const Grid& g, double safety) {
  return stable_dt(p, g, safety, p.u0);
}

Field step(const Field& state, const IBVProblem& p, const Grid& g, double dt) {
  require(dt > 0.0, Err::InvalidArgument, "dt must be positive");
  require(state.v.size() == g.total(), Err::InvalidArgument, "state does not match the grid");
  const DiffusionCoeffs dc = sample_diffusion(p.coeffs.A, g, state.t);
  const FluxCoeffs fc = sample_flux(p.coeffs.K, p.coeffs.B, g, state.t);
  std::vector<double> bh1, bh2;
  bhat_from_state(state, fc, *p.coeffs.law, g, bh1, bh2);
  Field out = apply_step(state, dc, bh1, bh2, g, dt, p.u_star);
  out.t = state.t + dt;
  if (p.enforce_range) enforce_range(out, *p.coeffs.law, g, p.u_star, !fc.k_zero);
  return out;
}

Field residual_L(const Field& state, const Field& time_deriv, const IBVProblem& p, const Grid& g) {
  require(state.v.size() == g.total() && time_deriv.v.size() == g.total(), Err::InvalidArgument,
          "fields do not match the grid");
  const DiffusionCoeffs dc = sample_diffusion(p.coeffs.A, g, state.t);
  const FluxCoeffs fc = sample_flux(p.coeffs.K, p.coeffs.B, g, state.t);
  std::vector<double> bh1, bh2;
  bhat_from_state(state, fc, *p.coeffs.law, g, bh1, bh2);
  Field op = apply_operator(state, dc, bh1, bh2, g);
  Field res = Field::zeros(g, state.t);
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj) {
      const int j = g.dim == 2 ? jj : 0;
      const std::size_t c = static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j);
      res.v[c] = time_deriv.v[c] - op.v[c];
    }
  return res;
}

Trajectory solve(const IBVProblem& p, const Grid& g, double t_end, const SolveOptions& opts) {
  validate_problem(p, g);
  require(t_end >= 0.0, Err::InvalidArgument, "t_end must be nonnegative");
  require(opts.safety > 0.0 && opts.safety <= 1.0, Err::InvalidArgument,
          "safety must be in (0,1]");

  Trajectory traj;
  traj.grid = g;
  traj.u_star = p.u_star;
  traj.coeff_signature = p.coeffs.signature;
  traj.m_star = p.u0.min();
  traj.M_star = p.u0.max();

  Field cur = p.u0;
  traj.summary.push_back({cur.t, cur.max(), cur.min()});
  traj.fields.push_back(cur);
  traj.field_steps.push_back(0);
  if (t_end == 0.0) return traj;

  DiffusionCoeffs dc = sample_diffusion(p.coeffs.A, g, cur.t);
  FluxCoeffs fc = sample_flux(p.coeffs.K, p.coeffs.B, g, cur.t);
  const bool static_coeffs = !p.coeffs.time_dependent;
  std::vector<double> bh1, bh2;

  double static_dt = 0.0;
  if (static_coeffs && fc.k_zero && fc.b_zero) {
    bh1.clear();
    bh2.clear();
    const double load = max_center_load(dc, bh1, bh2, g);
    require(load > 0.0, Err::DegenerateCoefficients,
            "all coefficients vanish; no time scale to step with");
    static_dt = opts.safety / load;
  }

  std::size_t step_idx = 0;
  while (cur.t < t_end) {
    if (!static_coeffs) {
      dc = sample_diffusion(p.coeffs.A, g, cur.t);
      fc = sample_flux(p.coeffs.K, p.coeffs.B, g, cur.t);
    }
    double dt;
    if (opts.dt_override > 0.0) {
      bhat_from_state(cur, fc, *p.coeffs.law, g, bh1, bh2);
      dt = opts.dt_override;
    } else if (static_dt > 0.0) {
      dt = static_dt;
    } else {
      bhat_from_state(cur, fc, *p.coeffs.law, g, bh1, bh2);
      const double load = max_center_load(dc, bh1, bh2, g);
      require(load > 0.0, Err::DegenerateCoefficients,
              "all coefficients vanish; no time scale to step with");
      dt = opts.safety / load;
    }
    const double remaining = t_end - cur.t;
    if (dt >= remaining * (1.0 - 1e-12)) dt = remaining;
    require(step_idx < kMaxSteps, Err::InvalidArgument,
            "step budget exhausted before reaching t_end");

    Field next = apply_step(cur, dc, bh1, bh2, g, dt, p.u_star);
    next.t = dt == remaining ? t_end : cur.t + dt;
    if (p.enforce_range) enforce_range(next, *p.coeffs.law, g, p.u_star, !fc.k_zero);
    ++step_idx;
    if (opts.observer) opts.observer(cur, next, dt, step_idx);
    traj.summary.push_back({next.t, next.max(), next.min()});
    if (opts.record_every > 0 && step_idx % opts.record_every == 0 && next.t < t_end) {
      traj.fields.push_back(next);
      traj.field_steps.push_back(step_idx);
    }
    cur = std::move(next);
  }

  traj.fields.push_back(cur);
  traj.field_steps.push_back(step_idx);
  return traj;
}

Field linear_residual(const Field& w0, const Field& w1, double dt, const LinearOperator& op,
                      const Grid& g) {
  require(dt > 0.0, Err::InvalidArgument, "dt must be positive");
  require(w0.v.size() == g.total() && w1.v.size() == g.total(), Err::InvalidArgument,
          "fields do not match the grid");
  require(op.dim == g.dim && op.A && op.b, Err::InvalidArgument, "operator is unset");
  const DiffusionCoeffs dc = sample_diffusion(op.A, g, w0.t);
  std::vector<double> bh1, bh2;
  bhat_from_callable(op.b, g, w0.t, bh1, bh2);
  Field spatial = apply_operator(w0, dc, bh1, bh2, g);
  Field res = Field::zeros(g, w0.t);
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  for (int i = 1; i <= g.N[0]; ++i)
    for (int jj = 1; jj <= jmax; ++jj) {
      const int j = g.dim == 2 ? jj : 0;
      const std::size_t c = static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j);
      res.v[c] = (w1.v[c] - w0.v[c]) / dt - spatial.v[c];
    }
  return res;
}

Field solve_linear(const Field& u0, const LinearOperator& op, const Grid& g, double t_end,
                   double bc_value, double safety) {
  require(op.dim == g.dim && op.A && op.b, Err::InvalidArgument, "operator is unset");
  require(u0.v.size() == g.total(), Err::InvalidArgument, "initial field does not match the grid");
  require(t_end >= u0.t, Err::InvalidArgument, "t_end precedes the initial time");
  require(safety > 0.0 && safety <= 1.0, Err::InvalidArgument, "safety must be in (0,1]");
  Field cur = u0;
  std::size_t steps = 0;
  while (cur.t < t_end) {
    const DiffusionCoeffs dc = sample_diffusion(op.A, g, cur.t);
    std::vector<double> bh1, bh2;
    bhat_from_callable(op.b, g, cur.t, bh1, bh2);
    const double load = max_center_load(dc, bh1, bh2, g);
    require(load > 0.0, Err::DegenerateCoefficients,
            "all coefficients vanish; no time scale to step with");
    double dt = safety / load;
    const double remaining = t_end - cur.t;
    if (dt >= remaining * (1.0 - 1e-12)) dt = remaining;
    require(steps < kMaxSteps, Err::InvalidArgument,
            "step budget exhausted before reaching t_end");
    Field next = apply_step(cur, dc, bh1, bh2, g, dt, bc_value);
    next.t = dt == remaining ? t_end : cur.t + dt;
    ++steps;
    cur = std::move(next);
  }
  return cur;
}

}  // namespace dtlab

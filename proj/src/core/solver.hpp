#pragma once

#include <functional>

#include "core/coefficients.hpp"
#include "core/grid.hpp"

namespace dtlab {

// Initial-boundary-value problem with a constant Dirichlet value u_star on
// the whole lateral boundary.
struct IBVProblem {
  PDECoefficients coeffs;
  double u_star = 0.0;
  Field u0;
  bool enforce_range = true;  // keep iterates inside closure(J) of the state law
};

// Checks grid/field sizes, boundary compatibility (u0 = u_star on the
// ring), u0 membership in closure(J), and per-cell positivity of the
// mixed-derivative stencil: |a12| <= min(a11 h2/h1, a22 h1/h2).
// CompatibilityError / RangeViolation / MonotonicityError on failure.
void validate_problem(const IBVProblem& p, const Grid& g);

// Largest forward-Euler step keeping every stencil weight nonnegative:
// safety / sup over cells of (sum_i 2|a_ii|/h_i^2 + |a12|/(h1 h2)
// + sum_i |bhat_i|/h_i), with bhat = u B + P'(u) K grad u frozen on the
// supplied state. The mixed-derivative stencil only lightens the center
// weight, so this denominator over-counts it; the bound stays safe.
// DegenerateCoefficients if the denominator vanishes.
double stable_dt(const IBVProblem& p, const Grid& g, double safety, const Field& state);
double stable_dt(const IBVProblem& p, const Grid& g, double safety);  // state = u0

// One forward-Euler update of the nonlinear operator; boundary re-imposed.
Field step(const Field& state, const IBVProblem& p, const Grid& g, double dt);

// Discrete L u at interior nodes (zero on the ring), with the caller's
// time-derivative field: time_deriv - <A,D2 u> + u B.grad u + P'(u)(K grad u).grad u,
// same stencils as step().
Field residual_L(const Field& state, const Field& time_deriv, const IBVProblem& p, const Grid& g);

struct SolveOptions {
  double safety = 0.5;
  std::size_t record_every = 0;  // 0: snapshots only at t = 0 and t_end
  double dt_override = 0.0;      // > 0 forces a fixed step (clipped at t_end)
  // Called after each accepted step with the pre/post fields.
  std::function<void(const Field& prev, const Field& next, double dt, std::size_t step)> observer;
};

// Marches the problem to t_end, recording per-step extrema and snapshots.
Trajectory solve(const IBVProblem& p, const Grid& g, double t_end, const SolveOptions& opts = {});

// Truncated linear operator L w = w_t - <A, D2 w> + b . grad w, sharing the
// solver's stencils. Used for transformed solutions, barriers, and the
// random-walk comparison.
struct LinearOperator {
  int dim = 1;
  std::function<Mat(const Vec&, double)> A;
  std::function<Vec(const Vec&, double)> b;
};

// Discrete L w at interior nodes from a consecutive pair (w0 at t, w1 at
// t+dt): (w1-w0)/dt - <A,D2 w0> + b.grad w0.
Field linear_residual(const Field& w0, const Field& w1, double dt, const LinearOperator& op,
                      const Grid& g);

// Forward-Euler march of the linear operator with constant Dirichlet value.
Field solve_linear(const Field& u0, const LinearOperator& op, const Grid& g, double t_end,
                   double bc_value, double safety = 0.5);

}  // namespace dtlab

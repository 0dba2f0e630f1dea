#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/analysis.hpp"
#include "core/solver.hpp"
#include "test_util.hpp"

using namespace dtlab;

namespace {

Field sine_profile(const Grid& g, double u_star, double amp) {
  Field f = Field::constant(g, u_star);
  for (int i = 1; i <= g.N[0]; ++i) {
    const double s = (g.coord(0, i) - g.lo[0]) / (g.hi[0] - g.lo[0]);
    f.v[g.at(i)] = u_star + amp * std::sin(M_PI * s);
  }
  return f;
}

IBVProblem heat_problem(const Grid& g, const Field& u0, double u_star) {
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(Mat::identity(g.dim), Mat(g.dim), Vec(g.dim),
                                       StateLaw::ideal(1.0, true));
  p.u_star = u_star;
  p.u0 = u0;
  return p;
}

double heat_error(int n, double dt_factor) {
  Grid g = Grid::interval(0.0, M_PI, n);
  Field u0 = Field::zeros(g);
  for (int i = 0; i < g.nx(); ++i) u0.v[g.at(i)] = std::sin(g.coord(0, i));
  u0.v[g.at(0)] = 0.0;
  u0.v[g.at(g.nx() - 1)] = 0.0;
  IBVProblem p = heat_problem(g, u0, 0.0);
  SolveOptions opts;
  opts.dt_override = dt_factor * g.h[0] * g.h[0];
  const double t_end = 0.2;
  Trajectory tr = solve(p, g, t_end, opts);
  const Field& last = tr.fields.back();
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double exact = std::sin(g.coord(0, i)) * std::exp(-t_end);
    err = std::max(err, std::fabs(last.v[g.at(i)] - exact));
  }
  return err;
}

// u_t = u_xx - (u_x)^2 has exact solutions -log(w) for caloric w > 0.
double flux_burgers_error(int n) {
  Grid g = Grid::interval(0.0, M_PI, n);
  auto law = StateLaw::ideal(1.0, true);
  Mat one(1);
  one(0, 0) = 1.0;
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(one, one, Vec(1), law);
  p.u_star = 0.0;
  p.u0 = Field::zeros(g);
  for (int i = 1; i <= g.N[0]; ++i)
    p.u0.v[g.at(i)] = -std::log1p(0.5 * std::sin(g.coord(0, i)));
  SolveOptions opts;
  opts.dt_override = 0.15 * g.h[0] * g.h[0];
  const double t_end = 0.1;
  Trajectory tr = solve(p, g, t_end, opts);
  const Field& last = tr.fields.back();
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double exact = -std::log1p(0.5 * std::sin(g.coord(0, i)) * std::exp(-t_end));
    err = std::max(err, std::fabs(last.v[g.at(i)] - exact));
  }
  return err;
}

}  // namespace

TEST_CASE("stable step: hand value and mesh scaling") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  IBVProblem p = heat_problem(g, Field::zeros(g), 0.0);
  // Pure diffusion: denominator 2/h^2 = 200, safety 0.5.
  CHECK(stable_dt(p, g, 0.5) == doctest::Approx(2.5e-3).epsilon(1e-14));
  CHECK(stable_dt(p, g, 1.0) == doctest::Approx(5.0e-3).epsilon(1e-14));

  Grid g2 = Grid::interval(0.0, 1.0, 19);
  IBVProblem p2 = heat_problem(g2, Field::zeros(g2), 0.0);
  CHECK(stable_dt(p2, g2, 0.5) ==
        doctest::Approx(2.5e-3 * std::pow(g2.h[0] / g.h[0], 2)).epsilon(1e-12));
}

TEST_CASE("stable step counts the frozen advection load") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  auto law = StateLaw::ideal(1.0, true);
  Mat one(1);
  one(0, 0) = 1.0;
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(one, Mat(1), Vec{2.0}, law);
  p.u_star = 1.0;
  p.u0 = Field::constant(g, 1.0);
  // bhat = u * B = 2 everywhere: denominator 2/h^2 + |2|/h = 220.
  CHECK(stable_dt(p, g, 0.5) == doctest::Approx(0.5 / 220.0).epsilon(1e-13));
}

TEST_CASE("vanishing coefficients leave no time scale") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  PDECoefficients zero;
  zero.dim = 1;
  zero.A = [](const Vec&, double) { return Mat(1); };
  zero.K = [](const Vec&, double) { return Mat(1); };
  zero.B = [](const Vec&, double) { return Vec(1); };
  zero.law = StateLaw::ideal(1.0, true);
  IBVProblem p;
  p.coeffs = zero;
  p.u0 = Field::zeros(g);
  CHECK_ERRCODE(Err::DegenerateCoefficients, stable_dt(p, g, 0.5));
  CHECK_ERRCODE(Err::DegenerateCoefficients, solve(p, g, 1.0));
}

TEST_CASE("problem validation rejects inconsistent data") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  IBVProblem p = heat_problem(g, Field::zeros(g), 0.0);

  IBVProblem wrong_size = p;
  wrong_size.u0.v.pop_back();
  CHECK_ERRCODE(Err::InvalidArgument, validate_problem(wrong_size, g));

  IBVProblem ring = p;
  ring.u0.v[0] = 0.3;  // boundary node disagrees with u_star
  CHECK_ERRCODE(Err::Compatibility, validate_problem(ring, g));

  IBVProblem range = p;
  range.coeffs = PDECoefficients::constant(Mat::identity(1), Mat(1), Vec(1),
                                           StateLaw::slightly_compressible(1.0));
  range.u_star = 0.5;
  range.u0 = Field::constant(g, 0.5);
  range.u0.v[g.at(4)] = -0.3;  // leaves the closure of (0, inf)
  CHECK_ERRCODE(Err::RangeViolation, validate_problem(range, g));
  range.enforce_range = false;  // opting out skips the range test
  validate_problem(range, g);

  // Mixed-derivative dominance violated on a square grid: |a12| > min(a11, a22).
  Grid g2 = Grid::rectangle(0.0, 1.0, 9, 0.0, 1.0, 9);
  Mat a(2);
  a(0, 0) = a(1, 1) = 1.0;
  a(0, 1) = a(1, 0) = 1.2;
  IBVProblem p2;
  p2.coeffs.dim = 2;
  p2.coeffs.A = [a](const Vec&, double) { return a; };
  p2.coeffs.K = [](const Vec&, double) { return Mat(2); };
  p2.coeffs.B = [](const Vec&, double) { return Vec(2); };
  p2.coeffs.law = StateLaw::ideal(1.0, true);
  p2.u0 = Field::zeros(g2);
  CHECK_ERRCODE(Err::Monotonicity, validate_problem(p2, g2));
}

TEST_CASE("constant states are fixed points, bit for bit") {
  Grid g = Grid::interval(0.0, 1.0, 15);
  auto law = StateLaw::ideal(1.0, true);
  Mat one(1);
  one(0, 0) = 1.0;
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(one, one, Vec{0.5}, law);
  p.u_star = 0.7;
  p.u0 = Field::constant(g, 0.7);
  Trajectory tr = solve(p, g, 0.05);
  for (double v : tr.fields.back().v) CHECK(v == 0.7);
  CHECK(tr.summary.back().umax == 0.7);
  CHECK(tr.summary.back().umin == 0.7);
}

TEST_CASE("discrete operator is exact on quadratics") {
  Grid g = Grid::interval(0.0, 1.0, 19);
  IBVProblem p = heat_problem(g, Field::zeros(g), 0.0);
  Field u = Field::zeros(g);
  for (int i = 0; i < g.nx(); ++i) u.v[g.at(i)] = g.coord(0, i) * g.coord(0, i);
  Field r = residual_L(u, Field::zeros(g), p, g);
  for (int i = 1; i <= g.N[0]; ++i) CHECK(std::fabs(r.v[g.at(i)] + 2.0) <= 1e-10);
  CHECK(r.v[g.at(0)] == 0.0);
  CHECK(r.v[g.at(g.nx() - 1)] == 0.0);
}

TEST_CASE("mixed second derivative is exact on bilinear states") {
  Grid g = Grid::rectangle(0.0, 1.0, 9, 0.0, 1.0, 9);
  Mat a(2);
  a(0, 0) = a(1, 1) = 1.0;
  a(0, 1) = a(1, 0) = 0.5;
  IBVProblem p;
  p.coeffs.dim = 2;
  p.coeffs.A = [a](const Vec&, double) { return a; };
  p.coeffs.K = [](const Vec&, double) { return Mat(2); };
  p.coeffs.B = [](const Vec&, double) { return Vec(2); };
  p.coeffs.law = StateLaw::ideal(1.0, true);
  p.u0 = Field::zeros(g);
  Field u = Field::zeros(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) u.v[g.at(i, j)] = g.coord(0, i) * g.coord(1, j);
  // <A, D^2 u> = 2 a12 for u = xy, so L u = -1 at every interior node.
  Field r = residual_L(u, Field::zeros(g), p, g);
  for (int i = 1; i <= g.N[0]; ++i)
    for (int j = 1; j <= g.N[1]; ++j) CHECK(std::fabs(r.v[g.at(i, j)] + 1.0) <= 1e-10);

  // Opposite coupling sign flips the stencil branch, same exactness.
  a(0, 1) = a(1, 0) = -0.5;
  p.coeffs.A = [a](const Vec&, double) { return a; };
  r = residual_L(u, Field::zeros(g), p, g);
  for (int i = 1; i <= g.N[0]; ++i)
    for (int j = 1; j <= g.N[1]; ++j) CHECK(std::fabs(r.v[g.at(i, j)] - 1.0) <= 1e-10);
}

TEST_CASE("heat solution converges at second order") {
  const double e1 = heat_error(19, 0.2);
  const double e2 = heat_error(39, 0.2);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.8);
  CHECK(e2 < e1);
}

TEST_CASE("gradient-flux solution converges at second order") {
  const double e1 = flux_burgers_error(19);
  const double e2 = flux_burgers_error(39);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.7);
}

TEST_CASE("maximum principle holds on a drifted diffusion") {
  Grid g = Grid::interval(0.0, 1.0, 31);
  auto law = StateLaw::ideal(1.0, true);
  Mat one(1);
  one(0, 0) = 1.0;
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(one, Mat(1), Vec{0.5}, law);
  p.u_star = 0.2;
  Field u0 = Field::constant(g, 0.2);
  for (int i = 1; i <= g.N[0]; ++i) {
    const double s = g.coord(0, i);
    u0.v[g.at(i)] = 0.2 + std::pow(4.0 * s * (1.0 - s), 2);
  }
  p.u0 = u0;
  Trajectory tr = solve(p, g, 0.3);
  const double tol = max_principle_tol(tr.m_star, tr.M_star);
  for (const SummaryRow& row : tr.summary) {
    CHECK(row.umax <= tr.M_star + tol);
    CHECK(row.umin >= std::min(tr.m_star, p.u_star) - tol);
  }
  Report rep = check_max_principle(tr);
  CHECK(rep.passed);
}

TEST_CASE("trajectory bookkeeping: landing, snapshots, observer") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  IBVProblem p = heat_problem(g, sine_profile(g, 0.0, 1.0), 0.0);

  Trajectory still = solve(p, g, 0.0);
  CHECK(still.summary.size() == 1);
  CHECK(still.fields.size() == 1);

  SolveOptions opts;
  opts.record_every = 5;
  std::size_t calls = 0;
  double dt_sum = 0.0;
  opts.observer = [&](const Field& prev, const Field& next, double dt, std::size_t) {
    ++calls;
    dt_sum += dt;
    CHECK(next.t > prev.t);
  };
  const double t_end = 0.0125;
  Trajectory tr = solve(p, g, t_end, opts);
  CHECK(tr.summary.back().t == t_end);  // exact landing
  CHECK(tr.fields.back().t == t_end);
  CHECK(tr.summary.size() == calls + 1);
  CHECK(dt_sum == doctest::Approx(t_end).epsilon(1e-12));
  REQUIRE(tr.fields.size() >= 2);
  CHECK(tr.fields.front().t == 0.0);
  CHECK(tr.field_steps.front() == 0);
  CHECK(tr.field_steps.back() == tr.summary.size() - 1);
  for (std::size_t i = 0; i + 1 < tr.field_steps.size(); ++i)
    CHECK(tr.field_steps[i] < tr.field_steps[i + 1]);

  CHECK_ERRCODE(Err::InvalidArgument, solve(p, g, -1.0));
  SolveOptions bad;
  bad.safety = 0.0;
  CHECK_ERRCODE(Err::InvalidArgument, solve(p, g, 1.0, bad));
}

TEST_CASE("linear march: residual identity and absolute horizon") {
  Grid g = Grid::interval(0.0, M_PI, 39);
  LinearOperator op;
  op.dim = 1;
  op.A = [](const Vec&, double) { return Mat::identity(1); };
  op.b = [](const Vec&, double) { return Vec{1.0}; };

  Field w = Field::zeros(g);
  for (int i = 0; i < g.nx(); ++i) w.v[g.at(i)] = g.coord(0, i) * g.coord(0, i);
  // Stationary pair: residual = -<A, D2 w> + b . grad w = -2 + 2x.
  Field r = linear_residual(w, w, 0.01, op, g);
  for (int i = 1; i <= g.N[0]; ++i) {
    const double expect = -2.0 + 2.0 * g.coord(0, i);
    CHECK(std::fabs(r.v[g.at(i)] - expect) <= 1e-9);
  }
  CHECK_ERRCODE(Err::InvalidArgument, linear_residual(w, w, 0.0, op, g));

  // Caloric decay from a shifted start time; horizon is absolute.
  LinearOperator heat;
  heat.dim = 1;
  heat.A = [](const Vec&, double) { return Mat::identity(1); };
  heat.b = [](const Vec&, double) { return Vec(1); };
  Field u0 = Field::zeros(g);
  u0.t = 0.1;
  for (int i = 0; i < g.nx(); ++i) u0.v[g.at(i)] = std::sin(g.coord(0, i));
  u0.v[g.at(0)] = 0.0;
  u0.v[g.at(g.nx() - 1)] = 0.0;
  Field out = solve_linear(u0, heat, g, 0.3, 0.0);
  CHECK(out.t == 0.3);
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double exact = std::sin(g.coord(0, i)) * std::exp(-0.2);
    err = std::max(err, std::fabs(out.v[g.at(i)] - exact));
  }
  CHECK(err <= 2e-3);
  CHECK_ERRCODE(Err::InvalidArgument, solve_linear(u0, heat, g, 0.05, 0.0));
}

TEST_CASE("open-domain states are kept strictly inside when the flux needs them") {
  // Slightly compressible tail decay with no gradient flux: values may reach 0.
  Grid g = Grid::interval(0.0, 1.0, 19);
  auto law = StateLaw::slightly_compressible(1.0);
  Mat one(1);
  one(0, 0) = 1.0;
  IBVProblem p;
  p.coeffs = PDECoefficients::constant(one, Mat(1), Vec(1), law);
  p.u_star = 0.0;
  p.u0 = Field::constant(g, 0.0);
  for (int i = 1; i <= g.N[0]; ++i) {
    const double s = g.coord(0, i);
    p.u0.v[g.at(i)] = 0.5 * std::pow(4.0 * s * (1.0 - s), 2);
  }
  Trajectory tr = solve(p, g, 2.0);
  // Free decay: the state collapses toward zero unimpeded.
  CHECK(tr.summary.back().umax < 1e-6);

  // With an active gradient flux the same law keeps iterates above zero so
  // P'(u) stays evaluable.
  IBVProblem q = p;
  q.coeffs = PDECoefficients::constant(one, 0.01 * one, Vec(1), law);
  Trajectory tq = solve(q, g, 0.5);
  for (const SummaryRow& row : tq.summary) CHECK(row.umin >= 0.0);
  CHECK(tq.fields.back().all_finite());
}

#pragma once

#include <string>
#include <vector>

#include "core/coefficients.hpp"
#include "core/grid.hpp"
#include "core/statelaw.hpp"
#include "core/transform.hpp"

namespace dtlab {

// Reference geometry for the contraction estimates: an exterior point x0,
// its distance r0 to the closed box, and the farthest distance R.
struct DomainGeometry {
  int dim = 1;
  Vec x0;
  double r0 = 0.0;
  double R = 0.0;
};

// Exact r0/R for a box domain by per-axis projection. InteriorPoint if x0
// lies inside or on the boundary of the box.
DomainGeometry geometry(const Grid& g, const Vec& x0);

// Default reference point: one domain diameter to the left along the first
// axis, centered in the remaining axes.
Vec default_exterior_point(const Grid& g);

// Uniform bounds of the coefficient fields over the grid and sample times.
//   c0: smallest eigenvalue of sym A (ellipticity)
//   c1: bound on the negative part of the sym K quadratic form
//   c2: bound on the positive part
//   M0_bound: sup |B|;  M1: sup Tr A;  M2 = M0_bound * max(|m*|, |M*|)
struct CoefficientBounds {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double M0_bound = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
};

CoefficientBounds coefficient_bounds(const PDECoefficients& coeffs, const Grid& g,
                                     const std::vector<double>& t_samples, double m_star,
                                     double M_star);

// Contraction and decay constants:
//   beta = (M1 + M2 R)/(2 c0), T_star = R^2/(4 c0 beta),
//   eta_star = 1 - (r0/R)^{2 beta}, nu = ln(1/eta_star)/T_star,
//   nu0 = R^2/(2 c0) ln(R/r0).
// When the initial extrema lie inside the law domain the bi-Lipschitz
// constants of the transform family and the decay prefactor are attached:
//   C1 = min(e^{l1 P(m*)}, e^{l2 P(M*)}), C2 = max(e^{l1 P(M*)}, e^{l2 P(m*)}),
//   C0 = C2 / (C1 eta_star).
struct GrowthConstants {
  double beta = 0.0;
  double T_star = 0.0;
  double eta_star = 0.0;
  double nu = 0.0;
  double nu0 = 0.0;
  bool has_prefactor = false;
  double C1 = 0.0;
  double C2 = 0.0;
  double C0 = 0.0;
};

// EdgeCaseUnsupported when require_prefactor is set but m* or M* sits
// outside the open law domain.
GrowthConstants growth_constants(const CoefficientBounds& b, const DomainGeometry& geom,
                                 const StateLaw& law, double lambda1, double lambda2,
                                 double u_star, double m_star, double M_star,
                                 bool require_prefactor = false);

// Barrier data for W(x,t) = t^{-beta} e^{-phi(x)/t}, phi = mu |x-x0|^2:
//   mu = 1/(4 c0), d0 = mu r0^2, d1 = mu R^2, d2 = mu R,
//   grad_bound = 2 mu R, d3 = 2 mu M1, eta = (d0 e / beta)^beta.
struct BarrierSpec {
  double mu = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double grad_bound = 0.0;
  double d3 = 0.0;
  double eta = 0.0;
  double beta = 0.0;
};

BarrierSpec barrier_spec(const CoefficientBounds& b, const DomainGeometry& geom,
                         const GrowthConstants& gc);

// W at (x, t); identically 0 for t <= 0.
double barrier_eval(const BarrierSpec& spec, const DomainGeometry& geom, const Vec& x, double t);

// Companion comparison function W~ = M (1 - eta W); nonnegative on the
// domain closure for t > 0.
double barrier_tilde(const BarrierSpec& spec, const DomainGeometry& geom, double M, const Vec& x,
                     double t);

// One verified inequality: pass iff observed respects bound within tol,
// slack = margin left (negative on failure).
struct CheckRow {
  std::string check;
  std::string quantity;
  double bound = 0.0;
  double observed = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct Report {
  std::string name;
  bool passed = true;
  std::vector<CheckRow> rows;
  std::vector<std::string> notes;

  void add_le(const std::string& check, const std::string& quantity, double observed, double bound,
              double tol);
  void add_ge(const std::string& check, const std::string& quantity, double observed, double bound,
              double tol);
  void note(const std::string& s) { notes.push_back(s); }
  void merge(const Report& other);

  std::string to_text() const;
  static std::string csv_header();
  void append_csv(std::string& out) const;
};

// Round-off allowance for structurally exact bounds (monotone stencils).
double max_principle_tol(double m_star, double M_star);

// Per recorded time: extrema within parabolic-boundary extrema and the
// oscillation bound, all to max_principle_tol; the oscillation equality at
// t = 0 is asserted exactly to the same tolerance.
Report check_max_principle(const Trajectory& traj);

// Pointwise-transformed trajectory w = F(u) - F(u_star): summary rows map
// through the monotone transform; stored fields map value by value.
Trajectory transform_trajectory(const Trajectory& traj, const Transform& F);

// Window contraction on a transformed trajectory:
//   max{0, max w(., k T*)} <= eta_star^k max{0, max w(., 0)}
// for every complete window k >= 1, sampling the nearest recorded time at
// or after k T*. WindowError if the horizon is shorter than one window.
Report check_growth_lemma(const Trajectory& w_traj, const GrowthConstants& gc);

struct DecayOptions {
  bool small_time = false;     // also check the (1 - e^{-nu0/t}) factor for 0 < t <= T*
  double power_m = 0.0;        // > 0: one-sided power envelope with this exponent (u* = 0)
  double fit_fraction = 0.5;   // final fraction of the horizon used for the rate fit
  double fit_tol_factor = 0.05;
};

struct DecayReport {
  Report report;
  double nu_emp = 0.0;
  double nu_required = 0.0;
  double envelope_worst_slack = 0.0;
};

// Interior mode (default): max|u - u*| <= C0 e^{-nu t} max|u0 - u*| + tol
// at every recorded time plus a least-squares tail-rate fit
// nu_emp >= nu (1 - fit_tol_factor). ClassificationError when the
// constants carry no prefactor and no power envelope was requested.
// power_m > 0 switches to the one-sided envelope
//   max u(., t) <= eta_star^{-1/m} e^{-nu t / m} max u(., 0) + tol.
DecayReport check_decay(const Trajectory& traj, double u_star, const GrowthConstants& gc,
                        const DecayOptions& opts = {});

// Least-squares decay rate of a positive series on the final fraction of
// the horizon; WindowError when fewer than 8 usable samples remain.
double fit_tail_rate(const std::vector<double>& times, const std::vector<double>& values,
                     double final_fraction);

// All fitted tail rates (one per trajectory, final-half fit) must reach
// nu* (1 - fit_tol_factor), where nu* is rebuilt from the coefficient
// bounds with the state range replaced by tail extrema pooled over the
// trajectories (final quarter). InsufficientTrajectories below 3 inputs;
// MismatchedSampling when coefficient signatures differ.
Report check_rate_independence(const std::vector<const Trajectory*>& trajs, double u_star,
                               const CoefficientBounds& b, const DomainGeometry& geom,
                               double fit_tol_factor = 0.05);

}  // namespace dtlab

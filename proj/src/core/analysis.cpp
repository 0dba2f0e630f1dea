#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/format.hpp"

namespace dtlab {

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

}  // namespace

DomainGeometry geometry(const Grid& g, const Vec& x0) {
  require(x0.n == g.dim, Err::InvalidArgument, "reference point dimension mismatch");
  DomainGeometry geom;
  geom.dim = g.dim;
  geom.x0 = x0;
  double near2 = 0.0, far2 = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    const double below = g.lo[i] - x0[i];
    const double above = x0[i] - g.hi[i];
    const double gap = std::max({below, above, 0.0});
    near2 += gap * gap;
    const double reach = std::max(std::fabs(x0[i] - g.lo[i]), std::fabs(x0[i] - g.hi[i]));
    far2 += reach * reach;
  }
  geom.r0 = std::sqrt(near2);
  geom.R = std::sqrt(far2);
  require(geom.r0 > 0.0, Err::InteriorPoint,
          "reference point must lie strictly outside the closed domain");
  return geom;
}

Vec default_exterior_point(const Grid& g) {
  Vec x0;
  x0.n = g.dim;
  x0[0] = g.lo[0] - (g.hi[0] - g.lo[0]);
  for (int i = 1; i < g.dim; ++i) x0[i] = 0.5 * (g.lo[i] + g.hi[i]);
  return x0;
}

CoefficientBounds coefficient_bounds(const PDECoefficients& coeffs, const Grid& g,
                                     const std::vector<double>& t_samples, double m_star,
                                     double M_star) {
  require(!t_samples.empty(), Err::InvalidArgument, "need at least one sample time");
  require(coeffs.dim == g.dim, Err::InvalidArgument, "coefficient/grid dimension mismatch");
  CoefficientBounds b;
  b.c0 = std::numeric_limits<double>::infinity();
  double k_min = std::numeric_limits<double>::infinity();
  double k_max = -std::numeric_limits<double>::infinity();
  const int jmax = g.dim == 2 ? g.N[1] : 1;
  for (double t : t_samples)
    for (int i = 1; i <= g.N[0]; ++i)
      for (int jj = 1; jj <= jmax; ++jj) {
        const Vec x = g.point(i, g.dim == 2 ? jj : 0);
        const Mat a = coeffs.A(x, t).sym_part();
        const EigenValues ew = sym_eigenvalues(a);
        b.c0 = std::min(b.c0, ew.min());
        b.M1 = std::max(b.M1, a.trace());
        const Mat k = coeffs.K(x, t).sym_part();
        const EigenValues kw = sym_eigenvalues(k);
        k_min = std::min(k_min, kw.min());
        k_max = std::max(k_max, kw.max());
        b.M0_bound = std::max(b.M0_bound, coeffs.B(x, t).norm());
      }
  require(b.c0 > 0.0, Err::Ellipticity,
          "diffusion matrix is not uniformly elliptic on the sample set: min eigenvalue " +
              fmt_g(b.c0));
  b.c1 = std::max(0.0, -k_min);
  b.c2 = std::max(0.0, k_max);
  b.M2 = b.M0_bound * std::max(std::fabs(m_star), std::fabs(M_star));
  return b;
}

GrowthConstants growth_constants(const CoefficientBounds& b, const DomainGeometry& geom,
                                 const StateLaw& law, double lambda1, double lambda2,
                                 double u_star, double m_star, double M_star,
                                 bool require_prefactor) {
  require(b.c0 > 0.0, Err::Ellipticity, "growth constants need c0 > 0");
  require(geom.R > geom.r0 && geom.r0 > 0.0, Err::InvalidBound,
          "geometry must satisfy R > r0 > 0");
  require(b.M1 > 0.0 && b.M2 >= 0.0, Err::InvalidBound, "need M1 > 0 and M2 >= 0");
  require(m_star <= u_star && u_star <= M_star, Err::InvalidBound,
          "u_star must lie between the initial extrema");
  GrowthConstants gc;
  gc.beta = (b.M1 + b.M2 * geom.R) / (2.0 * b.c0);
  gc.T_star = geom.R * geom.R / (4.0 * b.c0 * gc.beta);
  gc.eta_star = 1.0 - std::pow(geom.r0 / geom.R, 2.0 * gc.beta);
  gc.nu = std::log(1.0 / gc.eta_star) / gc.T_star;
  gc.nu0 = geom.R * geom.R / (2.0 * b.c0) * std::log(geom.R / geom.r0);
  const Interval& J = law.domain();
  if (J.contains(m_star) && J.contains(M_star)) {
    const double pm = law.p(m_star), pM = law.p(M_star);
    gc.C1 = std::min(std::exp(lambda1 * pm), std::exp(lambda2 * pM));
    gc.C2 = std::max(std::exp(lambda1 * pM), std::exp(lambda2 * pm));
    gc.C0 = gc.C2 / (gc.C1 * gc.eta_star);
    gc.has_prefactor = true;
  } else {
    require(!require_prefactor, Err::EdgeCaseUnsupported,
            "initial extrema sit on the law-domain edge; no interior prefactor exists");
  }
  return gc;
}

BarrierSpec barrier_spec(const CoefficientBounds& b, const DomainGeometry& geom,
                         const GrowthConstants& gc) {
  require(b.c0 > 0.0, Err::Ellipticity, "barrier needs c0 > 0");
  require(gc.beta > 0.0, Err::InvalidBound, "barrier needs beta > 0");
  BarrierSpec s;
  s.mu = 1.0 / (4.0 * b.c0);
  s.d0 = s.mu * geom.r0 * geom.r0;
  s.d1 = s.mu * geom.R * geom.R;
  s.d2 = s.mu * geom.R;
  s.grad_bound = 2.0 * s.mu * geom.R;
  s.d3 = 2.0 * s.mu * b.M1;
  s.beta = gc.beta;
  s.eta = std::pow(s.d0 * std::exp(1.0) / s.beta, s.beta);
  return s;
}

double barrier_eval(const BarrierSpec& spec, const DomainGeometry& geom, const Vec& x, double t) {
  require(x.n == geom.dim, Err::InvalidArgument, "point dimension mismatch");
  if (t <= 0.0) return 0.0;
  double r2 = 0.0;
  for (int i = 0; i < geom.dim; ++i) {
    const double d = x[i] - geom.x0[i];
    r2 += d * d;
  }
  const double phi = spec.mu * r2;
  return std::pow(t, -spec.beta) * std::exp(-phi / t);
}

double barrier_tilde(const BarrierSpec& spec, const DomainGeometry& geom, double M, const Vec& x,
                     double t) {
  return M * (1.0 - spec.eta * barrier_eval(spec, geom, x, t));
}

void Report::add_le(const std::string& check, const std::string& quantity, double observed,
                    double bound, double tol) {
  CheckRow r;
  r.check = check;
  r.quantity = quantity;
  r.bound = bound;
  r.observed = observed;
  r.slack = bound + tol - observed;
  r.pass = observed <= bound + tol;
  passed = passed && r.pass;
  rows.push_back(std::move(r));
}

void Report::add_ge(const std::string& check, const std::string& quantity, double observed,
                    double bound, double tol) {
  CheckRow r;
  r.check = check;
  r.quantity = quantity;
  r.bound = bound;
  r.observed = observed;
  r.slack = observed - (bound - tol);
  r.pass = observed >= bound - tol;
  passed = passed && r.pass;
  rows.push_back(std::move(r));
}

void Report::merge(const Report& other) {
  passed = passed && other.passed;
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  for (const auto& n : other.notes) notes.push_back(other.name.empty() ? n : other.name + ": " + n);
}

std::string Report::to_text() const {
  std::string out = "report " + name + ": " + (passed ? "PASS" : "FAIL") + "\n";
  for (const auto& r : rows) {
    out += std::string("  [") + (r.pass ? "PASS" : "FAIL") + "] " + r.check + " " + r.quantity +
           ": observed=" + fmt_g(r.observed) + " bound=" + fmt_g(r.bound) +
           " slack=" + fmt_g(r.slack) + "\n";
  }
  for (const auto& n : notes) out += "  note: " + n + "\n";
  return out;
}

std::string Report::csv_header() { return "check,quantity,bound,observed,slack,pass\n"; }

void Report::append_csv(std::string& out) const {
  for (const auto& r : rows) {
    out += csv_safe(name.empty() ? r.check : name + "." + r.check) + "," +
           csv_safe(r.quantity) + "," + fmt_g(r.bound) + "," + fmt_g(r.observed) + "," +
           fmt_g(r.slack) + "," + (r.pass ? "1" : "0") + "\n";
  }
}

double max_principle_tol(double m_star, double M_star) {
  const double scale = std::max({1.0, std::fabs(m_star), std::fabs(M_star)});
  return 10.0 * std::numeric_limits<double>::epsilon() * scale;
}

Report check_max_principle(const Trajectory& traj) {
  require(!traj.summary.empty(), Err::InvalidArgument, "trajectory has no recorded rows");
  Report rep;
  rep.name = "max_principle";
  const double mS = traj.m_star, MS = traj.M_star;
  const double tol = max_principle_tol(mS, MS);
  double worst_hi = -std::numeric_limits<double>::infinity();
  double worst_lo = -std::numeric_limits<double>::infinity();
  double worst_osc = -std::numeric_limits<double>::infinity();
  for (const auto& row : traj.summary) {
    worst_hi = std::max(worst_hi, row.umax - MS);
    worst_lo = std::max(worst_lo, mS - row.umin);
    worst_osc = std::max(worst_osc, (row.umax - row.umin) - (MS - mS));
  }
  rep.add_le("upper", "max excess over M_star", worst_hi, 0.0, tol);
  rep.add_le("lower", "max deficit under m_star", worst_lo, 0.0, tol);
  rep.add_le("oscillation", "max oscillation excess", worst_osc, 0.0, tol);
  const auto& r0 = traj.summary.front();
  rep.add_le("oscillation_t0", "|osc(0) - boundary osc|",
             std::fabs((r0.umax - r0.umin) - (MS - mS)), 0.0, tol);
  return rep;
}

Trajectory transform_trajectory(const Trajectory& traj, const Transform& F) {
  Trajectory out;
  out.grid = traj.grid;
  out.coeff_signature = traj.coeff_signature;
  const double w_star = 0.0;
  const double f_star = F.f(traj.u_star);
  out.u_star = w_star;
  out.m_star = F.f(traj.m_star) - f_star;
  out.M_star = F.f(traj.M_star) - f_star;
  out.summary.reserve(traj.summary.size());
  for (const auto& row : traj.summary)
    out.summary.push_back({row.t, F.f(row.umax) - f_star, F.f(row.umin) - f_star});
  out.fields.reserve(traj.fields.size());
  for (const auto& f : traj.fields) {
    Field w;
    w.t = f.t;
    w.v.resize(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) w.v[i] = F.f(f.v[i]) - f_star;
    out.fields.push_back(std::move(w));
  }
  out.field_steps = traj.field_steps;
  return out;
}

Report check_growth_lemma(const Trajectory& w_traj, const GrowthConstants& gc) {
  require(!w_traj.summary.empty(), Err::InvalidArgument, "trajectory has no recorded rows");
  const double horizon = w_traj.t_end();
  require(horizon >= gc.T_star * (1.0 - 1e-12), Err::Window,
          "horizon " + fmt_g(horizon) + " is shorter than one growth window T* = " +
              fmt_g(gc.T_star));
  Report rep;
  rep.name = "growth_lemma";
  const double j0 = std::max(0.0, w_traj.summary.front().umax);
  const double tol = 1e-12 * std::max(1.0, j0);
  const int windows = static_cast<int>(std::floor(horizon / gc.T_star + 1e-12));
  for (int k = 1; k <= windows; ++k) {
    const auto& row = w_traj.summary[w_traj.row_at_or_after(k * gc.T_star)];
    const double jk = std::max(0.0, row.umax);
    const double bound = std::pow(gc.eta_star, k) * j0;
    rep.add_le("window_" + std::to_string(k),
               "max{0, max w} at t=" + fmt_g(row.t), jk, bound, tol);
  }
  rep.note("eta_star=" + fmt_g(gc.eta_star) + " T_star=" + fmt_g(gc.T_star) +
           " J0=" + fmt_g(j0));
  return rep;
}

double fit_tail_rate(const std::vector<double>& times, const std::vector<double>& values,
                     double final_fraction) {
  require(times.size() == values.size(), Err::InvalidArgument, "series length mismatch");
  require(final_fraction > 0.0 && final_fraction <= 1.0, Err::InvalidArgument,
          "final_fraction must be in (0,1]");
  require(!times.empty(), Err::Window, "empty series");
  // Samples that have decayed more than ten decades below the series peak carry no rate
  // information: explicit time stepping freezes once updates drop below an ulp, so the
  // deviation bottoms out at a round-off plateau (~1e-12 relative) instead of reaching zero.
  // The fit window is anchored to the last sample still above that floor.
  double peak = 0.0;
  for (double v : values)
    if (std::isfinite(v) && v > peak) peak = v;
  const double floor = 1e-10 * peak;
  double t0 = times.front(), t1 = times.front();
  bool any = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > floor) || !std::isfinite(values[i])) continue;
    if (!any) t0 = times[i];
    t1 = times[i];
    any = true;
  }
  require(any, Err::Window, "no samples above the round-off floor");
  const double cutoff = t1 - final_fraction * (t1 - t0);
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < cutoff || times[i] > t1) continue;
    if (!(values[i] > floor) || !std::isfinite(values[i])) continue;
    const double y = std::log(values[i]);
    n += 1.0;
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
  }
  require(n >= 8.0, Err::Window, "too few positive samples in the fit window");
  const double var = stt - st * st / n;
  require(var > 0.0, Err::Window, "degenerate fit window");
  const double slope = (sty - st * sy / n) / var;
  return -slope;
}

DecayReport check_decay(const Trajectory& traj, double u_star, const GrowthConstants& gc,
                        const DecayOptions& opts) {
  require(!traj.summary.empty(), Err::InvalidArgument, "trajectory has no recorded rows");
  DecayReport out;
  Report& rep = out.report;
  rep.name = "decay";
  const double tol = max_principle_tol(traj.m_star, traj.M_star);

  std::vector<double> times, dev;
  times.reserve(traj.summary.size());
  dev.reserve(traj.summary.size());
  const bool power_mode = opts.power_m > 0.0;
  for (const auto& row : traj.summary) {
    times.push_back(row.t);
    if (power_mode)
      dev.push_back(std::max(0.0, row.umax));
    else
      dev.push_back(std::max(row.umax - u_star, u_star - row.umin));
  }
  const double d0 = dev.front();

  double rate_bound;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t worst_i = 0;
  if (power_mode) {
    const double pref = std::pow(gc.eta_star, -1.0 / opts.power_m);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double bound = pref * std::exp(-gc.nu * times[i] / opts.power_m) * d0;
      const double slack = bound + tol - dev[i];
      if (slack < worst_slack) {
        worst_slack = slack;
        worst_i = i;
      }
    }
    rep.add_le("power_envelope",
               "max u at t=" + fmt_g(times[worst_i]) + " vs eta*^{-1/m} e^{-nu t/m} max u0",
               dev[worst_i], std::pow(gc.eta_star, -1.0 / opts.power_m) *
                                 std::exp(-gc.nu * times[worst_i] / opts.power_m) * d0,
               tol);
    rate_bound = gc.nu / opts.power_m;
  } else {
    require(gc.has_prefactor, Err::Classification,
            "interior decay check needs the C0 prefactor; constants were built for an edge case");
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double bound = gc.C0 * std::exp(-gc.nu * times[i]) * d0;
      const double slack = bound + tol - dev[i];
      if (slack < worst_slack) {
        worst_slack = slack;
        worst_i = i;
      }
    }
    rep.add_le("envelope", "sup|u-u*| at t=" + fmt_g(times[worst_i]) + " vs C0 e^{-nu t} sup|u0-u*|",
               dev[worst_i], gc.C0 * std::exp(-gc.nu * times[worst_i]) * d0, tol);
    rate_bound = gc.nu;
    if (opts.small_time) {
      double st_slack = std::numeric_limits<double>::infinity();
      std::size_t st_i = 0;
      bool any = false;
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || times[i] > gc.T_star * (1.0 + 1e-12)) continue;
        any = true;
        const double bound = (1.0 - std::exp(-gc.nu0 / times[i])) * d0;
        const double slack = bound + tol - dev[i];
        if (slack < st_slack) {
          st_slack = slack;
          st_i = i;
        }
      }
      if (any)
        rep.add_le("small_time",
                   "sup|u-u*| at t=" + fmt_g(times[st_i]) + " vs (1-e^{-nu0/t}) sup|u0-u*|",
                   dev[st_i], (1.0 - std::exp(-gc.nu0 / times[st_i])) * d0, tol);
      else
        rep.note("no recorded times in (0, T*]; small-time factor not exercised");
    }
  }
  out.envelope_worst_slack = worst_slack;

  std::size_t usable = 0;
  for (double v : dev)
    if (v > tol) ++usable;
  out.nu_required = rate_bound * (1.0 - opts.fit_tol_factor);
  if (usable >= 8) {
    out.nu_emp = fit_tail_rate(times, dev, opts.fit_fraction);
    rep.add_ge("tail_rate", "fitted decay rate vs required", out.nu_emp, rate_bound,
               opts.fit_tol_factor * rate_bound);
  } else {
    out.nu_emp = std::numeric_limits<double>::infinity();
    rep.note("deviation stays at round-off scale; tail-rate fit skipped");
  }
  return out;
}

Report check_rate_independence(const std::vector<const Trajectory*>& trajs, double u_star,
                               const CoefficientBounds& b, const DomainGeometry& geom,
                               double fit_tol_factor) {
  require(trajs.size() >= 3, Err::InsufficientTrajectories,
          "rate-independence check needs at least 3 trajectories, got " +
              std::to_string(trajs.size()));
  const std::uint64_t sig = trajs.front()->coeff_signature;
  for (const auto* t : trajs) {
    require(t != nullptr && !t->summary.empty(), Err::InvalidArgument, "empty trajectory");
    require(t->coeff_signature == sig, Err::MismatchedSampling,
            "trajectories were produced with different coefficient samplings");
  }

  // Tail extrema pooled over all trajectories (final quarter of each span)
  // replace the initial-data extrema in the M2 bound.
  double m_tail = std::numeric_limits<double>::infinity();
  double M_tail = -std::numeric_limits<double>::infinity();
  for (const auto* t : trajs) {
    const double t0 = t->summary.front().t, t1 = t->summary.back().t;
    const double cutoff = t1 - 0.25 * (t1 - t0);
    for (const auto& row : t->summary) {
      if (row.t < cutoff) continue;
      m_tail = std::min(m_tail, row.umin);
      M_tail = std::max(M_tail, row.umax);
    }
  }
  const double M2_tail = b.M0_bound * std::max(std::fabs(m_tail), std::fabs(M_tail));
  const double beta = (b.M1 + M2_tail * geom.R) / (2.0 * b.c0);
  const double T_star = geom.R * geom.R / (4.0 * b.c0 * beta);
  const double eta_star = 1.0 - std::pow(geom.r0 / geom.R, 2.0 * beta);
  const double nu_star = std::log(1.0 / eta_star) / T_star;

  Report rep;
  rep.name = "rate_independence";
  rep.note("nu_star=" + fmt_g(nu_star) + " from tail extrema [" + fmt_g(m_tail) + ", " +
           fmt_g(M_tail) + "]");
  int idx = 0;
  for (const auto* t : trajs) {
    std::vector<double> times, dev;
    times.reserve(t->summary.size());
    dev.reserve(t->summary.size());
    for (const auto& row : t->summary) {
      times.push_back(row.t);
      dev.push_back(std::max(row.umax - u_star, u_star - row.umin));
    }
    const double nu_emp = fit_tail_rate(times, dev, 0.5);
    rep.add_ge("trajectory_" + std::to_string(idx), "fitted tail rate vs nu_star", nu_emp, nu_star,
               fit_tol_factor * nu_star);
    ++idx;
  }
  return rep;
}

}  // namespace dtlab

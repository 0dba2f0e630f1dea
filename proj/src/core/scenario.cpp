#include "core/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "core/coefficients.hpp"
#include "core/error.hpp"
#include "core/format.hpp"
#include "core/kernel.hpp"
#include "core/montecarlo.hpp"
#include "core/solver.hpp"
#include "core/transform.hpp"

namespace dtlab {
namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Parsed scenario description. Every recognized key is read exactly once so
// that leftover keys can be reported as unknown afterwards.
// ---------------------------------------------------------------------------

struct ScenarioSpec {
  // [scenario]
  std::string name;
  std::string kind;
  std::string description;
  std::uint64_t seed = 0;

  // [law]
  std::string law_type;
  double gamma = 1.4;
  double state_constant = 1.0;
  double kappa = 1.0;
  bool full_line = false;

  // [coefficients]
  std::string coeff_mode;
  std::vector<double> A_vals, K_vals, B_vals;

  // [kernel]
  std::string kernel_family;
  double tau = 0.0;
  std::vector<double> kernel_mu, kernel_sigma;
  double kernel_trunc = 8.0;
  long long kernel_order = 48;
  std::string marginal1, marginal2;
  std::string kernel_file;
  bool kernel_normalize = false;

  // [darcy]
  bool has_darcy = false;
  std::vector<double> M0_vals, Kbar_vals, g_vals;

  // [grid]
  std::vector<double> grid_lo, grid_hi, grid_n;

  // [problem]
  double u_star = 0.0;
  std::string u0_shape;
  double amplitude = 1.0;
  std::string u0_file;
  double t_end = -1.0;
  double safety = 0.5;
  long long record_every = 0;

  // [geometry]
  std::vector<double> x0;

  // [checks]
  bool max_principle = true;
  bool growth = false;
  bool sign_transfer = false;
  std::string sign_sides;
  long long sign_samples = 5;
  bool decay = false;
  bool decay_edge = false;
  bool small_time = false;
  bool rate_independence = false;
  std::string rate_u0_2, rate_u0_3;
  double c1_override = -1.0;
  double c2_override = -1.0;
  double tol_res_C = 40.0;
  double eps_lambda = 1e-6;
  double fit_tol = 0.05;

  // [montecarlo]
  std::vector<double> particles;
  long long mc_steps = 0;
  long long sample_every = 0;
  double sigma0 = 0.0;
  std::vector<double> mc_center;
  double drift_shift = 0.0;
  long long drift_particles = 0;
};

ScenarioSpec parse_spec(const Config& cfg) {
  ScenarioSpec s;
  s.name = cfg.get_string("scenario.name", "");
  s.kind = cfg.get_string("scenario.kind", "pde");
  s.description = cfg.get_string("scenario.description", "");
  s.seed = cfg.get_uint("scenario.seed", 0);

  s.law_type = cfg.get_string("law.type", "ideal");
  s.gamma = cfg.get_double("law.gamma", 1.4);
  s.state_constant = cfg.get_double("law.state_constant", 1.0);
  s.kappa = cfg.get_double("law.kappa", 1.0);
  s.full_line = cfg.get_bool("law.full_line", false);

  s.coeff_mode = cfg.get_string("coefficients.mode", "direct");
  s.A_vals = cfg.get_doubles("coefficients.A", {});
  s.K_vals = cfg.get_doubles("coefficients.K", {});
  s.B_vals = cfg.get_doubles("coefficients.B", {});

  s.kernel_family = cfg.get_string("kernel.family", "");
  s.tau = cfg.get_double("kernel.tau", 0.0);
  s.kernel_mu = cfg.get_doubles("kernel.mu", {});
  s.kernel_sigma = cfg.get_doubles("kernel.sigma", {});
  s.kernel_trunc = cfg.get_double("kernel.trunc", 8.0);
  s.kernel_order = cfg.get_int("kernel.order", 48);
  s.marginal1 = cfg.get_string("kernel.marginal1", "");
  s.marginal2 = cfg.get_string("kernel.marginal2", "");
  s.kernel_file = cfg.get_string("kernel.file", "");
  s.kernel_normalize = cfg.get_bool("kernel.normalize", false);

  s.M0_vals = cfg.get_doubles("darcy.M0", {});
  s.Kbar_vals = cfg.get_doubles("darcy.K_bar", {});
  s.g_vals = cfg.get_doubles("darcy.g", {});
  s.has_darcy = !s.M0_vals.empty() || !s.Kbar_vals.empty() || !s.g_vals.empty();

  s.grid_lo = cfg.get_doubles("grid.lo", {});
  s.grid_hi = cfg.get_doubles("grid.hi", {});
  s.grid_n = cfg.get_doubles("grid.n", {});

  s.u_star = cfg.get_double("problem.u_star", 0.0);
  s.u0_shape = cfg.get_string("problem.u0", "sine");
  s.amplitude = cfg.get_double("problem.amplitude", 1.0);
  s.u0_file = cfg.get_string("problem.u0_file", "");
  s.t_end = cfg.get_double("problem.t_end", -1.0);
  s.safety = cfg.get_double("problem.safety", 0.5);
  s.record_every = cfg.get_int("problem.record_every", 0);

  s.x0 = cfg.get_doubles("geometry.x0", {});

  s.max_principle = cfg.get_bool("checks.max_principle", true);
  s.growth = cfg.get_bool("checks.growth", false);
  s.sign_transfer = cfg.get_bool("checks.sign_transfer", false);
  s.sign_sides = cfg.get_string("checks.sign_sides", "both");
  s.sign_samples = cfg.get_int("checks.sign_samples", 5);
  s.decay = cfg.get_bool("checks.decay", false);
  s.decay_edge = cfg.get_bool("checks.decay_edge", false);
  s.small_time = cfg.get_bool("checks.small_time", false);
  s.rate_independence = cfg.get_bool("checks.rate_independence", false);
  s.rate_u0_2 = cfg.get_string("checks.rate_u0_2", "");
  s.rate_u0_3 = cfg.get_string("checks.rate_u0_3", "");
  s.c1_override = cfg.get_double("checks.c1_override", -1.0);
  s.c2_override = cfg.get_double("checks.c2_override", -1.0);
  s.tol_res_C = cfg.get_double("checks.tol_res_C", 40.0);
  s.eps_lambda = cfg.get_double("checks.eps_lambda", 1e-6);
  s.fit_tol = cfg.get_double("checks.fit_tol", 0.05);

  s.particles = cfg.get_doubles("montecarlo.particles", {});
  s.mc_steps = cfg.get_int("montecarlo.steps", 0);
  s.sample_every = cfg.get_int("montecarlo.sample_every", 0);
  s.sigma0 = cfg.get_double("montecarlo.sigma0", 0.0);
  s.mc_center = cfg.get_doubles("montecarlo.center", {});
  s.drift_shift = cfg.get_double("montecarlo.drift_shift", 0.0);
  s.drift_particles = cfg.get_int("montecarlo.drift_particles", 0);
  return s;
}

[[noreturn]] void fail_cfg(const Config& cfg, const std::string& msg) {
  fail(Err::Config, cfg.origin() + ": " + msg);
}

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

std::shared_ptr<const StateLaw> build_law(const Config& cfg, const ScenarioSpec& s) {
  if (s.law_type == "ideal") return StateLaw::ideal(s.state_constant, s.full_line);
  if (s.law_type == "isentropic") return StateLaw::isentropic(s.gamma, s.state_constant);
  if (s.law_type == "slightly_compressible") return StateLaw::slightly_compressible(s.kappa);
  fail_cfg(cfg, "law.type must be ideal, isentropic, or slightly_compressible (got '" +
                    s.law_type + "')");
}

Grid build_grid(const Config& cfg, const ScenarioSpec& s) {
  if (s.grid_lo.empty() || s.grid_hi.empty() || s.grid_n.empty())
    fail_cfg(cfg, "grid.lo, grid.hi, and grid.n are required");
  const std::size_t d = s.grid_lo.size();
  if (s.grid_hi.size() != d || s.grid_n.size() != d)
    fail_cfg(cfg, "grid.lo, grid.hi, and grid.n must have equal lengths");
  if (d == 1) return Grid::interval(s.grid_lo[0], s.grid_hi[0], static_cast<int>(s.grid_n[0]));
  if (d == 2)
    return Grid::rectangle(s.grid_lo[0], s.grid_hi[0], static_cast<int>(s.grid_n[0]),
                           s.grid_lo[1], s.grid_hi[1], static_cast<int>(s.grid_n[1]));
  fail_cfg(cfg, "grids are one- or two-dimensional");
}

Mat mat_from(const Config& cfg, const std::vector<double>& vals, int dim, const char* key) {
  if (vals.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    fail_cfg(cfg, std::string(key) + " needs " + std::to_string(dim * dim) +
                      " row-major entries, got " + std::to_string(vals.size()));
  Mat m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = vals[static_cast<std::size_t>(i * dim + j)];
  return m;
}

Vec vec_from(const Config& cfg, const std::vector<double>& vals, int dim, const char* key) {
  if (vals.size() != static_cast<std::size_t>(dim))
    fail_cfg(cfg, std::string(key) + " needs " + std::to_string(dim) + " entries, got " +
                      std::to_string(vals.size()));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = vals[static_cast<std::size_t>(i)];
  return v;
}

Marginal build_marginal(const Config& cfg, const std::string& desc, double shift, double trunc) {
  std::istringstream in(desc);
  std::string type;
  double center = 0.0, param = 0.0;
  if (!(in >> type >> center >> param))
    fail_cfg(cfg, "marginal description must read '<type> <center> <param>', got '" + desc + "'");
  center += shift;
  if (type == "uniform") return Marginal::uniform(center, param);
  if (type == "triangular") return Marginal::triangular(center, param);
  if (type == "gaussian") return Marginal::gaussian(center, param, trunc);
  fail_cfg(cfg, "marginal type must be uniform, triangular, or gaussian (got '" + type + "')");
}

// shift0 moves the displacement mean along the first axis (used by the
// drifted walk validation run).
ProbabilityKernel build_kernel(const Config& cfg, const ScenarioSpec& s, double shift0) {
  if (s.tau <= 0.0) fail_cfg(cfg, "kernel.tau must be positive");
  if (s.kernel_family == "gaussian") {
    if (s.kernel_mu.empty()) fail_cfg(cfg, "kernel.mu is required for the gaussian family");
    const int dim = static_cast<int>(s.kernel_mu.size());
    Vec mu = vec_from(cfg, s.kernel_mu, dim, "kernel.mu");
    mu[0] += shift0;
    Mat sigma = mat_from(cfg, s.kernel_sigma, dim, "kernel.sigma");
    return ProbabilityKernel::gaussian(mu, sigma, s.tau, s.kernel_trunc);
  }
  if (s.kernel_family == "product") {
    if (s.marginal1.empty()) fail_cfg(cfg, "kernel.marginal1 is required for the product family");
    std::vector<Marginal> ms;
    ms.push_back(build_marginal(cfg, s.marginal1, shift0, s.kernel_trunc));
    if (!s.marginal2.empty()) ms.push_back(build_marginal(cfg, s.marginal2, 0.0, s.kernel_trunc));
    return ProbabilityKernel::product(std::move(ms), s.tau);
  }
  if (s.kernel_family == "tabulated") {
    if (s.kernel_file.empty()) fail_cfg(cfg, "kernel.file is required for the tabulated family");
    if (shift0 != 0.0) fail_cfg(cfg, "drift shifts are not supported for tabulated kernels");
    return ProbabilityKernel::tabulated_from_file(s.kernel_file, s.tau, s.kernel_normalize);
  }
  fail_cfg(cfg, "kernel.family must be gaussian, product, or tabulated (got '" + s.kernel_family +
                    "')");
}

PDECoefficients build_coefficients(const Config& cfg, const ScenarioSpec& s,
                                   std::shared_ptr<const StateLaw> law, const Grid& grid,
                                   double t_end) {
  if (s.coeff_mode == "direct") {
    const Mat a = mat_from(cfg, s.A_vals, grid.dim, "coefficients.A");
    const Mat k = mat_from(cfg, s.K_vals, grid.dim, "coefficients.K");
    const Vec b = vec_from(cfg, s.B_vals, grid.dim, "coefficients.B");
    return PDECoefficients::constant(a, k, b, std::move(law));
  }
  if (s.coeff_mode != "kernel")
    fail_cfg(cfg, "coefficients.mode must be direct or kernel (got '" + s.coeff_mode + "')");

  ProbabilityKernel kernel = build_kernel(cfg, s, 0.0);
  if (kernel.dim() != grid.dim) fail_cfg(cfg, "kernel and grid dimensions differ");

  DarcyData darcy;
  darcy.state_constant = law->state_constant();
  if (s.has_darcy) {
    darcy.M0 = mat_from(cfg, s.M0_vals, grid.dim, "darcy.M0");
    darcy.K_bar = s.Kbar_vals.empty() ? Mat::identity(grid.dim)
                                      : mat_from(cfg, s.Kbar_vals, grid.dim, "darcy.K_bar");
    darcy.g = s.g_vals.empty() ? Vec(grid.dim) : vec_from(cfg, s.g_vals, grid.dim, "darcy.g");
  } else {
    darcy.M0 = Mat(grid.dim);  // zero: no flux, no drift
    darcy.K_bar = Mat::identity(grid.dim);
    darcy.g = Vec(grid.dim);
  }

  std::vector<Vec> pts;
  pts.push_back(grid.point(1, grid.dim == 2 ? 1 : 0));
  pts.push_back(grid.point(grid.N[0] / 2 + 1, grid.dim == 2 ? grid.N[1] / 2 + 1 : 0));
  pts.push_back(grid.point(grid.N[0], grid.dim == 2 ? grid.N[1] : 0));
  const int order = static_cast<int>(s.kernel_order);
  auto moments = [kernel, order](const Vec& x, double t) {
    return kernel_moments(kernel, x, t, order);
  };
  return assemble_coefficients(moments, darcy, std::move(law), pts, {0.0, 0.5 * t_end, t_end});
}

void fill_profile(Field& f, const Grid& g, const std::string& shape, double amp, double u_star,
                  const Config& cfg) {
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const int jmax = g.dim == 2 ? g.N[1] : 0;
  const double L0 = g.hi[0] - g.lo[0];
  const double L1 = g.dim == 2 ? g.hi[1] - g.lo[1] : 1.0;
  if (shape == "log_sine" && amp <= -1.0)
    fail_cfg(cfg, "log_sine amplitude must exceed -1");
  for (int i = 1; i <= g.N[0]; ++i)
    for (int j = (g.dim == 2 ? 1 : 0); j <= jmax; ++j) {
      const double s1 = (g.coord(0, i) - g.lo[0]) / L0;
      const double s2 = g.dim == 2 ? (g.coord(1, j) - g.lo[1]) / L1 : 0.5;
      double v;
      if (shape == "sine") {
        v = amp * std::sin(kPi * s1) * (g.dim == 2 ? std::sin(kPi * s2) : 1.0);
      } else if (shape == "bump") {
        const double b1 = 4.0 * s1 * (1.0 - s1);
        const double b2 = g.dim == 2 ? 4.0 * s2 * (1.0 - s2) : 1.0;
        v = amp * b1 * b1 * b2 * b2;
      } else if (shape == "log_sine") {
        const double prof = std::sin(kPi * s1) * (g.dim == 2 ? std::sin(kPi * s2) : 1.0);
        v = -std::log1p(amp * prof);
      } else if (shape == "constant") {
        v = amp;
      } else {
        fail_cfg(cfg, "u0 shape must be sine, bump, log_sine, constant, or custom (got '" +
                          shape + "')");
      }
      f.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)] = u_star + v;
    }
}

Field build_u0(const Config& cfg, const ScenarioSpec& s, const Grid& g, const std::string& shape,
               double amp) {
  Field f = Field::constant(g, s.u_star, 0.0);
  if (shape == "custom") {
    if (s.u0_file.empty()) fail_cfg(cfg, "u0 = custom needs problem.u0_file");
    std::ifstream in(s.u0_file);
    if (!in) fail_cfg(cfg, "cannot open u0_file '" + s.u0_file + "'");
    for (std::size_t n = 0; n < f.v.size(); ++n)
      if (!(in >> f.v[n]))
        fail_cfg(cfg, "u0_file '" + s.u0_file + "' holds fewer than " +
                          std::to_string(f.v.size()) + " values");
    // Boundary ring must match the Dirichlet value exactly.
    const std::size_t sx = static_cast<std::size_t>(g.ny());
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j)
        if (g.on_boundary(i, g.dim == 2 ? j : 0))
          f.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)] = s.u_star;
    return f;
  }
  fill_profile(f, g, shape, amp, s.u_star, cfg);
  return f;
}

std::pair<std::string, double> parse_profile_pair(const Config& cfg, const std::string& desc,
                                                  const char* key) {
  std::istringstream in(desc);
  std::string shape;
  double amp = 0.0;
  if (!(in >> shape >> amp))
    fail_cfg(cfg, std::string(key) + " must read '<shape> <amplitude>', got '" + desc + "'");
  return {shape, amp};
}

const char* law_name(LawKind k) {
  switch (k) {
    case LawKind::Ideal: return "ideal";
    case LawKind::Isentropic: return "isentropic";
    case LawKind::SlightlyCompressible: return "slightly_compressible";
    case LawKind::Custom: return "custom";
  }
  return "unknown";
}

Field map_field(const Field& u, const Transform& F) {
  Field w = u;
  for (double& v : w.v) v = F.f(v);
  return w;
}

void subsample_rows(std::size_t n, std::size_t cap, std::vector<std::size_t>& idx) {
  idx.clear();
  if (n == 0) return;
  const std::size_t stride = n <= cap ? 1 : (n + cap - 1) / cap;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
}

struct OutputWriter {
  std::string dir;
  std::vector<std::string>* written = nullptr;

  bool active() const { return !dir.empty(); }
  std::ofstream open(const std::string& base) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / base).string();
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Err::Io, "cannot open output file '" + path + "'");
    written->push_back(path);
    return out;
  }
};

void write_summary_csv(const OutputWriter& w, const std::string& name, const Trajectory& traj) {
  std::ofstream out = w.open(name + "_summary.csv");
  out << "t,umax,umin,osc\n";
  std::vector<std::size_t> idx;
  subsample_rows(traj.summary.size(), 2000, idx);
  for (std::size_t i : idx) {
    const SummaryRow& r = traj.summary[i];
    out << fmt_g(r.t) << ',' << fmt_g(r.umax) << ',' << fmt_g(r.umin) << ',' << fmt_g(r.osc())
        << '\n';
  }
}

void write_fields_csv(const OutputWriter& w, const std::string& name, const Grid& g,
                      const std::vector<Field>& fields) {
  std::ofstream out = w.open(name + "_fields.csv");
  out << (g.dim == 2 ? "t,x,y,value\n" : "t,x,value\n");
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  for (const Field& f : fields)
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        out << fmt_g(f.t) << ',' << fmt_g(g.coord(0, i));
        if (g.dim == 2) out << ',' << fmt_g(g.coord(1, j));
        out << ',' << fmt_g(f.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)])
            << '\n';
      }
}

void write_report_files(const OutputWriter& w, const std::string& name,
                        const std::string& constants, const std::vector<Report>& reports) {
  {
    std::ofstream out = w.open(name + "_constants.txt");
    out << constants;
  }
  {
    std::ofstream out = w.open(name + "_report.txt");
    out << constants << '\n';
    for (const Report& r : reports) out << r.to_text() << '\n';
  }
  {
    std::ofstream out = w.open(name + "_report.csv");
    std::string csv = Report::csv_header();
    for (const Report& r : reports) r.append_csv(csv);
    out << csv;
  }
}

// ---------------------------------------------------------------------------
// PDE pipeline.
// ---------------------------------------------------------------------------

ScenarioOutcome run_pde(const Config& cfg, const ScenarioSpec& s, const RunOptions& ropts) {
  ScenarioOutcome out;
  out.name = s.name;

  if (!(s.t_end >= 0.0)) fail_cfg(cfg, "problem.t_end is required and must be nonnegative");
  std::shared_ptr<const StateLaw> law = build_law(cfg, s);
  const Grid grid = build_grid(cfg, s);
  PDECoefficients coeffs = build_coefficients(cfg, s, law, grid, s.t_end);

  IBVProblem prob;
  prob.coeffs = coeffs;
  prob.u_star = s.u_star;
  prob.u0 = build_u0(cfg, s, grid, s.u0_shape, s.amplitude);
  validate_problem(prob, grid);

  const double m_star = prob.u0.min();
  const double M_star = prob.u0.max();

  std::vector<double> t_samples{0.0};
  if (coeffs.time_dependent) t_samples = {0.0, 0.5 * s.t_end, s.t_end};
  CoefficientBounds bounds = coefficient_bounds(coeffs, grid, t_samples, m_star, M_star);
  if (s.c1_override >= 0.0) {
    require(s.c1_override >= bounds.c1, Err::InvalidBound,
            "c1_override must not undercut the measured flux bound");
    bounds.c1 = s.c1_override;
  }
  if (s.c2_override >= 0.0) {
    require(s.c2_override >= bounds.c2, Err::InvalidBound,
            "c2_override must not undercut the measured flux bound");
    bounds.c2 = s.c2_override;
  }

  const Thresholds th = lambda_thresholds(bounds.c0, bounds.c1, bounds.c2, true, s.eps_lambda);
  const bool want_sub = s.sign_sides != "super";
  const bool want_super = s.sign_sides != "sub";
  if (s.sign_sides != "both" && s.sign_sides != "sub" && s.sign_sides != "super")
    fail_cfg(cfg, "checks.sign_sides must be both, sub, or super");

  // The lambda1-side substitution; extended through a boundary state that
  // sits on the closure of the law domain whenever that is possible.
  Transform F1 = make_transform(law, th.lambda1);
  const EdgeClassification edge_cls = classify_edges(*law, m_star, M_star);
  if (edge_cls.kind == EdgeCase::LowerOutside) F1 = extend_to_edge(F1, m_star, true, edge_cls);
  std::optional<Transform> F2;
  if (want_super) {
    F2 = make_transform(law, th.lambda2);
    if (edge_cls.kind == EdgeCase::UpperOutside) *F2 = extend_to_edge(*F2, M_star, false, edge_cls);
    if (edge_cls.kind == EdgeCase::LowerOutside)
      fail_cfg(cfg,
               "the lambda2-side substitution cannot cross the lower domain edge; "
               "set checks.sign_sides = sub");
  }

  const Vec x0 = s.x0.empty() ? default_exterior_point(grid)
                              : vec_from(cfg, s.x0, grid.dim, "geometry.x0");
  const DomainGeometry geom = geometry(grid, x0);
  const bool need_prefactor = s.decay && !s.decay_edge;
  const GrowthConstants gc = growth_constants(bounds, geom, *law, th.lambda1, th.lambda2, s.u_star,
                                              m_star, M_star, need_prefactor);
  const BarrierSpec barrier = barrier_spec(bounds, geom, gc);

  // --- solve, capturing state pairs for the sign-transfer samples --------
  struct SignSample {
    Field prev, next;
    double dt = 0.0;
  };
  std::vector<SignSample> samples;
  std::vector<double> targets;
  if (s.sign_transfer && s.t_end > 0.0) {
    const long long n = std::max<long long>(1, s.sign_samples);
    for (long long k = 1; k <= n; ++k)
      targets.push_back(s.t_end * static_cast<double>(k) / static_cast<double>(n));
  }
  std::size_t next_target = 0;

  SolveOptions sopts;
  sopts.safety = s.safety;
  sopts.record_every = static_cast<std::size_t>(std::max<long long>(0, s.record_every));
  if (!targets.empty()) {
    sopts.observer = [&](const Field& prev, const Field& next, double dt, std::size_t) {
      while (next_target < targets.size() && next.t >= targets[next_target] * (1.0 - 1e-12)) {
        samples.push_back({prev, next, dt});
        ++next_target;
      }
    };
  }

  const double dt_first = s.t_end > 0.0 ? stable_dt(prob, grid, s.safety) : 0.0;
  Trajectory traj = solve(prob, grid, s.t_end, sopts);

  // --- checks --------------------------------------------------------------
  if (s.max_principle) out.reports.push_back(check_max_principle(traj));

  if (s.growth) {
    const Trajectory w1 = transform_trajectory(traj, F1);
    out.reports.push_back(check_growth_lemma(w1, gc));
    const Report& r = out.reports.back();
    double worst = std::numeric_limits<double>::infinity();
    for (const CheckRow& row : r.rows) worst = std::min(worst, row.slack);
    out.metrics["growth.windows"] = static_cast<double>(r.rows.size());
    out.metrics["growth.worst_slack"] = worst;
  }

  if (s.sign_transfer) {
    Report rep;
    rep.name = "sign_transfer";
    const double h_max = grid.dim == 2 ? std::max(grid.h[0], grid.h[1]) : grid.h[0];
    const double h2 = h_max * h_max;
    double ratio_sub = -std::numeric_limits<double>::infinity();
    double ratio_super = -std::numeric_limits<double>::infinity();
    double denom_max = 0.0;
    const std::size_t sx = static_cast<std::size_t>(grid.ny());
    for (const SignSample& smp : samples) {
      LinearOperator op;
      op.dim = grid.dim;
      op.A = coeffs.A;
      const Field& frozen = smp.prev;
      op.b = [&frozen, &grid, &coeffs, sx](const Vec& x, double t) {
        const int i = static_cast<int>(std::lround((x[0] - grid.lo[0]) / grid.h[0]));
        const int j = grid.dim == 2
                          ? static_cast<int>(std::lround((x[1] - grid.lo[1]) / grid.h[1]))
                          : 0;
        const double uv =
            frozen.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)];
        return uv * coeffs.B(x, t);
      };
      const double denom = h2 + smp.dt;
      denom_max = std::max(denom_max, denom);
      const double tol_res = s.tol_res_C * denom;
      const int jlo = grid.dim == 2 ? 1 : 0;
      const int jhi = grid.dim == 2 ? grid.N[1] : 0;
      auto interior_extrema = [&](const Field& r, double& rmin, double& rmax) {
        rmin = std::numeric_limits<double>::infinity();
        rmax = -rmin;
        for (int i = 1; i <= grid.N[0]; ++i)
          for (int j = jlo; j <= jhi; ++j) {
            const double v = r.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)];
            rmin = std::min(rmin, v);
            rmax = std::max(rmax, v);
          }
      };
      if (want_sub) {
        const Field w0 = map_field(smp.prev, F1);
        const Field w1 = map_field(smp.next, F1);
        const Field r = linear_residual(w0, w1, smp.dt, op, grid);
        double rmin, rmax;
        interior_extrema(r, rmin, rmax);
        rep.add_le("sub_side", "residual max at t=" + fmt_g(smp.prev.t), rmax, 0.0, tol_res);
        ratio_sub = std::max(ratio_sub, rmax / denom);
      }
      if (want_super) {
        const Field w0 = map_field(smp.prev, *F2);
        const Field w1 = map_field(smp.next, *F2);
        const Field r = linear_residual(w0, w1, smp.dt, op, grid);
        double rmin, rmax;
        interior_extrema(r, rmin, rmax);
        rep.add_ge("super_side", "residual min at t=" + fmt_g(smp.prev.t), rmin, 0.0, tol_res);
        ratio_super = std::max(ratio_super, -rmin / denom);
      }
    }
    if (samples.empty()) rep.note("no sample pairs were captured (t_end = 0?)");
    out.reports.push_back(std::move(rep));
    out.metrics["sign.samples"] = static_cast<double>(samples.size());
    out.metrics["sign.h2_plus_dt_max"] = denom_max;
    if (want_sub) out.metrics["sign.sub_ratio"] = ratio_sub;
    if (want_super) out.metrics["sign.super_ratio"] = ratio_super;
  }

  if (s.decay) {
    DecayOptions dopts;
    dopts.small_time = s.small_time;
    dopts.fit_tol_factor = s.fit_tol;
    if (s.decay_edge) dopts.power_m = bounds.c1 / bounds.c0 + 1.0;
    DecayReport dr = check_decay(traj, s.u_star, gc, dopts);
    out.reports.push_back(std::move(dr.report));
    out.metrics["decay.nu_emp"] = dr.nu_emp;
    out.metrics["decay.nu_required"] = dr.nu_required;
    out.metrics["decay.envelope_worst_slack"] = dr.envelope_worst_slack;
    if (s.decay_edge) out.metrics["decay.power_m"] = dopts.power_m;
  }

  std::vector<Trajectory> extra;
  if (s.rate_independence) {
    if (s.rate_u0_2.empty() || s.rate_u0_3.empty())
      fail_cfg(cfg, "rate independence needs checks.rate_u0_2 and checks.rate_u0_3");
    for (const std::string& desc : {s.rate_u0_2, s.rate_u0_3}) {
      const auto [shape, amp] = parse_profile_pair(cfg, desc, "checks.rate_u0_*");
      IBVProblem p2 = prob;
      p2.u0 = build_u0(cfg, s, grid, shape, amp);
      validate_problem(p2, grid);
      SolveOptions so2;
      so2.safety = s.safety;
      extra.push_back(solve(p2, grid, s.t_end, so2));
    }
    std::vector<const Trajectory*> all{&traj, &extra[0], &extra[1]};
    Report rr = check_rate_independence(all, s.u_star, bounds, geom, s.fit_tol);
    double min_rate = std::numeric_limits<double>::infinity();
    double nu_star = 0.0;
    for (const CheckRow& row : rr.rows) {
      min_rate = std::min(min_rate, row.observed);
      nu_star = row.bound;
    }
    out.reports.push_back(std::move(rr));
    out.metrics["rate.min_fitted"] = min_rate;
    out.metrics["rate.nu_star"] = nu_star;
  }

  // --- constants block ------------------------------------------------------
  std::ostringstream cs;
  auto put = [&cs, &out](const char* key, double v) {
    cs << key << " = " << fmt_g(v) << '\n';
    out.metrics[key] = v;
  };
  cs << "scenario = " << s.name << '\n';
  cs << "kind = pde\n";
  cs << "law = " << law_name(law->kind()) << '\n';
  put("state_constant", law->state_constant());
  put("dim", grid.dim);
  put("grid.n1", grid.N[0]);
  if (grid.dim == 2) put("grid.n2", grid.N[1]);
  put("grid.h1", grid.h[0]);
  if (grid.dim == 2) put("grid.h2", grid.h[1]);
  put("u_star", s.u_star);
  put("m_star", m_star);
  put("M_star", M_star);
  put("t_end", s.t_end);
  put("dt_first", dt_first);
  put("steps", static_cast<double>(traj.summary.empty() ? 0 : traj.summary.size() - 1));
  put("c0", bounds.c0);
  put("c1", bounds.c1);
  put("c2", bounds.c2);
  put("M0_bound", bounds.M0_bound);
  put("M1", bounds.M1);
  put("M2", bounds.M2);
  put("lambda1", th.lambda1);
  put("lambda2", th.lambda2);
  cs << "F1_form = " << closed_form_name(F1.closed_form()) << '\n';
  if (F2) cs << "F2_form = " << closed_form_name(F2->closed_form()) << '\n';
  put("r0", geom.r0);
  put("R", geom.R);
  put("beta", gc.beta);
  put("T_star", gc.T_star);
  put("eta_star", gc.eta_star);
  put("nu", gc.nu);
  put("nu0", gc.nu0);
  if (gc.has_prefactor) {
    put("C1", gc.C1);
    put("C2", gc.C2);
    put("C0", gc.C0);
  }
  put("barrier.mu", barrier.mu);
  put("barrier.d0", barrier.d0);
  put("barrier.d1", barrier.d1);
  put("barrier.d3", barrier.d3);
  put("barrier.eta", barrier.eta);
  out.constants_text = cs.str();

  for (const Report& r : out.reports) out.passed = out.passed && r.passed;

  if (!ropts.out_dir.empty()) {
    OutputWriter w{ropts.out_dir, &out.files_written};
    write_summary_csv(w, s.name, traj);
    write_fields_csv(w, s.name, grid, traj.fields);
    write_report_files(w, s.name, out.constants_text, out.reports);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo pipeline.
// ---------------------------------------------------------------------------

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 0.0, Err::InvalidArgument, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

Field gaussian_density_field(const Grid& g, const Vec& center, double sigma0) {
  Field f = Field::zeros(g, 0.0);
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  const double norm = std::pow(2.0 * kPi * sigma0 * sigma0, -0.5 * g.dim);
  for (int i = 1; i <= g.N[0]; ++i)
    for (int j = (g.dim == 2 ? 1 : 0); j <= (g.dim == 2 ? g.N[1] : 0); ++j) {
      const Vec x = g.point(i, j);
      double q = 0.0;
      for (int d = 0; d < g.dim; ++d) q += (x[d] - center[d]) * (x[d] - center[d]);
      f.v[static_cast<std::size_t>(i) * sx + static_cast<std::size_t>(j)] =
          norm * std::exp(-q / (2.0 * sigma0 * sigma0));
    }
  return f;
}

ScenarioOutcome run_mc(const Config& cfg, const ScenarioSpec& s, const RunOptions& ropts) {
  ScenarioOutcome out;
  out.name = s.name;

  if (s.particles.empty()) fail_cfg(cfg, "montecarlo.particles is required");
  if (s.mc_steps <= 0) fail_cfg(cfg, "montecarlo.steps must be positive");
  if (s.sample_every <= 0) fail_cfg(cfg, "montecarlo.sample_every must be positive");
  if (s.sigma0 <= 0.0) fail_cfg(cfg, "montecarlo.sigma0 must be positive");

  const Grid grid = build_grid(cfg, s);
  ProbabilityKernel kernel = build_kernel(cfg, s, 0.0);
  if (kernel.dim() != grid.dim) fail_cfg(cfg, "kernel and grid dimensions differ");
  const Vec center = s.mc_center.empty() ? Vec(grid.dim)
                                         : vec_from(cfg, s.mc_center, grid.dim,
                                                    "montecarlo.center");
  const std::uint64_t seed = ropts.seed.value_or(s.seed);

  const MomentResult mr = kernel_moments(kernel, center, 0.0, static_cast<int>(s.kernel_order));

  Report rep;
  rep.name = "montecarlo";

  // Forward density equation marched from the exact initial Gaussian.
  LinearOperator op;
  op.dim = grid.dim;
  op.A = [A = mr.A](const Vec&, double) { return A; };
  op.b = [d = mr.drift](const Vec&, double) { return d; };

  std::string csv = "n_particles,t,l1,linf\n";
  std::vector<double> log_n, log_l1, l1_means;
  double mass_min = std::numeric_limits<double>::infinity();

  for (double np_raw : s.particles) {
    const std::size_t np = static_cast<std::size_t>(np_raw);
    require(np >= 100, Err::InvalidArgument, "particle counts below 100 are not meaningful");
    WalkEnsemble ens = ensemble_from_gaussian(kernel, np, center, s.sigma0, seed);
    Field pde = gaussian_density_field(grid, center, s.sigma0);
    std::vector<Field> walk_fields, pde_fields;
    for (long long step = 1; step <= s.mc_steps; ++step) {
      walk_step(ens);
      if (step % s.sample_every == 0 || step == s.mc_steps) {
        walk_fields.push_back(empirical_density(ens, grid));
        const double t_target = ens.time();
        pde = solve_linear(pde, op, grid, t_target, 0.0, s.safety);
        pde_fields.push_back(pde);
      }
    }
    const DensityComparison cmp = compare_to_pde(walk_fields, pde_fields, grid);
    double l1_mean = 0.0;
    for (std::size_t i = 0; i < cmp.times.size(); ++i) {
      l1_mean += cmp.l1[i];
      csv += fmt_g(static_cast<double>(np)) + ',' + fmt_g(cmp.times[i]) + ',' +
             fmt_g(cmp.l1[i]) + ',' + fmt_g(cmp.linf[i]) + '\n';
    }
    l1_mean /= static_cast<double>(cmp.times.size());
    log_n.push_back(std::log(static_cast<double>(np)));
    log_l1.push_back(std::log(l1_mean));
    l1_means.push_back(l1_mean);
    const double mass = field_integral(walk_fields.back(), grid);
    mass_min = std::min(mass_min, mass);
    rep.add_ge("mass", "retained mass at t_end, N=" + std::to_string(np), mass, 1.0, 1e-3);
  }

  double slope = 0.0;
  if (log_n.size() >= 2) {
    slope = ls_slope(log_n, log_l1);
    rep.add_le("l1_order", "|slope of ln L1 vs ln N + 1/2|", std::fabs(slope + 0.5), 0.15, 0.0);
  } else {
    rep.note("a single particle count cannot resolve the sampling order");
  }

  // Drifted companion run: the ensemble mean must track drift * t.
  double drift_err = 0.0, drift_band = 0.0;
  if (s.drift_shift != 0.0) {
    const std::size_t nd = static_cast<std::size_t>(
        s.drift_particles > 0 ? s.drift_particles : static_cast<long long>(s.particles.back()));
    ProbabilityKernel shifted = build_kernel(cfg, s, s.drift_shift);
    const MomentResult md = kernel_moments(shifted, center, 0.0, static_cast<int>(s.kernel_order));
    WalkEnsemble ens = ensemble_from_gaussian(shifted, nd, center, s.sigma0, seed + 1);
    for (long long step = 1; step <= s.mc_steps; ++step) walk_step(ens);
    const Vec mean = ensemble_mean(ens);
    const double expected = center[0] + md.drift[0] * ens.time();
    drift_err = std::fabs(mean[0] - expected);
    const double var_step = md.a_bar(0, 0) - md.E[0] * md.E[0];
    const double sd = std::sqrt(s.sigma0 * s.sigma0 +
                                var_step * static_cast<double>(s.mc_steps));
    drift_band = 5.0 * sd / std::sqrt(static_cast<double>(nd));
    rep.add_le("drift", "|ensemble mean - drift*t| (5 sigma band)", drift_err, 0.0, drift_band);
  }

  out.reports.push_back(std::move(rep));
  for (const Report& r : out.reports) out.passed = out.passed && r.passed;

  std::ostringstream cs;
  auto put = [&cs, &out](const char* key, double v) {
    cs << key << " = " << fmt_g(v) << '\n';
    out.metrics[key] = v;
  };
  cs << "scenario = " << s.name << '\n';
  cs << "kind = montecarlo\n";
  put("dim", grid.dim);
  put("tau", kernel.tau());
  put("A", mr.A(0, 0));
  put("drift", mr.drift[0]);
  put("sigma0", s.sigma0);
  put("steps", static_cast<double>(s.mc_steps));
  put("grid.h1", grid.h[0]);
  put("seed", static_cast<double>(seed));
  put("mc.slope", slope);
  put("mc.mass_min", mass_min);
  for (std::size_t i = 0; i < l1_means.size(); ++i) {
    put(("mc.n_" + std::to_string(i)).c_str(), s.particles[i]);
    put(("mc.l1_" + std::to_string(i)).c_str(), l1_means[i]);
  }
  if (s.drift_shift != 0.0) {
    put("mc.drift_err", drift_err);
    put("mc.drift_band", drift_band);
  }
  out.constants_text = cs.str();

  if (!ropts.out_dir.empty()) {
    OutputWriter w{ropts.out_dir, &out.files_written};
    {
      std::ofstream f = w.open(s.name + "_mc.csv");
      f << csv;
    }
    write_report_files(w, s.name, out.constants_text, out.reports);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in presets.
// ---------------------------------------------------------------------------

struct PresetEntry {
  const char* name;
  const char* description;
  const char* text;
};

const PresetEntry kPresets[] = {
    {"heat_baseline",
     "1D constant-diffusion baseline: window contraction, small-time absorption, decay rates",
     R"(
[scenario]
name = heat_baseline
kind = pde

[law]
type = ideal
state_constant = 1
full_line = true

[coefficients]
mode = direct
A = 1
K = 0
B = 0

[grid]
lo = 1
hi = 2
n = 160

[problem]
u_star = 0
u0 = sine
amplitude = 1
t_end = 10

[checks]
growth = true
sign_transfer = true
decay = true
small_time = true
rate_independence = true
rate_u0_2 = bump 0.8
rate_u0_3 = sine 0.3
)"},
    {"ideal_gas",
     "Linear-pressure gas whose exponential substitution collapses the flow to the heat equation",
     R"(
[scenario]
name = ideal_gas
kind = pde

[law]
type = ideal
state_constant = 1
full_line = true

[coefficients]
mode = direct
A = 1
K = 1
B = 0

[grid]
lo = 0
hi = 3.141592653589793
n = 128

[problem]
u_star = 0
u0 = log_sine
amplitude = 0.1
t_end = 25

[geometry]
x0 = -3.141592653589793

[checks]
growth = true
sign_transfer = true
decay = true
rate_independence = true
rate_u0_2 = sine 0.05
rate_u0_3 = bump 0.08
)"},
    {"isentropic_gamma14",
     "2D adiabatic gas: kernel-derived anisotropic diffusion, buoyant drift, adiabatic flux",
     R"(
[scenario]
name = isentropic_gamma14
kind = pde

[law]
type = isentropic
gamma = 1.4
state_constant = 0.05

[coefficients]
mode = kernel

[kernel]
family = gaussian
tau = 0.05
mu = 0 0
sigma = 0.1 0.03 0.03 0.06
trunc = 8
order = 48

[darcy]
M0 = 1 0 0 1
K_bar = 1 0.2 0.2 0.8
g = 0 -0.2

[grid]
lo = 0 0
hi = 1 1
n = 64 64

[problem]
u_star = 1
u0 = bump
amplitude = 0.5
t_end = 1.1

[geometry]
x0 = -1 0.5

[checks]
growth = true
sign_transfer = true
decay = true
rate_independence = true
rate_u0_2 = sine 0.3
rate_u0_3 = bump 0.2
)"},
    {"slightly_compressible",
     "1D weakly compressible liquid: kernel diffusion, gravity drift, logarithmic pressure",
     R"(
[scenario]
name = slightly_compressible
kind = pde

[law]
type = slightly_compressible
kappa = 0.5

[coefficients]
mode = kernel

[kernel]
family = gaussian
tau = 0.005
mu = 0
sigma = 0.01
trunc = 8
order = 48

[darcy]
M0 = 1
K_bar = 0.5
g = 0.3

[grid]
lo = 0
hi = 1
n = 128

[problem]
u_star = 1
u0 = sine
amplitude = 0.4
t_end = 6

[checks]
growth = true
sign_transfer = true
decay = true
rate_independence = true
rate_u0_2 = bump 0.3
rate_u0_3 = sine 0.15
)"},
    {"slightly_compressible_edge",
     "Boundary state pinned at the law's domain edge; one-sided power decay envelope",
     R"(
[scenario]
name = slightly_compressible_edge
kind = pde

[law]
type = slightly_compressible
kappa = 1

[coefficients]
mode = direct
A = 1
K = 0
B = -0.3

[grid]
lo = 0
hi = 1
n = 96

[problem]
u_star = 0
u0 = bump
amplitude = 0.8
t_end = 8

[checks]
growth = true
sign_transfer = true
sign_sides = sub
decay = true
decay_edge = true
c1_override = 0.5
)"},
    {"aniso2d_kernel",
     "2D kernel-derived diffusion with negative cross-coupling and no lower-order terms",
     R"(
[scenario]
name = aniso2d_kernel
kind = pde

[law]
type = ideal
state_constant = 1
full_line = true

[coefficients]
mode = kernel

[kernel]
family = gaussian
tau = 0.05
mu = 0 0
sigma = 0.1 -0.04 -0.04 0.08
trunc = 8
order = 48

[grid]
lo = 0 0
hi = 1 1
n = 128 128

[problem]
u_star = 0
u0 = bump
amplitude = 1
t_end = 1.25

[checks]
growth = true
sign_transfer = true
decay = true
small_time = true
)"},
    {"mc_validation",
     "Random-walk ensembles against the forward density equation, with drift verification",
     R"(
[scenario]
name = mc_validation
kind = montecarlo
seed = 20240817

[kernel]
family = product
tau = 0.01
marginal1 = uniform 0 0.03

[grid]
lo = -1.5
hi = 1.5
n = 64

[montecarlo]
particles = 10000 40000 160000
steps = 50
sample_every = 25
sigma0 = 0.2
center = 0
drift_shift = 0.005
drift_particles = 40000
)"},
};

}  // namespace

const std::vector<PresetInfo>& preset_list() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> v;
    for (const PresetEntry& p : kPresets) v.push_back({p.name, p.description});
    return v;
  }();
  return list;
}

std::string preset_config_text(const std::string& name) {
  for (const PresetEntry& p : kPresets)
    if (name == p.name) return p.text;
  std::string names;
  for (const PresetEntry& p : kPresets) names += std::string(names.empty() ? "" : ", ") + p.name;
  fail(Err::Config, "unknown preset '" + name + "'; available: " + names);
}

ScenarioOutcome run_scenario_config(const Config& cfg, const RunOptions& opts) {
  const ScenarioSpec spec = parse_spec(cfg);
  const std::vector<std::string> unknown = cfg.unused_keys();
  if (!unknown.empty()) {
    std::string msg = "unknown configuration key";
    if (unknown.size() > 1) msg += 's';
    for (const std::string& k : unknown)
      msg += " '" + k + "' (line " + std::to_string(cfg.line_of(k)) + ")";
    fail_cfg(cfg, msg);
  }
  if (spec.name.empty()) fail_cfg(cfg, "scenario.name is required");
  if (spec.kind == "pde") return run_pde(cfg, spec, opts);
  if (spec.kind == "montecarlo") return run_mc(cfg, spec, opts);
  fail_cfg(cfg, "scenario.kind must be pde or montecarlo (got '" + spec.kind + "')");
}

ScenarioOutcome run_scenario_file(const std::string& path, const RunOptions& opts) {
  return run_scenario_config(Config::parse_file(path), opts);
}

ScenarioOutcome run_preset(const std::string& name, const RunOptions& opts) {
  const Config cfg = Config::parse_string(preset_config_text(name), "preset:" + name);
  return run_scenario_config(cfg, opts);
}

std::string list_presets_text(bool json) {
  std::ostringstream out;
  if (json) {
    out << "[\n";
    bool first = true;
    for (const PresetInfo& p : preset_list()) {
      if (!first) out << ",\n";
      first = false;
      out << "  {\"name\": \"" << p.name << "\", \"description\": \"" << p.description << "\"}";
    }
    out << "\n]\n";
  } else {
    std::size_t width = 0;
    for (const PresetInfo& p : preset_list()) width = std::max(width, p.name.size());
    for (const PresetInfo& p : preset_list()) {
      out << p.name;
      out.write("                                        ", static_cast<std::streamsize>(
                                                                width + 2 - p.name.size()));
      out << p.description << '\n';
    }
  }
  return out.str();
}

}  // namespace dtlab

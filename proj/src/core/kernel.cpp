#include "core/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/quadrature.hpp"

namespace dtlab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// Position inside [0,1] of the mass fraction r of a linear density running
// from v0 to v1 over a unit cell.
double linear_cell_inverse(double v0, double v1, double r) {
  const double m = 0.5 * (v0 + v1);
  if (m <= 0.0) return 0.5;
  const double target = r * m;  // mass over [0,x] is v0 x + (v1-v0) x^2 / 2
  const double d = v1 - v0;
  double x;
  if (std::fabs(d) <= 1e-12 * (v0 + v1)) {
    x = target / v0;
  } else {
    x = (-v0 + std::sqrt(v0 * v0 + 2.0 * d * target)) / d;
  }
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

Marginal Marginal::uniform(double center, double half_width) {
  require(half_width > 0.0, Err::InvalidArgument, "half width must be positive");
  Marginal m;
  m.kind_ = Kind::Uniform;
  m.center_ = center;
  m.width_ = half_width;
  m.lo_ = center - half_width;
  m.hi_ = center + half_width;
  return m;
}

Marginal Marginal::triangular(double center, double half_width) {
  require(half_width > 0.0, Err::InvalidArgument, "half width must be positive");
  Marginal m;
  m.kind_ = Kind::Triangular;
  m.center_ = center;
  m.width_ = half_width;
  m.lo_ = center - half_width;
  m.hi_ = center + half_width;
  return m;
}

Marginal Marginal::gaussian(double mean, double sigma, double trunc_sigmas) {
  require(sigma > 0.0, Err::InvalidArgument, "sigma must be positive");
  require(trunc_sigmas > 0.0, Err::InvalidArgument, "truncation radius must be positive");
  Marginal m;
  m.kind_ = Kind::Gaussian;
  m.center_ = mean;
  m.sigma_ = sigma;
  m.trunc_ = trunc_sigmas;
  m.norm_ = std::erf(trunc_sigmas / std::sqrt(2.0));
  m.lo_ = mean - trunc_sigmas * sigma;
  m.hi_ = mean + trunc_sigmas * sigma;
  return m;
}

Marginal Marginal::tabulated(std::vector<double> values, double h) {
  require(values.size() >= 2, Err::InvalidArgument, "need at least two nodes");
  require(h > 0.0, Err::InvalidArgument, "node spacing must be positive");
  double total = 0.0;
  for (size_t j = 0; j + 1 < values.size(); ++j) {
    require(values[j] >= 0.0 && std::isfinite(values[j]), Err::InvalidArgument,
            "density values must be finite and nonnegative");
    total += 0.5 * (values[j] + values[j + 1]) * h;
  }
  require(values.back() >= 0.0 && std::isfinite(values.back()), Err::InvalidArgument,
          "density values must be finite and nonnegative");
  require(total > 0.0, Err::Sampler, "table carries no mass");
  Marginal m;
  m.kind_ = Kind::Tabulated;
  m.h_ = h;
  m.total_mass_ = total;
  const double half = 0.5 * (static_cast<double>(values.size()) - 1.0) * h;
  m.lo_ = -half;
  m.hi_ = half;
  m.cell_cdf_.resize(values.size() - 1);
  double acc = 0.0;
  for (size_t j = 0; j + 1 < values.size(); ++j) {
    acc += 0.5 * (values[j] + values[j + 1]) * h;
    m.cell_cdf_[j] = acc;
  }
  m.values_ = std::move(values);
  return m;
}

double Marginal::density(double s) const {
  if (s < lo_ || s > hi_) return 0.0;
  switch (kind_) {
    case Kind::Uniform:
      return 0.5 / width_;
    case Kind::Triangular:
      return (1.0 - std::fabs(s - center_) / width_) / width_;
    case Kind::Gaussian: {
      const double z = (s - center_) / sigma_;
      return std::exp(-0.5 * z * z) / (kSqrt2Pi * sigma_ * norm_);
    }
    case Kind::Tabulated: {
      const double u = (s - lo_) / h_;
      size_t j = static_cast<size_t>(std::floor(u));
      if (j + 1 >= values_.size()) j = values_.size() - 2;
      const double x = u - static_cast<double>(j);
      return values_[j] + (values_[j + 1] - values_[j]) * x;
    }
  }
  return 0.0;
}

std::vector<double> Marginal::breakpoints() const {
  switch (kind_) {
    case Kind::Triangular:
      return {center_};
    case Kind::Tabulated: {
      std::vector<double> b;
      for (size_t j = 1; j + 1 < values_.size(); ++j)
        b.push_back(lo_ + static_cast<double>(j) * h_);
      return b;
    }
    default:
      return {};
  }
}

double Marginal::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Uniform:
      return rng.uniform(lo_, hi_);
    case Kind::Triangular: {
      const double u = rng.uniform();
      if (u < 0.5) return center_ - width_ * (1.0 - std::sqrt(2.0 * u));
      return center_ + width_ * (1.0 - std::sqrt(2.0 * (1.0 - u)));
    }
    case Kind::Gaussian: {
      for (int it = 0; it < 4096; ++it) {
        const double s = center_ + sigma_ * rng.normal();
        if (s >= lo_ && s <= hi_) return s;
      }
      fail(Err::Sampler, "truncated-normal rejection stalled");
    }
    case Kind::Tabulated: {
      const double u = rng.uniform() * total_mass_;
      const auto it = std::lower_bound(cell_cdf_.begin(), cell_cdf_.end(), u);
      size_t j = static_cast<size_t>(it - cell_cdf_.begin());
      if (j >= cell_cdf_.size()) j = cell_cdf_.size() - 1;
      const double prev = j == 0 ? 0.0 : cell_cdf_[j - 1];
      const double cell_mass = cell_cdf_[j] - prev;
      const double r = cell_mass > 0.0 ? (u - prev) / cell_mass : 0.5;
      const double x = linear_cell_inverse(values_[j], values_[j + 1], r);
      return lo_ + (static_cast<double>(j) + x) * h_;
    }
  }
  return 0.0;
}

size_t TabulatedGrid::size() const {
  size_t s = 1;
  for (int d = 0; d < dim; ++d) s *= static_cast<size_t>(npts[static_cast<size_t>(d)]);
  return s;
}

double TabulatedGrid::node_coord(int axis, int j) const {
  const int n = npts[static_cast<size_t>(axis)];
  return (static_cast<double>(j) - 0.5 * (n - 1)) * h[axis];
}

double TabulatedGrid::interp(const Vec& zeta) const {
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int d = 0; d < dim; ++d) {
    const int n = npts[static_cast<size_t>(d)];
    const double u = zeta[d] / h[d] + 0.5 * (n - 1);
    if (u < 0.0 || u > static_cast<double>(n - 1)) return 0.0;
    int j = static_cast<int>(std::floor(u));
    if (j > n - 2) j = n - 2;
    base[static_cast<size_t>(d)] = j;
    frac[static_cast<size_t>(d)] = u - static_cast<double>(j);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    size_t idx = 0;
    for (int d = 0; d < dim; ++d) {
      const int bit = (corner >> d) & 1;
      w *= bit ? frac[static_cast<size_t>(d)] : 1.0 - frac[static_cast<size_t>(d)];
      idx = idx * static_cast<size_t>(npts[static_cast<size_t>(d)]) +
            static_cast<size_t>(base[static_cast<size_t>(d)] + bit);
    }
    acc += w * values[idx];
  }
  return acc;
}

Vec TabulatedGrid::half_extent() const {
  Vec e(dim);
  for (int d = 0; d < dim; ++d)
    e[d] = 0.5 * (npts[static_cast<size_t>(d)] - 1) * h[d];
  return e;
}

double TabulatedGrid::exact_mass() const {
  // Cell mass of a multilinear interpolant is the corner average times volume.
  double vol = 1.0;
  for (int d = 0; d < dim; ++d) vol *= h[d];
  std::array<int, kMaxDim> cells{};
  size_t ncells = 1;
  for (int d = 0; d < dim; ++d) {
    cells[static_cast<size_t>(d)] = npts[static_cast<size_t>(d)] - 1;
    ncells *= static_cast<size_t>(cells[static_cast<size_t>(d)]);
  }
  double total = 0.0;
  std::array<int, kMaxDim> c{};
  for (size_t cell = 0; cell < ncells; ++cell) {
    double avg = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      size_t idx = 0;
      for (int d = 0; d < dim; ++d)
        idx = idx * static_cast<size_t>(npts[static_cast<size_t>(d)]) +
              static_cast<size_t>(c[static_cast<size_t>(d)] + ((corner >> d) & 1));
      avg += values[idx];
    }
    total += avg / static_cast<double>(1 << dim);
    int d = dim - 1;
    for (; d >= 0; --d) {
      if (++c[static_cast<size_t>(d)] < cells[static_cast<size_t>(d)]) break;
      c[static_cast<size_t>(d)] = 0;
    }
  }
  return total * vol;
}

TabulatedGrid load_density_table(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::Io, "cannot open density table: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  TabulatedGrid g;
  require(static_cast<bool>(hs >> g.dim), Err::Io, "malformed table header");
  require(g.dim >= 1 && g.dim <= kMaxDim, Err::InvalidArgument, "table dimension out of range");
  g.h = Vec(g.dim);
  for (int d = 0; d < g.dim; ++d) {
    require(static_cast<bool>(hs >> g.h[d]), Err::Io, "malformed table header");
    require(g.h[d] > 0.0, Err::InvalidArgument, "node spacing must be positive");
  }
  for (int d = 0; d < g.dim; ++d) {
    require(static_cast<bool>(hs >> g.npts[static_cast<size_t>(d)]), Err::Io,
            "malformed table header");
    require(g.npts[static_cast<size_t>(d)] >= 2, Err::InvalidArgument,
            "need at least two nodes per axis");
  }
  g.values.resize(g.size());
  for (size_t i = 0; i < g.values.size(); ++i) {
    require(static_cast<bool>(in >> g.values[i]), Err::Io, "table is shorter than its header");
    require(std::isfinite(g.values[i]) && g.values[i] >= 0.0, Err::InvalidArgument,
            "density values must be finite and nonnegative");
  }
  return g;
}

void save_density_table(const std::string& path, const TabulatedGrid& g) {
  std::ofstream out(path);
  require(out.good(), Err::Io, "cannot write density table: " + path);
  out << g.dim;
  char buf[64];
  for (int d = 0; d < g.dim; ++d) {
    std::snprintf(buf, sizeof buf, " %.17g", g.h[d]);
    out << buf;
  }
  for (int d = 0; d < g.dim; ++d) out << ' ' << g.npts[static_cast<size_t>(d)];
  out << '\n';
  for (size_t i = 0; i < g.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", g.values[i]);
    out << buf << (i + 1 == g.values.size() ? "\n" : " ");
  }
}

ProbabilityKernel ProbabilityKernel::gaussian(Vec mu, Mat sigma, double tau, double trunc_sigmas) {
  require(mu.n == sigma.n, Err::InvalidArgument, "mean/covariance dimension mismatch");
  const int dim = mu.n;
  return gaussian_field(
      dim, [mu](const Vec&, double) { return mu; }, [sigma](const Vec&, double) { return sigma; },
      tau, trunc_sigmas);
}

ProbabilityKernel ProbabilityKernel::gaussian_field(int dim,
                                                    std::function<Vec(const Vec&, double)> mu,
                                                    std::function<Mat(const Vec&, double)> sigma,
                                                    double tau, double trunc_sigmas) {
  require(dim >= 1 && dim <= kMaxDim, Err::InvalidArgument, "dimension out of range");
  require(tau > 0.0, Err::InvalidArgument, "tau must be positive");
  require(trunc_sigmas > 0.0, Err::InvalidArgument, "truncation radius must be positive");
  ProbabilityKernel k;
  k.family_ = KernelFamily::GaussianShifted;
  k.dim_ = dim;
  k.tau_ = tau;
  k.trunc_ = trunc_sigmas;
  k.mu_ = std::move(mu);
  k.sigma_ = std::move(sigma);
  return k;
}

ProbabilityKernel ProbabilityKernel::product(std::vector<Marginal> marginals, double tau) {
  require(!marginals.empty() && marginals.size() <= kMaxDim, Err::InvalidArgument,
          "need 1..4 marginals");
  require(tau > 0.0, Err::InvalidArgument, "tau must be positive");
  ProbabilityKernel k;
  k.family_ = KernelFamily::ProductOfMarginals;
  k.dim_ = static_cast<int>(marginals.size());
  k.tau_ = tau;
  k.marginals_ = std::move(marginals);
  return k;
}

ProbabilityKernel ProbabilityKernel::tabulated(TabulatedGrid grid, double tau, bool normalize) {
  require(tau > 0.0, Err::InvalidArgument, "tau must be positive");
  require(grid.values.size() == grid.size(), Err::InvalidArgument,
          "value count does not match the node grid");
  ProbabilityKernel k;
  k.family_ = KernelFamily::TabulatedDensity;
  k.dim_ = grid.dim;
  k.tau_ = tau;
  const double mass = grid.exact_mass();
  require(mass > 0.0, Err::Sampler, "table carries no mass");
  if (normalize)
    for (double& v : grid.values) v /= mass;
  k.table_mass_ = normalize ? 1.0 : mass;
  k.grid_ = std::move(grid);

  if (k.dim_ <= 2) {
    // Cell CDF for inverse sampling; corner averages are exact cell masses.
    const TabulatedGrid& g = k.grid_;
    const int cx = g.npts[0] - 1;
    const int cy = g.dim == 2 ? g.npts[1] - 1 : 1;
    double vol = g.h[0] * (g.dim == 2 ? g.h[1] : 1.0);
    k.cell_cdf_.resize(static_cast<size_t>(cx * cy));
    double acc = 0.0;
    for (int i = 0; i < cx; ++i) {
      for (int j = 0; j < cy; ++j) {
        double avg;
        if (g.dim == 1) {
          avg = 0.5 * (g.values[static_cast<size_t>(i)] + g.values[static_cast<size_t>(i + 1)]);
        } else {
          const size_t n1 = static_cast<size_t>(g.npts[1]);
          avg = 0.25 * (g.values[static_cast<size_t>(i) * n1 + static_cast<size_t>(j)] +
                        g.values[static_cast<size_t>(i) * n1 + static_cast<size_t>(j + 1)] +
                        g.values[static_cast<size_t>(i + 1) * n1 + static_cast<size_t>(j)] +
                        g.values[static_cast<size_t>(i + 1) * n1 + static_cast<size_t>(j + 1)]);
        }
        acc += avg * vol;
        k.cell_cdf_[static_cast<size_t>(i * cy + j)] = acc;
      }
    }
  }
  return k;
}

ProbabilityKernel ProbabilityKernel::tabulated_from_file(const std::string& path, double tau,
                                                         bool normalize) {
  return tabulated(load_density_table(path), tau, normalize);
}

void ProbabilityKernel::gaussian_params(const Vec& x, double t, Vec& mu, Mat& sigma,
                                        Mat& chol) const {
  mu = mu_(x, t);
  sigma = sigma_(x, t);
  require(mu.n == dim_ && sigma.n == dim_, Err::InvalidArgument,
          "kernel field dimension mismatch");
  chol = cholesky_psd(sigma);
}

double ProbabilityKernel::density(const Vec& x, double t, const Vec& zeta) const {
  switch (family_) {
    case KernelFamily::GaussianShifted: {
      Vec mu;
      Mat sigma, l;
      gaussian_params(x, t, mu, sigma, l);
      double det = 1.0;
      for (int d = 0; d < dim_; ++d) det *= l(d, d);
      require(det > 0.0, Err::InvalidArgument, "degenerate covariance has no density");
      for (int d = 0; d < dim_; ++d)
        if (std::fabs(zeta[d] - mu[d]) > trunc_ * std::sqrt(sigma(d, d))) return 0.0;
      // Forward substitution for y = L^{-1}(zeta - mu).
      Vec y(dim_);
      for (int i = 0; i < dim_; ++i) {
        double s = zeta[i] - mu[i];
        for (int j = 0; j < i; ++j) s -= l(i, j) * y[j];
        y[i] = s / l(i, i);
      }
      double m2 = y.dot(y);
      double norm = det;
      for (int d = 0; d < dim_; ++d) norm *= kSqrt2Pi;
      return std::exp(-0.5 * m2) / norm;
    }
    case KernelFamily::ProductOfMarginals: {
      double p = 1.0;
      for (int d = 0; d < dim_; ++d) p *= marginals_[static_cast<size_t>(d)].density(zeta[d]);
      return p;
    }
    case KernelFamily::TabulatedDensity:
      return grid_.interp(zeta);
  }
  return 0.0;
}

void ProbabilityKernel::bounding_box(const Vec& x, double t, Vec& lo, Vec& hi) const {
  lo = Vec(dim_);
  hi = Vec(dim_);
  switch (family_) {
    case KernelFamily::GaussianShifted: {
      const Vec mu = mu_(x, t);
      const Mat sigma = sigma_(x, t);
      for (int d = 0; d < dim_; ++d) {
        const double w = trunc_ * std::sqrt(std::max(0.0, sigma(d, d)));
        lo[d] = mu[d] - w;
        hi[d] = mu[d] + w;
      }
      break;
    }
    case KernelFamily::ProductOfMarginals:
      for (int d = 0; d < dim_; ++d) {
        lo[d] = marginals_[static_cast<size_t>(d)].lo();
        hi[d] = marginals_[static_cast<size_t>(d)].hi();
      }
      break;
    case KernelFamily::TabulatedDensity: {
      const Vec e = grid_.half_extent();
      for (int d = 0; d < dim_; ++d) {
        lo[d] = -e[d];
        hi[d] = e[d];
      }
      break;
    }
  }
}

std::vector<double> ProbabilityKernel::axis_breakpoints(const Vec& x, double t, int axis) const {
  (void)x;
  (void)t;
  switch (family_) {
    case KernelFamily::GaussianShifted:
      return {};
    case KernelFamily::ProductOfMarginals:
      return marginals_[static_cast<size_t>(axis)].breakpoints();
    case KernelFamily::TabulatedDensity: {
      std::vector<double> b;
      for (int j = 1; j + 1 < grid_.npts[static_cast<size_t>(axis)]; ++j)
        b.push_back(grid_.node_coord(axis, j));
      return b;
    }
  }
  return {};
}

double ProbabilityKernel::support_radius(const Vec& x, double t) const {
  Vec lo, hi;
  bounding_box(x, t, lo, hi);
  double r2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double m = std::max(std::fabs(lo[d]), std::fabs(hi[d]));
    r2 += m * m;
  }
  return std::sqrt(r2);
}

bool ProbabilityKernel::degenerate(const Vec& x, double t) const {
  if (family_ != KernelFamily::GaussianShifted) return false;
  return sigma_(x, t).max_abs() == 0.0;
}

Vec ProbabilityKernel::sample(const Vec& x, double t, RngStream& rng) const {
  switch (family_) {
    case KernelFamily::GaussianShifted: {
      Vec mu;
      Mat sigma, l;
      gaussian_params(x, t, mu, sigma, l);
      for (int it = 0; it < 4096; ++it) {
        Vec z(dim_);
        for (int d = 0; d < dim_; ++d) z[d] = rng.normal();
        Vec zeta = mu + l.mul(z);
        bool ok = true;
        for (int d = 0; d < dim_; ++d)
          if (std::fabs(zeta[d] - mu[d]) > trunc_ * std::sqrt(sigma(d, d))) {
            ok = false;
            break;
          }
        if (ok) return zeta;
      }
      fail(Err::Sampler, "truncated-normal rejection stalled");
    }
    case KernelFamily::ProductOfMarginals: {
      Vec zeta(dim_);
      for (int d = 0; d < dim_; ++d) zeta[d] = marginals_[static_cast<size_t>(d)].sample(rng);
      return zeta;
    }
    case KernelFamily::TabulatedDensity: {
      require(dim_ <= 2, Err::Sampler, "tabulated sampling supports dim <= 2");
      const TabulatedGrid& g = grid_;
      const double total = cell_cdf_.back();
      const double u = rng.uniform() * total;
      const auto it = std::lower_bound(cell_cdf_.begin(), cell_cdf_.end(), u);
      size_t cell = static_cast<size_t>(it - cell_cdf_.begin());
      if (cell >= cell_cdf_.size()) cell = cell_cdf_.size() - 1;
      const double prev = cell == 0 ? 0.0 : cell_cdf_[cell - 1];
      const double frac = cell_cdf_[cell] > prev ? (u - prev) / (cell_cdf_[cell] - prev) : 0.5;
      Vec zeta(dim_);
      if (g.dim == 1) {
        const size_t i = cell;
        const double xx = linear_cell_inverse(g.values[i], g.values[i + 1], frac);
        zeta[0] = g.node_coord(0, static_cast<int>(i)) + xx * g.h[0];
      } else {
        const size_t n1 = static_cast<size_t>(g.npts[1]);
        const size_t cy = n1 - 1;
        const size_t i = cell / cy, j = cell % cy;
        const double v00 = g.values[i * n1 + j], v01 = g.values[i * n1 + j + 1];
        const double v10 = g.values[(i + 1) * n1 + j], v11 = g.values[(i + 1) * n1 + j + 1];
        // x from the in-cell marginal, then y from the conditional slice.
        const double xx = linear_cell_inverse(0.5 * (v00 + v01), 0.5 * (v10 + v11), frac);
        const double w0 = v00 + xx * (v10 - v00);
        const double w1 = v01 + xx * (v11 - v01);
        const double yy = linear_cell_inverse(w0, w1, rng.uniform());
        zeta[0] = g.node_coord(0, static_cast<int>(i)) + xx * g.h[0];
        zeta[1] = g.node_coord(1, static_cast<int>(j)) + yy * g.h[1];
      }
      return zeta;
    }
  }
  return Vec(dim_);
}

MomentResult kernel_moments(const ProbabilityKernel& k, const Vec& x, double t, int order,
                            double tol_norm) {
  require(order >= 2, Err::Quadrature, "moment quadrature needs order >= 2");
  const int dim = k.dim();

  MomentResult r;
  r.E = Vec(dim);
  r.a_bar = Mat(dim);

  if (k.degenerate(x, t)) {
    // Point mass: moments of a unit atom at the mean displacement. The
    // bounding box collapses onto the mean, so its midpoint recovers it.
    Vec lo, hi;
    k.bounding_box(x, t, lo, hi);
    Vec mu(dim);
    for (int d = 0; d < dim; ++d) mu[d] = 0.5 * (lo[d] + hi[d]);
    r.E = mu;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) r.a_bar(i, j) = mu[i] * mu[j];
    r.mass = 1.0;
  } else {
    Vec lo, hi;
    k.bounding_box(x, t, lo, hi);

    // Composite per-axis rules split at density breakpoints, so polynomial
    // pieces integrate exactly and smooth pieces spectrally.
    std::array<std::vector<double>, kMaxDim> nodes, weights;
    for (int d = 0; d < dim; ++d) {
      std::vector<double> edges{lo[d]};
      for (double b : k.axis_breakpoints(x, t, d))
        if (b > lo[d] && b < hi[d]) edges.push_back(b);
      edges.push_back(hi[d]);
      std::sort(edges.begin(), edges.end());
      const int per_piece = k.family() == KernelFamily::TabulatedDensity ? 4 : order;
      const GaussRule& rule = gauss_legendre(per_piece);
      for (size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        if (half <= 0.0) continue;
        for (int q = 0; q < per_piece; ++q) {
          nodes[static_cast<size_t>(d)].push_back(mid + half * rule.nodes[static_cast<size_t>(q)]);
          weights[static_cast<size_t>(d)].push_back(half * rule.weights[static_cast<size_t>(q)]);
        }
      }
      require(!nodes[static_cast<size_t>(d)].empty(), Err::Quadrature, "empty support box");
      require(nodes[static_cast<size_t>(d)].size() <= 8192, Err::Quadrature,
              "composite rule too large");
    }

    double mass = 0.0;
    std::array<size_t, kMaxDim> idx{};
    Vec zeta(dim);
    while (true) {
      double w = 1.0;
      for (int d = 0; d < dim; ++d) {
        zeta[d] = nodes[static_cast<size_t>(d)][idx[static_cast<size_t>(d)]];
        w *= weights[static_cast<size_t>(d)][idx[static_cast<size_t>(d)]];
      }
      const double phi = k.density(x, t, zeta);
      if (phi != 0.0) {
        const double wphi = w * phi;
        mass += wphi;
        for (int i = 0; i < dim; ++i) {
          r.E[i] += wphi * zeta[i];
          for (int j = i; j < dim; ++j) r.a_bar(i, j) += wphi * zeta[i] * zeta[j];
        }
      }
      int d = 0;
      for (; d < dim; ++d) {
        if (++idx[static_cast<size_t>(d)] < nodes[static_cast<size_t>(d)].size()) break;
        idx[static_cast<size_t>(d)] = 0;
      }
      if (d == dim) break;
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < i; ++j) r.a_bar(i, j) = r.a_bar(j, i);

    r.mass = mass;
    if (k.renormalizes()) {
      require(mass > 0.5, Err::Normalization, "truncation removed most of the kernel mass");
      r.E = (1.0 / mass) * r.E;
      r.a_bar = (1.0 / mass) * r.a_bar;
    } else {
      require(std::fabs(mass - 1.0) <= tol_norm, Err::Normalization,
              "kernel mass deviates from 1 beyond tolerance");
    }
  }

  r.A = (0.5 / k.tau()) * r.a_bar;
  r.drift = (1.0 / k.tau()) * r.E;
  return r;
}

}  // namespace dtlab

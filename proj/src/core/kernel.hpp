#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace dtlab {

enum class KernelFamily { GaussianShifted, ProductOfMarginals, TabulatedDensity };

// One displacement axis of a product kernel: density, support, exact sampler.
class Marginal {
 public:
  static Marginal uniform(double center, double half_width);
  static Marginal triangular(double center, double half_width);
  // Truncated to |s - mean| <= trunc_sigmas * sigma and renormalized there.
  static Marginal gaussian(double mean, double sigma, double trunc_sigmas = 6.0);
  // Values on the symmetric node grid s_j = (j - (N-1)/2) h, linear between.
  static Marginal tabulated(std::vector<double> values, double h);

  double density(double s) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  // Interior points where the density loses smoothness.
  std::vector<double> breakpoints() const;
  double sample(RngStream& rng) const;

 private:
  enum class Kind { Uniform, Triangular, Gaussian, Tabulated } kind_ = Kind::Uniform;
  double center_ = 0, width_ = 1, sigma_ = 1, trunc_ = 6, norm_ = 1;
  double lo_ = 0, hi_ = 0;
  std::vector<double> values_, cell_cdf_;
  double h_ = 1, total_mass_ = 1;
};

// Density values on a node grid symmetric about the origin, row-major with
// the last axis fastest; node j along axis d sits at (j - (N_d-1)/2) h_d.
struct TabulatedGrid {
  int dim = 1;
  std::array<int, kMaxDim> npts{};
  Vec h;
  std::vector<double> values;

  size_t size() const;
  double node_coord(int axis, int j) const;
  double interp(const Vec& zeta) const;  // multilinear inside the box, else 0
  Vec half_extent() const;
  double exact_mass() const;  // integral of the interpolant
};

// File layout: "dim h_1..h_dim N_1..N_dim" on the first line, then the
// node values in row-major order.
TabulatedGrid load_density_table(const std::string& path);
void save_density_table(const std::string& path, const TabulatedGrid& g);

// Displacement-probability kernel phi(x, t, zeta): nonnegative, unit mass,
// compact support. tau is the time step of the underlying balance relation.
class ProbabilityKernel {
 public:
  // Truncated to the box |zeta_i - mu_i| <= trunc_sigmas sqrt(Sigma_ii) and
  // renormalized, so the unit-mass invariant holds after truncation.
  static ProbabilityKernel gaussian(Vec mu, Mat sigma, double tau, double trunc_sigmas = 6.0);
  static ProbabilityKernel gaussian_field(int dim, std::function<Vec(const Vec&, double)> mu,
                                          std::function<Mat(const Vec&, double)> sigma,
                                          double tau, double trunc_sigmas = 6.0);
  static ProbabilityKernel product(std::vector<Marginal> marginals, double tau);
  static ProbabilityKernel tabulated(TabulatedGrid grid, double tau, bool normalize = false);
  static ProbabilityKernel tabulated_from_file(const std::string& path, double tau,
                                               bool normalize = false);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  double tau() const { return tau_; }
  bool renormalizes() const { return family_ == KernelFamily::GaussianShifted; }

  double density(const Vec& x, double t, const Vec& zeta) const;
  void bounding_box(const Vec& x, double t, Vec& lo, Vec& hi) const;
  std::vector<double> axis_breakpoints(const Vec& x, double t, int axis) const;
  double support_radius(const Vec& x, double t) const;
  // True when the second-moment matrix at (x,t) vanishes (point mass).
  bool degenerate(const Vec& x, double t) const;

  // Draw one displacement; exact for every family (rejection for Gaussian,
  // inverse-CDF for marginals and tables).
  Vec sample(const Vec& x, double t, RngStream& rng) const;

 private:
  ProbabilityKernel() = default;
  void gaussian_params(const Vec& x, double t, Vec& mu, Mat& sigma, Mat& chol) const;

  KernelFamily family_ = KernelFamily::GaussianShifted;
  int dim_ = 1;
  double tau_ = 1.0;
  double trunc_ = 6.0;
  std::function<Vec(const Vec&, double)> mu_;
  std::function<Mat(const Vec&, double)> sigma_;
  std::vector<Marginal> marginals_;
  TabulatedGrid grid_;
  std::vector<double> cell_cdf_;  // tabulated sampler, dim <= 2
  double table_mass_ = 1.0;
};

// First and second displacement moments and the induced PDE data:
// E = int zeta phi, a_bar = int zeta zeta^T phi, A = a_bar / (2 tau),
// drift = E / tau. mass is the raw kernel mass before renormalization.
struct MomentResult {
  Vec E;
  Mat a_bar;
  Mat A;
  Vec drift;
  double mass = 1.0;
};

// Composite tensor quadrature, exact on tabulated cells and spectral on
// smooth factors. NormalizationError if the mass deviates from 1 beyond
// tol_norm (families that renormalize rescale instead).
MomentResult kernel_moments(const ProbabilityKernel& k, const Vec& x, double t, int order = 32,
                            double tol_norm = 1e-8);

}  // namespace dtlab

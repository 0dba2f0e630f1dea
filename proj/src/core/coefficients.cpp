#include "core/coefficients.hpp"

#include <atomic>
#include <limits>
#include <string>

namespace dtlab {

std::uint64_t next_coefficient_signature() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

namespace {

double min_eig_on_samples(const std::function<Mat(const Vec&, double)>& a,
                          const std::vector<Vec>& xs, const std::vector<double>& ts) {
  double c0 = std::numeric_limits<double>::infinity();
  for (const Vec& x : xs)
    for (double t : ts) {
      const EigenValues ev = sym_eigenvalues(a(x, t).sym_part());
      c0 = std::min(c0, ev.min());
    }
  return c0;
}

}  // namespace

PDECoefficients PDECoefficients::constant(const Mat& a, const Mat& k, const Vec& b,
                                          std::shared_ptr<const StateLaw> law) {
  require(a.n == k.n && a.n == b.n, Err::InvalidArgument, "coefficient dimension mismatch");
  require(law != nullptr, Err::InvalidArgument, "coefficients need a state law");
  PDECoefficients c;
  c.dim = a.n;
  c.A = [a](const Vec&, double) { return a; };
  c.K = [k](const Vec&, double) { return k; };
  c.B = [b](const Vec&, double) { return b; };
  c.law = std::move(law);
  c.time_dependent = false;
  c.c0 = sym_eigenvalues(a.sym_part()).min();
  require(c.c0 > 0.0, Err::Ellipticity, "second-order matrix is not uniformly elliptic");
  c.signature = next_coefficient_signature();
  return c;
}

PDECoefficients assemble_coefficients(const std::function<MomentResult(const Vec&, double)>& moments,
                                      const DarcyData& darcy,
                                      std::shared_ptr<const StateLaw> law,
                                      const std::vector<Vec>& sample_points,
                                      const std::vector<double>& sample_times,
                                      bool homogeneous, bool time_dependent) {
  require(!sample_points.empty() && !sample_times.empty(), Err::InvalidArgument,
          "ellipticity validation needs a nonempty sample set");
  require(law != nullptr, Err::InvalidArgument, "coefficients need a state law");
  const int dim = darcy.M0.n;
  require(darcy.K_bar.n == dim && darcy.g.n == dim, Err::InvalidArgument,
          "velocity-closure dimension mismatch");

  const auto [m0_ok, m0_min] = psd_check(darcy.M0.sym_part());
  require(m0_ok, Err::Monotonicity,
          "alignment matrix violates the weak-monotonicity condition (min quadratic form " +
              std::to_string(m0_min) + ")");

  const Mat k0 = darcy.M0.mul(darcy.K_bar);
  const Mat k_mat = darcy.state_constant * k0;
  Vec b_vec = (-1.0) * k0.mul(darcy.g);

  PDECoefficients c;
  c.dim = dim;
  if (homogeneous) {
    const MomentResult m = moments(sample_points.front(), sample_times.front());
    require(m.A.n == dim, Err::InvalidArgument, "moment field dimension mismatch");
    const Mat a = m.A;
    c.A = [a](const Vec&, double) { return a; };
  } else {
    c.A = [moments](const Vec& x, double t) { return moments(x, t).A; };
  }
  c.K = [k_mat](const Vec&, double) { return k_mat; };
  c.B = [b_vec](const Vec&, double) { return b_vec; };
  c.law = std::move(law);
  c.time_dependent = time_dependent;
  c.c0 = min_eig_on_samples(c.A, sample_points, sample_times);
  require(c.c0 > 0.0, Err::Ellipticity,
          "second-order matrix loses ellipticity on the sample grid (min eigenvalue " +
              std::to_string(c.c0) + ")");
  c.signature = next_coefficient_signature();
  return c;
}

}  // namespace dtlab

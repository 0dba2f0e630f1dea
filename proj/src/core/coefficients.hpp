#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/kernel.hpp"
#include "core/linalg.hpp"
#include "core/statelaw.hpp"

namespace dtlab {

// Velocity-closure data: v = -K_bar (grad p - rho g), mean displacement
// per unit time aligned through M0. state_constant multiplies M0*K_bar to
// produce the gradient-form matrix K of the operator.
struct DarcyData {
  Mat M0;
  Mat K_bar;
  Vec g;
  double state_constant = 1.0;
};

// Coefficient fields of the operator
//   L u = u_t - <A, D^2 u> + u B.grad u + P'(u) (K grad u).grad u.
// c0 is the ellipticity constant observed on the sample set; signature
// tags the model so trajectories from the same coefficients can be
// recognized later.
struct PDECoefficients {
  int dim = 1;
  std::function<Mat(const Vec&, double)> A;
  std::function<Mat(const Vec&, double)> K;
  std::function<Vec(const Vec&, double)> B;
  std::shared_ptr<const StateLaw> law;
  bool time_dependent = false;
  double c0 = 0.0;
  std::uint64_t signature = 0;

  static PDECoefficients constant(const Mat& a, const Mat& k, const Vec& b,
                                  std::shared_ptr<const StateLaw> law);
};

// Builds the operator data from displacement moments and the velocity
// closure: A from the moment field, K = state_constant * M0 * K_bar,
// B = -M0 * K_bar * g. Validates the weak-monotonicity of M0 and the
// ellipticity of A over sample_points x sample_times (c0 recorded).
// homogeneous short-circuits the moment field to one evaluation.
PDECoefficients assemble_coefficients(const std::function<MomentResult(const Vec&, double)>& moments,
                                      const DarcyData& darcy,
                                      std::shared_ptr<const StateLaw> law,
                                      const std::vector<Vec>& sample_points,
                                      const std::vector<double>& sample_times,
                                      bool homogeneous = true, bool time_dependent = false);

std::uint64_t next_coefficient_signature();

}  // namespace dtlab

#pragma once

#include <cstdint>
#include <vector>

#include "core/grid.hpp"
#include "core/kernel.hpp"

namespace dtlab {

// Particle cloud evolved by independent displacement draws; time is
// steps * tau. Particle count is conserved (free-space regime).
struct WalkEnsemble {
  explicit WalkEnsemble(ProbabilityKernel k) : kernel(std::move(k)) {}

  ProbabilityKernel kernel;
  std::vector<double> pos;  // dim-strided coordinates
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;

  std::size_t count() const {
    const int d = kernel.dim();
    return d > 0 ? pos.size() / static_cast<std::size_t>(d) : 0;
  }
  double time() const { return static_cast<double>(steps) * kernel.tau(); }
};

// Isotropic Gaussian cloud of n particles centered at `center`.
WalkEnsemble ensemble_from_gaussian(const ProbabilityKernel& kernel, std::size_t n,
                                    const Vec& center, double sigma0, std::uint64_t seed);

// Moves every particle by one independent draw from the kernel (sampled at
// the departure point) and advances the step counter. Deterministic for a
// given seed regardless of worker partitioning: the random stream is keyed
// by (particle, step).
void walk_step(WalkEnsemble& e);

// Ensemble center of mass.
Vec ensemble_mean(const WalkEnsemble& e);

// Normalized histogram on node-centered cells: count / (N_p * h^dim).
// Particles outside the grid are dropped from the counts.
Field empirical_density(const WalkEnsemble& e, const Grid& g);

// Sum of field values times the cell volume.
double field_integral(const Field& f, const Grid& g);

// Per-time L1/Linf discrepancies between matched density sequences.
struct DensityComparison {
  std::vector<double> times;
  std::vector<double> l1;
  std::vector<double> linf;
};

// MismatchedSampling when the sequences differ in length, timestamps, or
// field layout.
DensityComparison compare_to_pde(const std::vector<Field>& walk_densities,
                                 const std::vector<Field>& pde_densities, const Grid& g);

}  // namespace dtlab

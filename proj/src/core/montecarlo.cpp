#include "core/montecarlo.hpp"

#include <cmath>

#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace dtlab {

namespace {

// Stream id reserved for drawing initial positions; walk steps use the
// step counter itself, which stays far below this tag.
constexpr std::uint64_t kInitTag = 0xffffffffffffffffULL;

}  // namespace

WalkEnsemble ensemble_from_gaussian(const ProbabilityKernel& kernel, std::size_t n,
                                    const Vec& center, double sigma0, std::uint64_t seed) {
  const int d = kernel.dim();
  require(center.n == d, Err::InvalidArgument, "cloud center dimension mismatch");
  require(n > 0, Err::InvalidArgument, "ensemble needs at least one particle");
  require(sigma0 >= 0.0, Err::InvalidArgument, "cloud width must be nonnegative");
  WalkEnsemble e(kernel);
  e.seed = seed;
  e.steps = 0;
  e.pos.resize(n * static_cast<std::size_t>(d));
  parallel_for(n, [&](std::size_t i) {
    RngStream rs(seed, particle_stream(i, kInitTag));
    for (int k = 0; k < d; ++k)
      e.pos[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] =
          center[k] + sigma0 * rs.normal();
  });
  return e;
}

void walk_step(WalkEnsemble& e) {
  const int d = e.kernel.dim();
  const std::size_t n = e.count();
  const double t = e.time();
  parallel_for(n, [&](std::size_t i) {
    RngStream rs(e.seed, particle_stream(i, e.steps));
    Vec x;
    x.n = d;
    for (int k = 0; k < d; ++k) x[k] = e.pos[i * static_cast<std::size_t>(d) + k];
    const Vec zeta = e.kernel.sample(x, t, rs);
    for (int k = 0; k < d; ++k)
      e.pos[i * static_cast<std::size_t>(d) + k] = x[k] + zeta[k];
  });
  ++e.steps;
}

Vec ensemble_mean(const WalkEnsemble& e) {
  const int d = e.kernel.dim();
  const std::size_t n = e.count();
  require(n > 0, Err::InvalidArgument, "empty ensemble");
  Vec m;
  m.n = d;
  for (int k = 0; k < d; ++k) m[k] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) m[k] += e.pos[i * static_cast<std::size_t>(d) + k];
  for (int k = 0; k < d; ++k) m[k] /= static_cast<double>(n);
  return m;
}

Field empirical_density(const WalkEnsemble& e, const Grid& g) {
  const int d = e.kernel.dim();
  require(d == g.dim, Err::InvalidArgument, "ensemble/grid dimension mismatch");
  const std::size_t n = e.count();
  require(n > 0, Err::InvalidArgument, "empty ensemble");
  std::vector<std::uint64_t> counts(g.total(), 0);
  const std::size_t sx = static_cast<std::size_t>(g.ny());
  for (std::size_t i = 0; i < n; ++i) {
    long idx[2] = {0, 0};
    bool inside = true;
    for (int k = 0; k < d; ++k) {
      const double f = (e.pos[i * static_cast<std::size_t>(d) + k] - g.lo[k]) / g.h[k] + 0.5;
      const long cell = static_cast<long>(std::floor(f));
      if (cell < 0 || cell >= (k == 0 ? g.nx() : g.ny())) {
        inside = false;
        break;
      }
      idx[k] = cell;
    }
    if (inside) ++counts[static_cast<std::size_t>(idx[0]) * sx + static_cast<std::size_t>(idx[1])];
  }
  Field f = Field::zeros(g, e.time());
  const double norm = static_cast<double>(n) * g.cell_volume();
  for (std::size_t i = 0; i < counts.size(); ++i)
    f.v[i] = static_cast<double>(counts[i]) / norm;
  return f;
}

double field_integral(const Field& f, const Grid& g) {
  require(f.v.size() == g.total(), Err::InvalidArgument, "field does not match the grid");
  double s = 0.0;
  for (double v : f.v) s += v;
  return s * g.cell_volume();
}

DensityComparison compare_to_pde(const std::vector<Field>& walk_densities,
                                 const std::vector<Field>& pde_densities, const Grid& g) {
  require(walk_densities.size() == pde_densities.size(), Err::MismatchedSampling,
          "density sequences have different lengths");
  require(!walk_densities.empty(), Err::MismatchedSampling, "empty density sequences");
  DensityComparison out;
  for (std::size_t i = 0; i < walk_densities.size(); ++i) {
    const Field& a = walk_densities[i];
    const Field& b = pde_densities[i];
    require(std::fabs(a.t - b.t) <= 1e-9 * (1.0 + std::fabs(a.t)), Err::MismatchedSampling,
            "density sequences sampled at different times");
    require(a.v.size() == g.total() && b.v.size() == g.total(), Err::MismatchedSampling,
            "density fields do not match the grid");
    double l1 = 0.0, linf = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) {
      const double d = std::fabs(a.v[k] - b.v[k]);
      l1 += d;
      linf = std::max(linf, d);
    }
    out.times.push_back(a.t);
    out.l1.push_back(l1 * g.cell_volume());
    out.linf.push_back(linf);
  }
  return out;
}

}  // namespace dtlab

#pragma once

#include <cmath>
#include <cstdint>

namespace dtlab {

// Counter-based generator: every value is a pure function of (seed, counter),
// so draws stay identical under any particle/thread partitioning.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t counter_bits(uint64_t seed, uint64_t ctr) { return mix64(seed ^ mix64(ctr)); }

// Sequential view over one logical stream; streams are keyed by a 64-bit id.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id)
      : key_(mix64(seed) ^ (stream_id * 0xda942042e4dd58b5ULL)), ctr_(0) {}

  uint64_t bits() { return counter_bits(key_, ctr_++); }

  // Uniform on (0, 1): 53 mantissa bits, offset keeps the value away from 0.
  double uniform() {
    return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal pair via Box-Muller.
  void normal_pair(double& z0, double& z1) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(2.0 * M_PI * u2);
    z1 = r * std::sin(2.0 * M_PI * u2);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double z0, z1;
    normal_pair(z0, z1);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

 private:
  uint64_t key_;
  uint64_t ctr_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream id for one particle step: stable across runs and partitions.
inline uint64_t particle_stream(uint64_t particle, uint64_t step) {
  return mix64(particle * 0x9e3779b97f4a7c15ULL + step * 0xc2b2ae3d27d4eb4fULL + 1);
}

}  // namespace dtlab

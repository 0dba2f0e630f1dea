#pragma once

#include <stdexcept>
#include <string>

namespace dtlab {

// One code per failure class surfaced through the C API.
enum class Err {
  InvalidArgument,
  Domain,             // state-law eval outside J
  InconsistentRange,  // extrema disordered or outside closure(J)
  Classification,     // extrema pair the edge dichotomy cannot classify
  Normalization,      // kernel mass deviates from 1
  Quadrature,         // unsupported order / non-convergent refinement
  AsymmetricInput,    // symmetric-matrix op fed an asymmetric matrix
  Ellipticity,        // min eigenvalue of A not positive
  Range,              // transform inverse target outside attainable range
  Convergence,        // iteration failed to converge
  InvalidBound,       // nonpositive c0 / negative c1,c2
  Extension,          // edge extension preconditions violated
  DegenerateCoefficients,
  Monotonicity,       // positive-type stencil unavailable for a cell
  RangeViolation,     // field value escaped closure(J)
  Compatibility,      // u0 boundary trace != u_star
  InteriorPoint,      // reference point not outside the domain
  EdgeCaseUnsupported,
  Window,             // horizon shorter than one decay window
  InsufficientTrajectories,
  MismatchedSampling,
  Sampler,
  Config,
  Io,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace dtlab

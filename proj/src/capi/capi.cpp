#include "dtlab/dtlab.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/kernel.hpp"
#include "core/parallel.hpp"
#include "core/scenario.hpp"
#include "core/statelaw.hpp"
#include "core/transform.hpp"

namespace {

thread_local std::string g_last_error;

dtl_status status_of(dtlab::Err e) {
  using dtlab::Err;
  switch (e) {
    case Err::InvalidArgument: return DTL_E_INVALID_ARGUMENT;
    case Err::Domain: return DTL_E_DOMAIN;
    case Err::InconsistentRange: return DTL_E_INCONSISTENT_RANGE;
    case Err::Classification: return DTL_E_CLASSIFICATION;
    case Err::Normalization: return DTL_E_NORMALIZATION;
    case Err::Quadrature: return DTL_E_QUADRATURE;
    case Err::AsymmetricInput: return DTL_E_ASYMMETRIC_INPUT;
    case Err::Ellipticity: return DTL_E_ELLIPTICITY;
    case Err::Range: return DTL_E_RANGE;
    case Err::Convergence: return DTL_E_CONVERGENCE;
    case Err::InvalidBound: return DTL_E_INVALID_BOUND;
    case Err::Extension: return DTL_E_EXTENSION;
    case Err::DegenerateCoefficients: return DTL_E_DEGENERATE_COEFFICIENTS;
    case Err::Monotonicity: return DTL_E_MONOTONICITY;
    case Err::RangeViolation: return DTL_E_RANGE_VIOLATION;
    case Err::Compatibility: return DTL_E_COMPATIBILITY;
    case Err::InteriorPoint: return DTL_E_INTERIOR_POINT;
    case Err::EdgeCaseUnsupported: return DTL_E_EDGE_CASE_UNSUPPORTED;
    case Err::Window: return DTL_E_WINDOW;
    case Err::InsufficientTrajectories: return DTL_E_INSUFFICIENT_TRAJECTORIES;
    case Err::MismatchedSampling: return DTL_E_MISMATCHED_SAMPLING;
    case Err::Sampler: return DTL_E_SAMPLER;
    case Err::Config: return DTL_E_CONFIG;
    case Err::Io: return DTL_E_IO;
  }
  return DTL_E_UNKNOWN;
}

// Runs fn, translating C++ failures into status codes + the thread-local
// message. Returns DTL_OK when fn completes.
template <class Fn>
dtl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DTL_OK;
  } catch (const dtlab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DTL_E_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DTL_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return DTL_E_UNKNOWN;
  }
}

dtl_status require_c(bool ok, const char* msg) {
  if (ok) return DTL_OK;
  g_last_error = msg;
  return DTL_E_INVALID_ARGUMENT;
}

}  // namespace

struct dtl_law {
  std::shared_ptr<const dtlab::StateLaw> law;
};

struct dtl_transform {
  dtlab::Transform t;
};

struct dtl_kernel {
  dtlab::ProbabilityKernel k;
};

struct dtl_result {
  dtlab::ScenarioOutcome outcome;
  std::string text;  // constants block + report lines
};

extern "C" {

const char* dtl_version(void) { return "0.1.0"; }

const char* dtl_last_error(void) { return g_last_error.c_str(); }

void dtl_string_free(char* s) { delete[] s; }

dtl_status dtl_set_worker_count(int n) {
  return guarded([&] { dtlab::set_worker_count(n); });
}

/* ------------------------------------------------------------------ laws */

dtl_status dtl_law_ideal(double c, int full_line, dtl_law** out) {
  if (dtl_status s = require_c(out != nullptr, "out pointer is null")) return s;
  return guarded([&] { *out = new dtl_law{dtlab::StateLaw::ideal(c, full_line != 0)}; });
}

dtl_status dtl_law_isentropic(double gamma, double c, dtl_law** out) {
  if (dtl_status s = require_c(out != nullptr, "out pointer is null")) return s;
  return guarded([&] { *out = new dtl_law{dtlab::StateLaw::isentropic(gamma, c)}; });
}

dtl_status dtl_law_slightly_compressible(double kappa, dtl_law** out) {
  if (dtl_status s = require_c(out != nullptr, "out pointer is null")) return s;
  return guarded([&] { *out = new dtl_law{dtlab::StateLaw::slightly_compressible(kappa)}; });
}

dtl_status dtl_law_pressure(const dtl_law* law, double s, double* out) {
  if (dtl_status st = require_c(law && out, "law/out pointer is null")) return st;
  return guarded([&] { *out = law->law->p(s); });
}

dtl_status dtl_law_pressure_prime(const dtl_law* law, double s, double* out) {
  if (dtl_status st = require_c(law && out, "law/out pointer is null")) return st;
  return guarded([&] { *out = law->law->pprime(s); });
}

dtl_status dtl_law_domain(const dtl_law* law, double* lo, double* hi, int* lo_open, int* hi_open) {
  if (dtl_status st = require_c(law != nullptr, "law pointer is null")) return st;
  return guarded([&] {
    const dtlab::Interval& J = law->law->domain();
    if (lo) *lo = J.lo;
    if (hi) *hi = J.hi;
    if (lo_open) *lo_open = J.lo_open ? 1 : 0;
    if (hi_open) *hi_open = J.hi_open ? 1 : 0;
  });
}

void dtl_law_free(dtl_law* law) { delete law; }

/* --------------------------------------------------------- substitutions */

dtl_status dtl_transform_make(const dtl_law* law, double lambda, dtl_transform** out) {
  if (dtl_status st = require_c(law && out, "law/out pointer is null")) return st;
  return guarded([&] { *out = new dtl_transform{dtlab::make_transform(law->law, lambda)}; });
}

dtl_status dtl_transform_f(const dtl_transform* t, double s, double* out) {
  if (dtl_status st = require_c(t && out, "transform/out pointer is null")) return st;
  return guarded([&] { *out = t->t.f(s); });
}

dtl_status dtl_transform_f_inv(const dtl_transform* t, double w, double* out) {
  if (dtl_status st = require_c(t && out, "transform/out pointer is null")) return st;
  return guarded([&] { *out = t->t.f_inv(w); });
}

dtl_status dtl_transform_fprime(const dtl_transform* t, double s, double* out) {
  if (dtl_status st = require_c(t && out, "transform/out pointer is null")) return st;
  return guarded([&] { *out = t->t.fprime(s); });
}

void dtl_transform_free(dtl_transform* t) { delete t; }

dtl_status dtl_lambda_thresholds(double c0, double c1, double c2, int strict, double eps_lambda,
                                 double* lambda1, double* lambda2) {
  if (dtl_status st = require_c(lambda1 && lambda2, "lambda out pointer is null")) return st;
  return guarded([&] {
    const dtlab::Thresholds th = dtlab::lambda_thresholds(c0, c1, c2, strict != 0, eps_lambda);
    *lambda1 = th.lambda1;
    *lambda2 = th.lambda2;
  });
}

/* ---------------------------------------------------------------- kernels */

dtl_status dtl_kernel_gaussian(int dim, const double* mu, const double* sigma, double tau,
                               double trunc_sigmas, dtl_kernel** out) {
  if (dtl_status st = require_c(mu && sigma && out, "mu/sigma/out pointer is null")) return st;
  if (dtl_status st = require_c(dim == 1 || dim == 2, "dim must be 1 or 2")) return st;
  return guarded([&] {
    dtlab::Vec m(dim);
    dtlab::Mat s(dim);
    for (int i = 0; i < dim; ++i) {
      m[i] = mu[i];
      for (int j = 0; j < dim; ++j) s(i, j) = sigma[i * dim + j];
    }
    *out = new dtl_kernel{dtlab::ProbabilityKernel::gaussian(m, s, tau, trunc_sigmas)};
  });
}

dtl_status dtl_kernel_moments(const dtl_kernel* k, const double* x, double t, int order,
                              double* mean, double* second, double* diffusion, double* drift) {
  if (dtl_status st = require_c(k && x, "kernel/x pointer is null")) return st;
  return guarded([&] {
    const int dim = k->k.dim();
    dtlab::Vec xv(dim);
    for (int i = 0; i < dim; ++i) xv[i] = x[i];
    const dtlab::MomentResult mr = dtlab::kernel_moments(k->k, xv, t, order);
    for (int i = 0; i < dim; ++i) {
      if (mean) mean[i] = mr.E[i];
      if (drift) drift[i] = mr.drift[i];
      for (int j = 0; j < dim; ++j) {
        if (second) second[i * dim + j] = mr.a_bar(i, j);
        if (diffusion) diffusion[i * dim + j] = mr.A(i, j);
      }
    }
  });
}

void dtl_kernel_free(dtl_kernel* k) { delete k; }

/* -------------------------------------------------------------- scenarios */

namespace {

std::string result_text(const dtlab::ScenarioOutcome& o) {
  std::string text = o.constants_text;
  for (const dtlab::Report& r : o.reports) {
    text += '\n';
    text += r.to_text();
  }
  return text;
}

dtl_status run_outcome(dtlab::ScenarioOutcome (*runner)(const std::string&,
                                                        const dtlab::RunOptions&),
                       const char* what, const char* out_dir, const uint64_t* seed,
                       dtl_result** out) {
  return guarded([&] {
    dtlab::RunOptions opts;
    if (out_dir) opts.out_dir = out_dir;
    if (seed) opts.seed = *seed;
    auto res = std::make_unique<dtl_result>();
    res->outcome = runner(what, opts);
    res->text = result_text(res->outcome);
    *out = res.release();
  });
}

}  // namespace

dtl_status dtl_run_preset(const char* name, const char* out_dir, const uint64_t* seed,
                          dtl_result** out) {
  if (dtl_status st = require_c(name && out, "name/out pointer is null")) return st;
  return run_outcome(
      [](const std::string& n, const dtlab::RunOptions& o) { return dtlab::run_preset(n, o); },
      name, out_dir, seed, out);
}

dtl_status dtl_run_scenario_file(const char* path, const char* out_dir, const uint64_t* seed,
                                 dtl_result** out) {
  if (dtl_status st = require_c(path && out, "path/out pointer is null")) return st;
  return run_outcome(
      [](const std::string& p, const dtlab::RunOptions& o) {
        return dtlab::run_scenario_file(p, o);
      },
      path, out_dir, seed, out);
}

dtl_status dtl_result_name(const dtl_result* r, const char** out) {
  if (dtl_status st = require_c(r && out, "result/out pointer is null")) return st;
  *out = r->outcome.name.c_str();
  return DTL_OK;
}

dtl_status dtl_result_passed(const dtl_result* r, int* out) {
  if (dtl_status st = require_c(r && out, "result/out pointer is null")) return st;
  *out = r->outcome.passed ? 1 : 0;
  return DTL_OK;
}

dtl_status dtl_result_text(const dtl_result* r, const char** out) {
  if (dtl_status st = require_c(r && out, "result/out pointer is null")) return st;
  *out = r->text.c_str();
  return DTL_OK;
}

dtl_status dtl_result_metric(const dtl_result* r, const char* key, double* out) {
  if (dtl_status st = require_c(r && key && out, "result/key/out pointer is null")) return st;
  const auto it = r->outcome.metrics.find(key);
  if (it == r->outcome.metrics.end()) {
    g_last_error = std::string("unknown metric '") + key + "'";
    return DTL_E_INVALID_ARGUMENT;
  }
  *out = it->second;
  return DTL_OK;
}

dtl_status dtl_result_file_count(const dtl_result* r, size_t* out) {
  if (dtl_status st = require_c(r && out, "result/out pointer is null")) return st;
  *out = r->outcome.files_written.size();
  return DTL_OK;
}

dtl_status dtl_result_file_path(const dtl_result* r, size_t index, const char** out) {
  if (dtl_status st = require_c(r && out, "result/out pointer is null")) return st;
  if (index >= r->outcome.files_written.size()) {
    g_last_error = "file index out of range";
    return DTL_E_INVALID_ARGUMENT;
  }
  *out = r->outcome.files_written[index].c_str();
  return DTL_OK;
}

void dtl_result_free(dtl_result* r) { delete r; }

dtl_status dtl_list_presets(int json, char** out) {
  if (dtl_status st = require_c(out != nullptr, "out pointer is null")) return st;
  return guarded([&] {
    const std::string text = dtlab::list_presets_text(json != 0);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

}  // extern "C"

#pragma once

#include <memory>
#include <optional>

#include "core/statelaw.hpp"

namespace dtlab {

enum class ClosedForm { None, Identity, Exponential, Power, IsentropicIntegral };

const char* closed_form_name(ClosedForm f);

// Monotone change of variable F(s) = C * integral_{s0}^{s} e^{lambda P(z)} dz + Cp.
// F' = C e^{lambda P} > 0;  F'' = lambda P' F' (same sign as lambda on J).
class Transform {
 public:
  double f(double s) const;
  double f_inv(double w) const;
  double fprime(double s) const;

  double lambda() const { return lambda_; }
  double c() const { return c_; }
  double c_prime() const { return cp_; }
  double s_origin() const { return s0_; }
  ClosedForm closed_form() const { return form_; }
  const StateLaw& law() const { return *law_; }
  std::shared_ptr<const StateLaw> law_ptr() const { return law_; }

  bool extended_lower() const { return ext_lo_; }
  bool extended_upper() const { return ext_hi_; }
  double extended_edge() const { return ext_edge_; }

 private:
  friend Transform make_transform(std::shared_ptr<const StateLaw>, double, double, double,
                                  std::optional<double>);
  friend Transform extend_to_edge(const Transform&, double, bool, const EdgeClassification&);

  bool in_eval_domain(double s) const;
  double integrand(double s) const;  // C e^{lambda P(s)}, extension-aware
  double quad_f(double s) const;

  std::shared_ptr<const StateLaw> law_;
  double lambda_ = 0.0, c_ = 1.0, cp_ = 0.0, s0_ = 0.0;
  ClosedForm form_ = ClosedForm::None;
  bool ext_lo_ = false, ext_hi_ = false;
  double ext_edge_ = 0.0;
  double ext_integrand_ = 0.0;  // limit of C e^{lambda P} at the extended edge
};

// Closed forms are recognized from (law, lambda); everything else evaluates by
// adaptive quadrature of the integrand. s0 defaults to a point of J.
Transform make_transform(std::shared_ptr<const StateLaw> law, double lambda, double C = 1.0,
                         double Cp = 0.0, std::optional<double> s0 = std::nullopt);

struct Thresholds {
  double lambda1;  // >= c1/c0, sub-solution side
  double lambda2;  // <= -c2/c0, super-solution side
};

// strict pushes zero thresholds to +-eps_lambda so both signs are strict.
Thresholds lambda_thresholds(double c0, double c1, double c2, bool strict = true,
                             double eps_lambda = 1e-6);

// Continuously extend the integrand onto a finite open-domain edge so F and
// F' evaluate at the edge itself. Preconditions: lower edge needs the
// lower-outside classification and lambda > 0; upper needs upper-outside and
// lambda < 0. A point already inside J yields a no-op copy.
Transform extend_to_edge(const Transform& t, double edge_value, bool lower,
                         const EdgeClassification& cls);

}  // namespace dtlab

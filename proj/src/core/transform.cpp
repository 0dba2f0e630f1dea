#include "core/transform.hpp"

#include <cmath>

#include "core/quadrature.hpp"

namespace dtlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-12;
}

const char* closed_form_name(ClosedForm f) {
  switch (f) {
    case ClosedForm::None: return "quadrature";
    case ClosedForm::Identity: return "identity";
    case ClosedForm::Exponential: return "exponential";
    case ClosedForm::Power: return "power";
    case ClosedForm::IsentropicIntegral: return "isentropic-integral";
  }
  return "?";
}

Transform make_transform(std::shared_ptr<const StateLaw> law, double lambda, double C, double Cp,
                         std::optional<double> s0_opt) {
  require(law != nullptr, Err::InvalidArgument, "state law is null");
  require(C > 0.0, Err::InvalidArgument, "leading constant must be positive (F strictly increasing)");
  const Interval& J = law->domain();

  double s0;
  if (s0_opt) {
    s0 = *s0_opt;
    require(J.contains(s0), Err::InvalidArgument, "integration origin outside the law's domain");
  } else if (std::isfinite(J.lo) && std::isfinite(J.hi)) {
    s0 = 0.5 * (J.lo + J.hi);
  } else if (std::isfinite(J.lo)) {
    s0 = J.lo_open ? J.lo + 1.0 : J.lo;
  } else {
    s0 = 0.0;
  }

  Transform t;
  t.law_ = std::move(law);
  t.lambda_ = lambda;
  t.c_ = C;
  t.cp_ = Cp;
  t.s0_ = s0;

  const LawKind k = t.law_->kind();
  const bool linear_p = k == LawKind::Ideal || (k == LawKind::Isentropic && t.law_->gamma() == 1.0);
  if (linear_p) {
    t.form_ = lambda == 0.0 ? ClosedForm::Identity : ClosedForm::Exponential;
  } else if (k == LawKind::SlightlyCompressible) {
    t.form_ = lambda == -1.0 ? ClosedForm::None : ClosedForm::Power;
  } else if (k == LawKind::Isentropic) {
    t.form_ = lambda == 0.0 ? ClosedForm::Identity : ClosedForm::IsentropicIntegral;
  } else {
    t.form_ = ClosedForm::None;
  }
  return t;
}

bool Transform::in_eval_domain(double s) const {
  if (law_->domain().contains(s)) return true;
  if ((ext_lo_ || ext_hi_) && s == ext_edge_) return true;
  return false;
}

double Transform::integrand(double s) const {
  if (law_->domain().contains(s)) return c_ * std::exp(lambda_ * law_->p(s));
  if (ext_lo_ && s <= ext_edge_) return ext_integrand_;
  if (ext_hi_ && s >= ext_edge_) return ext_integrand_;
  fail(Err::Domain, "integrand sampled outside the evaluation domain");
}

double Transform::quad_f(double s) const {
  if (c_ == 0.0) return cp_;
  const auto g = [this](double z) { return integrand(z); };
  // A crude Simpson estimate sets the scale, keeping the tolerance achievable in double
  // precision when the antiderivative spans many orders of magnitude.
  const double mid = 0.5 * (s0_ + s);
  const double crude = (s - s0_) / 6.0 * (g(s0_) + 4.0 * g(mid) + g(s));
  const double tol = kQuadTol * std::max(1.0, std::fabs(crude));
  return adaptive_simpson(g, s0_, s, tol) + cp_;
}

double Transform::f(double s) const {
  require(in_eval_domain(s), Err::Domain, "transform argument outside the evaluation domain");
  switch (form_) {
    case ClosedForm::Identity:
      return c_ * (s - s0_) + cp_;
    case ClosedForm::Exponential:
      return c_ * std::exp(lambda_ * s0_) * std::expm1(lambda_ * (s - s0_)) / lambda_ + cp_;
    case ClosedForm::Power: {
      const double q = lambda_ + 1.0;
      return c_ / q * (std::pow(s, q) - std::pow(s0_, q)) + cp_;
    }
    case ClosedForm::IsentropicIntegral:
    case ClosedForm::None:
      return quad_f(s);
  }
  return 0.0;
}

double Transform::fprime(double s) const {
  require(in_eval_domain(s), Err::Domain, "transform argument outside the evaluation domain");
  return integrand(s);
}

double Transform::f_inv(double w) const {
  const Interval& J = law_->domain();
  switch (form_) {
    case ClosedForm::Identity: {
      const double s = s0_ + (w - cp_) / c_;
      require(in_eval_domain(s), Err::Range, "target outside the transform's range");
      return s;
    }
    case ClosedForm::Exponential: {
      const double arg = lambda_ * (w - cp_) / (c_ * std::exp(lambda_ * s0_));
      require(arg > -1.0, Err::Range, "target outside the transform's range");
      const double s = s0_ + std::log1p(arg) / lambda_;
      require(in_eval_domain(s), Err::Range, "target outside the transform's range");
      return s;
    }
    case ClosedForm::Power: {
      const double q = lambda_ + 1.0;
      const double base = std::pow(s0_, q) + q * (w - cp_) / c_;
      require(q > 0.0 ? base >= 0.0 : base > 0.0, Err::Range,
              "target outside the transform's range");
      const double s = std::pow(base, 1.0 / q);
      require(in_eval_domain(s), Err::Range, "target outside the transform's range");
      return s;
    }
    case ClosedForm::IsentropicIntegral:
    case ClosedForm::None:
      break;
  }

  // Evaluable closure of the domain: open ends are reachable only if extended.
  double edge_lo = std::isfinite(J.lo) ? J.lo : -kInf;
  double edge_hi = std::isfinite(J.hi) ? J.hi : kInf;

  // Bracket [a, b] with f(a) <= w <= f(b); geometric expansion from s0.
  double a = s0_, b = s0_;
  double fa = f(a), fb = fa;
  double step = std::max(1.0, std::fabs(s0_)) * 0.5;
  for (int it = 0; fb < w; ++it) {
    require(it < 2000, Err::Range, "target above the transform's attainable range");
    a = b;
    fa = fb;
    double nb = b + step;
    step *= 2.0;
    if (nb >= edge_hi) {
      if (std::isfinite(edge_hi) && in_eval_domain(edge_hi)) {
        nb = edge_hi;
        b = nb;
        fb = f(b);
        require(fb >= w, Err::Range, "target above the transform's attainable range");
        break;
      }
      // Approach an unreachable open end from inside.
      nb = b + 0.5 * (edge_hi - b);
      step = 0.25 * (edge_hi - nb);
      require(nb > b, Err::Range, "target above the transform's attainable range");
    }
    b = nb;
    fb = f(b);
  }
  for (int it = 0; fa > w; ++it) {
    require(it < 2000, Err::Range, "target below the transform's attainable range");
    b = a;
    fb = fa;
    double na = a - step;
    step *= 2.0;
    if (na <= edge_lo) {
      if (std::isfinite(edge_lo) && in_eval_domain(edge_lo)) {
        na = edge_lo;
        a = na;
        fa = f(a);
        require(fa <= w, Err::Range, "target below the transform's attainable range");
        break;
      }
      na = a - 0.5 * (a - edge_lo);
      step = 0.25 * (na - edge_lo);
      require(na < a, Err::Range, "target below the transform's attainable range");
    }
    a = na;
    fa = f(a);
  }

  // Bisection to a short bracket, then Newton with the closed-form derivative.
  while (b - a > 1e-3 * (1.0 + std::fabs(a) + std::fabs(b))) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm < w) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  double s = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double fs = f(s);
    const double d = fprime(s);
    if (d <= 0.0) break;
    double ns = s - (fs - w) / d;
    if (ns <= a || ns >= b) ns = 0.5 * (a + b);  // keep the iterate bracketed
    if (fs < w) a = std::max(a, s);
    else b = std::min(b, s);
    const double ds = std::fabs(ns - s);
    s = ns;
    if (ds <= 1e-13 * (1.0 + std::fabs(s)) && std::fabs(f(s) - w) <= 1e-12 * (1.0 + std::fabs(w)))
      return s;
  }
  require(std::fabs(f(s) - w) <= 1e-9 * (1.0 + std::fabs(w)), Err::Convergence,
          "inverse iteration did not converge");
  return s;
}

Thresholds lambda_thresholds(double c0, double c1, double c2, bool strict, double eps_lambda) {
  require(c0 > 0.0, Err::InvalidBound, "ellipticity constant must be positive");
  require(c1 >= 0.0 && c2 >= 0.0, Err::InvalidBound, "flux bounds must be nonnegative");
  double l1 = c1 / c0;
  double l2 = -c2 / c0;
  if (strict) {
    if (l1 == 0.0) l1 = eps_lambda;
    if (l2 == 0.0) l2 = -eps_lambda;
  }
  return {l1, l2};
}

Transform extend_to_edge(const Transform& t, double edge_value, bool lower,
                         const EdgeClassification& cls) {
  if (cls.kind == EdgeCase::Interior || cls.kind == EdgeCase::Degenerate ||
      t.law().domain().contains(edge_value))
    return t;  // the edge point is already evaluable
  require(std::isfinite(edge_value), Err::Extension, "edge point must be finite");
  require(t.law().domain().contains_closure(edge_value), Err::Extension,
          "edge point must lie on the closure of the domain");
  if (lower) {
    require(cls.kind == EdgeCase::LowerOutside, Err::Extension,
            "lower extension requires the lower-outside classification");
    require(t.lambda() > 0.0, Err::Extension, "lower extension requires lambda > 0");
  } else {
    require(cls.kind == EdgeCase::UpperOutside, Err::Extension,
            "upper extension requires the upper-outside classification");
    require(t.lambda() < 0.0, Err::Extension, "upper extension requires lambda < 0");
  }

  Transform e = t;
  e.ext_edge_ = edge_value;
  // The signed-infinity limits shrink e^{lambda P} to zero; finite limits
  // extend it continuously.
  if (std::isinf(cls.limit)) {
    e.ext_integrand_ = 0.0;
  } else {
    e.ext_integrand_ = t.c() * std::exp(t.lambda() * cls.limit);
  }
  (lower ? e.ext_lo_ : e.ext_hi_) = true;
  return e;
}

}  // namespace dtlab

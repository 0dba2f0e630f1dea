#include "core/statelaw.hpp"

#include <algorithm>
#include <cmath>

namespace dtlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::shared_ptr<const StateLaw> StateLaw::isentropic(double gamma, double c) {
  require(gamma >= 1.0, Err::InvalidArgument, "isentropic exponent must be >= 1");
  require(c > 0.0, Err::InvalidArgument, "isentropic constant must be positive");
  auto law = std::shared_ptr<StateLaw>(new StateLaw());
  law->kind_ = LawKind::Isentropic;
  law->domain_ = Interval::half_line_closed();
  law->state_constant_ = c;
  law->gamma_ = gamma;
  return law;
}

std::shared_ptr<const StateLaw> StateLaw::ideal(double c, bool full_line) {
  require(c > 0.0, Err::InvalidArgument, "ideal-gas constant must be positive");
  auto law = std::shared_ptr<StateLaw>(new StateLaw());
  law->kind_ = LawKind::Ideal;
  law->domain_ = full_line ? Interval::full_line() : Interval::half_line_closed();
  law->state_constant_ = c;
  return law;
}

std::shared_ptr<const StateLaw> StateLaw::slightly_compressible(double kappa) {
  require(kappa > 0.0, Err::InvalidArgument, "compressibility must be positive");
  auto law = std::shared_ptr<StateLaw>(new StateLaw());
  law->kind_ = LawKind::SlightlyCompressible;
  law->domain_ = Interval::half_line_open();
  law->state_constant_ = 1.0 / kappa;
  law->kappa_ = kappa;
  return law;
}

std::shared_ptr<const StateLaw> StateLaw::custom(std::vector<double> s, std::vector<double> p,
                                                 bool lo_open, bool hi_open) {
  require(s.size() == p.size(), Err::InvalidArgument, "sample arrays differ in length");
  require(s.size() >= 2, Err::InvalidArgument, "need at least two samples");
  for (size_t i = 1; i < s.size(); ++i) {
    require(s[i] > s[i - 1], Err::InvalidArgument, "sample abscissae must increase");
    require(p[i] >= p[i - 1], Err::InvalidArgument, "pressure samples must be nondecreasing");
  }
  auto law = std::shared_ptr<StateLaw>(new StateLaw());
  law->kind_ = LawKind::Custom;
  law->domain_ = {s.front(), s.back(), lo_open, hi_open};

  // Fritsch-Carlson monotone slopes: nonnegative by construction here.
  const size_t n = s.size();
  std::vector<double> d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) d[i] = (p[i + 1] - p[i]) / (s[i + 1] - s[i]);
  std::vector<double> m(n);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (size_t i = 1; i + 1 < n; ++i)
    m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  for (size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / d[i], b = m[i + 1] / d[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double f = 3.0 / std::sqrt(r);
      m[i] = f * a * d[i];
      m[i + 1] = f * b * d[i];
    }
  }
  for (double mi : m)
    require(mi >= 0.0, Err::InvalidArgument, "interpolated pressure derivative is negative");
  law->ts_ = std::move(s);
  law->tp_ = std::move(p);
  law->slope_ = std::move(m);
  return law;
}

double StateLaw::p_raw(double s) const {
  switch (kind_) {
    case LawKind::Isentropic:
      return std::pow(s, gamma_);
    case LawKind::Ideal:
      return s;
    case LawKind::SlightlyCompressible:
      return std::log(s);
    case LawKind::Custom: {
      const auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
      size_t i = it == ts_.begin() ? 0 : static_cast<size_t>(it - ts_.begin()) - 1;
      if (i + 1 >= ts_.size()) i = ts_.size() - 2;
      const double h = ts_[i + 1] - ts_[i];
      const double x = (s - ts_[i]) / h;
      const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
      const double h10 = x * (1 - x) * (1 - x);
      const double h01 = x * x * (3 - 2 * x);
      const double h11 = x * x * (x - 1);
      return h00 * tp_[i] + h10 * h * slope_[i] + h01 * tp_[i + 1] + h11 * h * slope_[i + 1];
    }
  }
  return 0.0;
}

double StateLaw::pprime_raw(double s) const {
  switch (kind_) {
    case LawKind::Isentropic:
      return gamma_ == 1.0 ? 1.0 : gamma_ * std::pow(s, gamma_ - 1.0);
    case LawKind::Ideal:
      return 1.0;
    case LawKind::SlightlyCompressible:
      return 1.0 / s;
    case LawKind::Custom: {
      const auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
      size_t i = it == ts_.begin() ? 0 : static_cast<size_t>(it - ts_.begin()) - 1;
      if (i + 1 >= ts_.size()) i = ts_.size() - 2;
      const double h = ts_[i + 1] - ts_[i];
      const double x = (s - ts_[i]) / h;
      const double dh00 = 6 * x * (x - 1) / h;
      const double dh10 = (1 - x) * (1 - 3 * x);
      const double dh01 = -6 * x * (x - 1) / h;
      const double dh11 = x * (3 * x - 2);
      const double d = dh00 * tp_[i] + dh10 * slope_[i] + dh01 * tp_[i + 1] + dh11 * slope_[i + 1];
      return std::max(d, 0.0);
    }
  }
  return 0.0;
}

double StateLaw::p(double s) const {
  require(domain_.contains(s), Err::Domain, "density outside the law's domain");
  return p_raw(s);
}

double StateLaw::pprime(double s) const {
  require(domain_.contains(s), Err::Domain, "density outside the law's domain");
  return pprime_raw(s);
}

double StateLaw::edge_limit(double edge, bool from_above) const {
  require(std::isfinite(edge), Err::InvalidArgument, "edge must be finite");
  switch (kind_) {
    case LawKind::SlightlyCompressible:
      if (edge == 0.0 && from_above) return -kInf;
      break;
    default:
      break;
  }
  // Monotone P extends continuously onto finite closure points.
  return p_raw(edge);
}

EdgeClassification classify_edges(const StateLaw& law, double m_star, double M_star) {
  const Interval& J = law.domain();
  require(m_star <= M_star, Err::InconsistentRange, "extrema are disordered");
  require(J.contains_closure(m_star) && J.contains_closure(M_star), Err::InconsistentRange,
          "extrema outside the closure of the law's domain");
  if (m_star == M_star) return {EdgeCase::Degenerate, std::numeric_limits<double>::quiet_NaN()};
  const bool lo_in = J.contains(m_star);
  const bool hi_in = J.contains(M_star);
  if (lo_in && hi_in) return {EdgeCase::Interior, std::numeric_limits<double>::quiet_NaN()};
  require(lo_in || hi_in, Err::Classification,
          "both extrema outside the domain: unsupported two-sided edge case");
  if (!lo_in) return {EdgeCase::LowerOutside, law.edge_limit(m_star, true)};
  return {EdgeCase::UpperOutside, law.edge_limit(M_star, false)};
}

}  // namespace dtlab

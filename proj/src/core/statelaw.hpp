#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "core/error.hpp"

namespace dtlab {

enum class LawKind { Isentropic, Ideal, SlightlyCompressible, Custom };

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double s) const {
    if (lo_open ? s <= lo : s < lo) return false;
    if (hi_open ? s >= hi : s > hi) return false;
    return true;
  }
  bool contains_closure(double s) const { return s >= lo && s <= hi; }

  static Interval half_line_closed() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval half_line_open() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
  static Interval full_line() { return {}; }
};

// Pressure-density relation P on a density interval J; P nondecreasing on J.
class StateLaw {
 public:
  // P(s) = s^gamma on [0, inf); the factor c scales the flux matrix, not P.
  static std::shared_ptr<const StateLaw> isentropic(double gamma, double c);
  // P(s) = s on [0, inf) or on the full line.
  static std::shared_ptr<const StateLaw> ideal(double c, bool full_line);
  // P(s) = ln s on (0, inf); 1/kappa scales the flux matrix.
  static std::shared_ptr<const StateLaw> slightly_compressible(double kappa);
  // Tabulated samples with monotone cubic interpolation; requires P' >= 0.
  // Interval end openness may be marked to model excluded endpoints.
  static std::shared_ptr<const StateLaw> custom(std::vector<double> s, std::vector<double> p,
                                                bool lo_open = false, bool hi_open = false);

  double p(double s) const;        // Err::Domain outside J
  double pprime(double s) const;   // derivative; Err::Domain outside J

  LawKind kind() const { return kind_; }
  const Interval& domain() const { return domain_; }
  // Multiplier applied to M0*Kbar when assembling the flux matrix.
  double state_constant() const { return state_constant_; }
  double gamma() const { return gamma_; }

  // One-sided limit of P at a finite domain edge (+-inf allowed).
  double edge_limit(double edge, bool from_above) const;

 private:
  StateLaw() = default;
  double p_raw(double s) const;
  double pprime_raw(double s) const;

  LawKind kind_ = LawKind::Ideal;
  Interval domain_;
  double state_constant_ = 1.0;
  double gamma_ = 1.0;
  double kappa_ = 1.0;
  // Custom law tables plus Fritsch-Carlson slopes.
  std::vector<double> ts_, tp_, slope_;
};

enum class EdgeCase {
  Interior,      // both extrema inside J
  LowerOutside,  // min outside J (open lower end), max inside
  UpperOutside,  // max outside J (open upper end), min inside
  Degenerate,    // equal extrema
};

struct EdgeClassification {
  EdgeCase kind = EdgeCase::Interior;
  // P-limit at the outside edge (may be +-inf); NaN when no edge is outside.
  double limit = std::numeric_limits<double>::quiet_NaN();
};

// Classify the solution range [m_star, M_star] against the law's domain.
// InconsistentRange if disordered or outside closure(J); Classification if
// both ends fall outside J (the two-sided case has no supported envelope).
EdgeClassification classify_edges(const StateLaw& law, double m_star, double M_star);

}  // namespace dtlab

#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/statelaw.hpp"
#include "test_util.hpp"

using namespace dtlab;

TEST_CASE("ideal law: linear pressure, constant kept out of the shape") {
  auto law = StateLaw::ideal(3.0, false);
  CHECK(law->kind() == LawKind::Ideal);
  // The multiplicative constant scales the flux matrix, not P itself.
  CHECK(law->p(2.0) == doctest::Approx(2.0));
  CHECK(law->pprime(2.0) == doctest::Approx(1.0));
  CHECK(law->state_constant() == doctest::Approx(3.0));
  CHECK(law->domain().lo == 0.0);
  CHECK_FALSE(law->domain().lo_open);
  CHECK(law->p(0.0) == doctest::Approx(0.0));
  CHECK_ERRCODE(Err::Domain, law->p(-0.1));

  auto full = StateLaw::ideal(1.0, true);
  CHECK(full->p(-5.0) == doctest::Approx(-5.0));
  CHECK(std::isinf(full->domain().lo));
}

TEST_CASE("isentropic law: power pressure") {
  auto law = StateLaw::isentropic(1.4, 0.05);
  CHECK(law->kind() == LawKind::Isentropic);
  CHECK(law->gamma() == doctest::Approx(1.4));
  CHECK(law->state_constant() == doctest::Approx(0.05));
  CHECK(law->p(2.0) == doctest::Approx(std::pow(2.0, 1.4)).epsilon(1e-15));
  CHECK(law->pprime(2.0) == doctest::Approx(1.4 * std::pow(2.0, 0.4)).epsilon(1e-15));
  CHECK(law->p(0.0) == doctest::Approx(0.0));
  CHECK(law->edge_limit(0.0, true) == doctest::Approx(0.0));
  CHECK_ERRCODE(Err::Domain, law->p(-1.0));
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::isentropic(0.5, 1.0));
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::isentropic(1.4, 0.0));
}

TEST_CASE("slightly compressible law: log pressure on the open half line") {
  auto law = StateLaw::slightly_compressible(0.5);
  CHECK(law->kind() == LawKind::SlightlyCompressible);
  CHECK(law->p(2.0) == doctest::Approx(std::log(2.0)));
  CHECK(law->pprime(2.0) == doctest::Approx(0.5));
  // Flux multiplier is 1/kappa.
  CHECK(law->state_constant() == doctest::Approx(2.0));
  CHECK(law->domain().lo_open);
  CHECK_ERRCODE(Err::Domain, law->p(0.0));
  const double lim = law->edge_limit(0.0, true);
  CHECK(std::isinf(lim));
  CHECK(lim < 0.0);
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::slightly_compressible(-1.0));
}

TEST_CASE("custom tabulated law interpolates monotonically") {
  auto law = StateLaw::custom({0.0, 1.0, 2.0, 4.0}, {0.0, 1.0, 4.0, 5.0});
  CHECK(law->kind() == LawKind::Custom);
  CHECK(law->p(1.0) == doctest::Approx(1.0));
  CHECK(law->p(4.0) == doctest::Approx(5.0));
  double prev = law->p(0.0);
  for (int i = 1; i <= 200; ++i) {
    const double s = 4.0 * i / 200.0;
    const double v = law->p(s);
    CHECK(v >= prev - 1e-12);
    CHECK(law->pprime(s) >= -1e-12);
    prev = v;
  }
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::custom({0.0, 1.0}, {1.0, 0.0}));
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::custom({1.0, 0.0}, {0.0, 1.0}));
  CHECK_ERRCODE(Err::InvalidArgument, StateLaw::custom({0.0}, {0.0}));
}

TEST_CASE("edge classification of the solution range") {
  auto full = StateLaw::ideal(1.0, true);
  CHECK(classify_edges(*full, -3.0, 5.0).kind == EdgeCase::Interior);
  CHECK(classify_edges(*full, 2.0, 2.0).kind == EdgeCase::Degenerate);

  auto slight = StateLaw::slightly_compressible(1.0);
  CHECK(classify_edges(*slight, 0.5, 2.0).kind == EdgeCase::Interior);
  EdgeClassification c = classify_edges(*slight, 0.0, 2.0);
  CHECK(c.kind == EdgeCase::LowerOutside);
  CHECK(std::isinf(c.limit));
  CHECK(c.limit < 0.0);
  CHECK_ERRCODE(Err::InconsistentRange, classify_edges(*slight, -1.0, 2.0));
  CHECK_ERRCODE(Err::InconsistentRange, classify_edges(*slight, 2.0, 1.0));

  // Both ends open: the two-sided case has no supported envelope.
  auto open2 = StateLaw::custom({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, true, true);
  CHECK_ERRCODE(Err::Classification, classify_edges(*open2, 0.0, 1.0));
  EdgeClassification lo = classify_edges(*open2, 0.0, 0.5);
  CHECK(lo.kind == EdgeCase::LowerOutside);
  CHECK(lo.limit == doctest::Approx(0.0));
  EdgeClassification hi = classify_edges(*open2, 0.5, 1.0);
  CHECK(hi.kind == EdgeCase::UpperOutside);
  CHECK(hi.limit == doctest::Approx(1.0));
}

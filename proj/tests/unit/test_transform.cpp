#include <doctest.h>

#include <cmath>

#include "core/quadrature.hpp"
#include "core/transform.hpp"
#include "test_util.hpp"

using namespace dtlab;

TEST_CASE("linear pressure with positive rate integrates to an exponential") {
  // The law's own constant does not enter the shape of F.
  auto law = StateLaw::ideal(2.5, false);
  Transform t = make_transform(law, 1.0);
  CHECK(t.closed_form() == ClosedForm::Exponential);
  CHECK(t.s_origin() == doctest::Approx(0.0));
  CHECK(t.f(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(t.fprime(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(t.f_inv(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  Transform id = make_transform(law, 0.0);
  CHECK(id.closed_form() == ClosedForm::Identity);
  CHECK(id.f(2.0) == doctest::Approx(2.0));
  CHECK(id.fprime(2.0) == doctest::Approx(1.0));
}

TEST_CASE("scale and offset parameters carry through f, fprime, f_inv") {
  auto law = StateLaw::ideal(1.0, false);
  Transform t = make_transform(law, 1.0, 2.0, 3.0);
  CHECK(t.f(1.0) == doctest::Approx(2.0 * (std::exp(1.0) - 1.0) + 3.0).epsilon(1e-14));
  CHECK(t.fprime(1.0) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));
  CHECK(t.f_inv(t.f(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("log pressure with negative rate integrates to a power") {
  // The shape is kappa-independent: the integrand is z^lambda.
  auto law = StateLaw::slightly_compressible(0.7);
  Transform t = make_transform(law, -2.0);
  CHECK(t.closed_form() == ClosedForm::Power);
  CHECK(t.s_origin() == doctest::Approx(1.0));
  CHECK(t.f(2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.f(0.5) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(t.fprime(2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(t.f_inv(0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("log pressure with rate -1 falls back to quadrature of 1/z") {
  auto law = StateLaw::slightly_compressible(1.0);
  Transform t = make_transform(law, -1.0);
  CHECK(t.closed_form() == ClosedForm::None);
  CHECK(t.f(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(t.f(0.25) == doctest::Approx(std::log(0.25)).epsilon(1e-10));
  CHECK(t.f_inv(std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(t.fprime(2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("power pressure integrates by quadrature and matches simpson") {
  auto law = StateLaw::isentropic(2.0, 1.0);
  Transform t = make_transform(law, 0.5);
  CHECK(t.closed_form() == ClosedForm::IsentropicIntegral);
  for (double s : {0.3, 1.0, 2.0}) {
    const double ref =
        adaptive_simpson([](double z) { return std::exp(0.5 * z * z); }, 0.0, s, 1e-13);
    CHECK(t.f(s) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(t.f_inv(t.f(s)) == doctest::Approx(s).epsilon(1e-9));
  }
  CHECK(t.fprime(1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
}

TEST_CASE("round trip across all closed forms at many points") {
  struct Case {
    std::shared_ptr<const StateLaw> law;
    double lambda;
    double lo, hi;
  };
  const Case cases[] = {
      {StateLaw::ideal(1.0, true), 2.0, -1.0, 2.0},
      {StateLaw::ideal(1.0, false), 0.0, 0.0, 3.0},
      {StateLaw::slightly_compressible(0.5), -3.0, 0.2, 4.0},
      {StateLaw::isentropic(1.4, 1.0), -0.8, 0.05, 2.5},
  };
  for (const Case& c : cases) {
    Transform t = make_transform(c.law, c.lambda);
    for (int i = 0; i <= 500; ++i) {
      const double s = c.lo + (c.hi - c.lo) * i / 500.0;
      const double back = t.f_inv(t.f(s));
      CHECK(std::fabs(back - s) <= 1e-9 * std::max(1.0, std::fabs(s)));
    }
  }
}

TEST_CASE("derivative of f matches a central difference") {
  auto law = StateLaw::isentropic(1.4, 1.0);
  Transform t = make_transform(law, 0.9);
  for (double s : {0.5, 1.0, 1.8}) {
    const double h = 1e-6;
    const double num = (t.f(s + h) - t.f(s - h)) / (2.0 * h);
    CHECK(t.fprime(s) == doctest::Approx(num).epsilon(1e-7));
  }
}

TEST_CASE("rate thresholds from the quadratic-form bounds") {
  Thresholds th = lambda_thresholds(2.0, 1.0, 4.0);
  CHECK(th.lambda1 == doctest::Approx(0.5));
  CHECK(th.lambda2 == doctest::Approx(-2.0));

  // Vanishing bounds are pushed strictly away from zero.
  th = lambda_thresholds(1.0, 0.0, 0.0, true, 1e-6);
  CHECK(th.lambda1 == doctest::Approx(1e-6));
  CHECK(th.lambda2 == doctest::Approx(-1e-6));

  th = lambda_thresholds(1.0, 0.0, 0.0, false);
  CHECK(th.lambda1 == 0.0);
  CHECK(th.lambda2 == 0.0);

  CHECK_ERRCODE(Err::InvalidBound, lambda_thresholds(0.0, 1.0, 1.0));
}

TEST_CASE("extension onto an open lower edge") {
  auto law = StateLaw::slightly_compressible(1.0);
  // lambda = 1: integrand z stays finite at the edge, extension succeeds.
  Transform t = make_transform(law, 1.0);
  CHECK(t.closed_form() == ClosedForm::Power);
  CHECK(t.f(2.0) == doctest::Approx(1.5).epsilon(1e-14));

  EdgeClassification cls = classify_edges(*law, 0.0, 2.0);
  REQUIRE(cls.kind == EdgeCase::LowerOutside);
  Transform ext = extend_to_edge(t, 0.0, true, cls);
  CHECK(ext.extended_lower());
  CHECK(ext.f(0.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ext.fprime(0.0) == doctest::Approx(0.0));
  // Interior values are untouched.
  CHECK(ext.f(2.0) == doctest::Approx(t.f(2.0)).epsilon(1e-14));

  // A point already inside the domain is a no-op copy.
  Transform noop = extend_to_edge(t, 0.5, true, cls);
  CHECK_FALSE(noop.extended_lower());
  CHECK(noop.f(1.7) == doctest::Approx(t.f(1.7)).epsilon(1e-14));

  // Negative rate blows up at the edge: no continuous extension exists.
  Transform bad = make_transform(law, -1.0);
  CHECK_ERRCODE(Err::Extension, extend_to_edge(bad, 0.0, true, cls));
}

#include <doctest.h>

#include <cmath>

#include "core/linalg.hpp"
#include "test_util.hpp"

using namespace dtlab;

TEST_CASE("vec arithmetic and norms") {
  Vec a{1.0, 2.0};
  Vec b{3.0, -1.0};
  CHECK(a.dot(b) == doctest::Approx(1.0));
  CHECK((a + b)[0] == doctest::Approx(4.0));
  CHECK((a - b)[1] == doctest::Approx(3.0));
  CHECK((2.0 * a)[1] == doctest::Approx(4.0));
  CHECK(a.norm() == doctest::Approx(std::sqrt(5.0)));
  CHECK(b.max_abs() == doctest::Approx(3.0));
  Vec z(3);
  CHECK(z.n == 3);
  CHECK(z.norm() == 0.0);
}

TEST_CASE("mat products, transpose, symmetric part") {
  Mat m(2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 3;
  m(1, 1) = 4;
  Vec x{1.0, 1.0};
  Vec y = m.mul(x);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(7.0));
  Mat mt = m.transpose();
  CHECK(mt(0, 1) == doctest::Approx(3.0));
  Mat s = m.sym_part();
  CHECK(s(0, 1) == doctest::Approx(2.5));
  CHECK(s(1, 0) == doctest::Approx(2.5));
  CHECK(m.trace() == doctest::Approx(5.0));
  CHECK(m.max_abs() == doctest::Approx(4.0));
  CHECK(m.quad_form(x) == doctest::Approx(10.0));
  Mat p = m.mul(Mat::identity(2));
  CHECK(p(1, 0) == doctest::Approx(3.0));
  Mat d = Mat::diag(Vec{5.0, 7.0});
  CHECK(d(0, 0) == 5.0);
  CHECK(d(0, 1) == 0.0);
}

TEST_CASE("symmetric eigenvalues: known spectra") {
  Mat d = Mat::diag(Vec{2.0, 1.0});
  EigenValues e = sym_eigenvalues(d);
  CHECK(e.min() == doctest::Approx(1.0));
  CHECK(e.max() == doctest::Approx(2.0));

  Mat m(2);
  m(0, 0) = 2;
  m(0, 1) = 1;
  m(1, 0) = 1;
  m(1, 1) = 2;
  e = sym_eigenvalues(m);
  CHECK(e.min() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.max() == doctest::Approx(3.0).epsilon(1e-12));

  // Tridiagonal 3x3 with spectrum 2 - sqrt(2), 2, 2 + sqrt(2).
  Mat t(3);
  t(0, 0) = t(1, 1) = t(2, 2) = 2;
  t(0, 1) = t(1, 0) = t(1, 2) = t(2, 1) = -1;
  e = sym_eigenvalues(t);
  CHECK(e.w[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e.w[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.w[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("symmetric eigenvalues reject asymmetric input") {
  Mat m(2);
  m(0, 1) = 1.0;  // strictly upper
  CHECK_ERRCODE(Err::AsymmetricInput, sym_eigenvalues(m));
}

TEST_CASE("psd check") {
  CHECK(psd_check(Mat::identity(2)).first);
  Mat m(2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 1;
  auto [ok, mineig] = psd_check(m);
  CHECK_FALSE(ok);
  CHECK(mineig == doctest::Approx(-1.0).epsilon(1e-12));
  Mat z(2);  // zero matrix is PSD
  CHECK(psd_check(z).first);
}

TEST_CASE("closed-form 2x2 extreme eigenvalues match jacobi") {
  // Asymmetric input: closed forms act on the symmetric part.
  Mat m(2);
  m(0, 0) = 1;
  m(0, 1) = 4;
  m(1, 0) = 0;
  m(1, 1) = 1;
  CHECK(sym_min_eig_2x2(m) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sym_max_eig_2x2(m) == doctest::Approx(3.0).epsilon(1e-12));

  Mat d = Mat::diag(Vec{-2.0, 1.0});
  CHECK(sym_min_eig_2x2(d) == doctest::Approx(-2.0));
  CHECK(sym_max_eig_2x2(d) == doctest::Approx(1.0));

  Mat s(1);
  s(0, 0) = 3.5;
  CHECK(sym_min_eig_2x2(s) == doctest::Approx(3.5));
  CHECK(sym_max_eig_2x2(s) == doctest::Approx(3.5));
}

TEST_CASE("psd cholesky factors and handles rank deficiency") {
  Mat m(2);
  m(0, 0) = 4;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 5;
  Mat l = cholesky_psd(m);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(2.0));
  CHECK(l(0, 1) == 0.0);
  Mat r = l.mul(l.transpose());
  CHECK(r.max_abs() == doctest::Approx(5.0));
  CHECK((r - m).max_abs() == doctest::Approx(0.0).epsilon(1e-14));

  // Rank one: second pivot collapses to a zero column.
  Mat one(2);
  one(0, 0) = one(0, 1) = one(1, 0) = one(1, 1) = 1;
  Mat l1 = cholesky_psd(one);
  Mat r1 = l1.mul(l1.transpose());
  CHECK((r1 - one).max_abs() <= 1e-12);
  CHECK(l1(1, 1) == doctest::Approx(0.0));

  Mat z(2);
  Mat lz = cholesky_psd(z);
  CHECK(lz.max_abs() == 0.0);
}

TEST_CASE("dense linear solve") {
  Mat a(2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  Vec x = solve_linear_system(a, Vec{5.0, 10.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-13));

  Mat sing(2);
  sing(0, 0) = 1;
  sing(0, 1) = 2;
  sing(1, 0) = 2;
  sing(1, 1) = 4;
  CHECK_ERRCODE(Err::InvalidArgument, solve_linear_system(sing, Vec{1.0, 1.0}));
}

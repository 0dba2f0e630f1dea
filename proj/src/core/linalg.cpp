#include "core/linalg.hpp"

#include <algorithm>

namespace dtlab {

EigenValues sym_eigenvalues(const Mat& m, double tol_sym_rel) {
  require(m.n >= 1 && m.n <= kMaxDim, Err::InvalidArgument, "dimension out of range");
  const double scale = m.max_abs();
  const double tol_sym = tol_sym_rel * scale;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j)
      require(std::fabs(m(i, j) - m(j, i)) <= tol_sym, Err::AsymmetricInput,
              "matrix is not symmetric within tolerance");

  Mat a = m.sym_part();
  const int n = a.n;
  // Cyclic sweeps; off-diagonal mass shrinks quadratically once small.
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-300 || std::sqrt(off) <= 1e-16 * std::max(1.0, scale)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
        double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  EigenValues ev;
  ev.n = n;
  for (int i = 0; i < n; ++i) ev.w[static_cast<size_t>(i)] = a(i, i);
  std::sort(ev.w.begin(), ev.w.begin() + n);
  return ev;
}

std::pair<bool, double> psd_check(const Mat& m, double tol_rel) {
  const EigenValues ev = sym_eigenvalues(m, tol_rel);
  const double tol = tol_rel * std::max(1e-300, m.max_abs());
  return {ev.min() >= -tol, ev.min()};
}

double sym_min_eig_2x2(const Mat& m) {
  require(m.n == 1 || m.n == 2, Err::InvalidArgument, "closed form requires n <= 2");
  const Mat s = m.sym_part();
  if (s.n == 1) return s(0, 0);
  const double tr = s(0, 0) + s(1, 1);
  const double gap = std::hypot(s(0, 0) - s(1, 1), 2.0 * s(0, 1));
  return 0.5 * (tr - gap);
}

double sym_max_eig_2x2(const Mat& m) {
  require(m.n == 1 || m.n == 2, Err::InvalidArgument, "closed form requires n <= 2");
  const Mat s = m.sym_part();
  if (s.n == 1) return s(0, 0);
  const double tr = s(0, 0) + s(1, 1);
  const double gap = std::hypot(s(0, 0) - s(1, 1), 2.0 * s(0, 1));
  return 0.5 * (tr + gap);
}

Vec solve_linear_system(Mat a, Vec b) {
  require(a.n == b.n, Err::InvalidArgument, "dimension mismatch");
  const int n = a.n;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    require(std::fabs(a(col, col)) > 1e-300, Err::InvalidArgument, "matrix is singular");
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return x;
}

Mat cholesky_psd(const Mat& m, double tol_rel) {
  const double tol = tol_rel * std::max(1.0, m.max_abs());
  Mat l(m.n);
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        require(s >= -tol, Err::InvalidArgument, "matrix is not positive semidefinite");
        l(i, i) = s > tol ? std::sqrt(s) : 0.0;
      } else {
        l(i, j) = l(j, j) > 0.0 ? s / l(j, j) : 0.0;
      }
    }
  }
  return l;
}

}  // namespace dtlab

#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace dtlab {

// Displacement/coefficient spaces are tiny: dim <= 4 everywhere.
inline constexpr int kMaxDim = 4;

struct Vec {
  int n = 0;
  std::array<double, kMaxDim> v{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) { v.fill(0.0); }
  Vec(std::initializer_list<double> xs) {
    n = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) v[i++] = x;
  }

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += v[i] * o.v[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double max_abs() const {
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
  }
};

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < a.n; ++i) a.v[i] += b.v[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < a.n; ++i) a.v[i] -= b.v[i];
  return a;
}
inline Vec operator*(double s, Vec a) {
  for (int i = 0; i < a.n; ++i) a.v[i] *= s;
  return a;
}

// Square matrix, row-major fixed storage.
struct Mat {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  Mat() = default;
  explicit Mat(int dim) : n(dim) { a.fill(0.0); }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat diag(const Vec& d) {
    Mat m(d.n);
    for (int i = 0; i < d.n; ++i) m(i, i) = d[i];
    return m;
  }

  Vec mul(const Vec& x) const {
    Vec y(n);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
  Mat mul(const Mat& o) const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
  Mat transpose() const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
  Mat sym_part() const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return r;
  }
  double trace() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += (*this)(i, i);
    return s;
  }
  double max_abs() const {
    double m = 0;
    for (int i = 0; i < n * n; ++i) m = std::max(m, std::fabs(a[static_cast<size_t>(i)]));
    return m;
  }
  double quad_form(const Vec& x) const { return x.dot(mul(x)); }
};

inline Mat operator*(double s, Mat m) {
  for (int i = 0; i < m.n * m.n; ++i) m.a[static_cast<size_t>(i)] *= s;
  return m;
}
inline Mat operator+(Mat x, const Mat& y) {
  for (int i = 0; i < x.n * x.n; ++i) x.a[static_cast<size_t>(i)] += y.a[static_cast<size_t>(i)];
  return x;
}
inline Mat operator-(Mat x, const Mat& y) {
  for (int i = 0; i < x.n * x.n; ++i) x.a[static_cast<size_t>(i)] -= y.a[static_cast<size_t>(i)];
  return x;
}

struct EigenValues {
  int n = 0;
  std::array<double, kMaxDim> w{};  // ascending
  double min() const { return w[0]; }
  double max() const { return w[static_cast<size_t>(n - 1)]; }
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
// AsymmetricInput if |M - M^T|_max exceeds tol_sym_rel * |M|_max.
EigenValues sym_eigenvalues(const Mat& m, double tol_sym_rel = 1e-10);

// (is_psd, min_eig) with tolerance tol_rel * |M|_max on the smallest eigenvalue.
std::pair<bool, double> psd_check(const Mat& m, double tol_rel = 1e-10);

// Closed-form extreme eigenvalues of the symmetric part, n <= 2 only.
double sym_min_eig_2x2(const Mat& m);
double sym_max_eig_2x2(const Mat& m);

// Lower-triangular L with L L^T = M for symmetric positive semidefinite M.
// Zero (or slightly negative, within tol) pivots collapse to zero columns.
Mat cholesky_psd(const Mat& m, double tol_rel = 1e-10);

// Gaussian elimination with partial pivoting; InvalidArgument when singular.
Vec solve_linear_system(Mat a, Vec b);

}  // namespace dtlab

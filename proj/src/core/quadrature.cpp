#include "core/quadrature.hpp"

#include <cmath>
#include <mutex>

namespace dtlab {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussRule build_rule(int order) {
  GaussRule r;
  r.nodes.resize(static_cast<size_t>(order));
  r.weights.resize(static_cast<size_t>(order));
  for (int i = 0; i < order; ++i) {
    // Chebyshev-based initial guess, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    if (order == 1) x = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(order, x);
    (void)p;
    r.nodes[static_cast<size_t>(order - 1 - i)] = x;
    r.weights[static_cast<size_t>(order - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (order == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  require(order >= 1 && order <= kMaxQuadOrder, Err::Quadrature,
          "Gauss-Legendre order must be in [1, 64]");
  static std::mutex mu;
  static GaussRule cache[kMaxQuadOrder + 1];
  static bool ready[kMaxQuadOrder + 1] = {};
  std::lock_guard<std::mutex> lock(mu);
  if (!ready[order]) {
    cache[order] = build_rule(order);
    ready[order] = true;
  }
  return cache[order];
}

void for_each_quad_node(int dim, const Vec& lo, const Vec& hi, int order,
                        const std::function<void(const Vec&, double)>& f) {
  require(dim >= 1 && dim <= kMaxDim, Err::InvalidArgument, "dimension out of range");
  const GaussRule& rule = gauss_legendre(order);
  std::array<double, kMaxDim> mid{}, half{};
  for (int d = 0; d < dim; ++d) {
    mid[static_cast<size_t>(d)] = 0.5 * (hi[d] + lo[d]);
    half[static_cast<size_t>(d)] = 0.5 * (hi[d] - lo[d]);
    require(half[static_cast<size_t>(d)] >= 0.0, Err::InvalidArgument, "box is inverted");
  }
  std::array<int, kMaxDim> idx{};
  Vec x(dim);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int i = idx[static_cast<size_t>(d)];
      x[d] = mid[static_cast<size_t>(d)] + half[static_cast<size_t>(d)] * rule.nodes[static_cast<size_t>(i)];
      w *= half[static_cast<size_t>(d)] * rule.weights[static_cast<size_t>(i)];
    }
    f(x, w);
    int d = 0;
    for (; d < dim; ++d) {
      if (++idx[static_cast<size_t>(d)] < order) break;
      idx[static_cast<size_t>(d)] = 0;
    }
    if (d == dim) break;
  }
}

double integrate_box(int dim, const Vec& lo, const Vec& hi, int order,
                     const std::function<double(const Vec&)>& f) {
  double acc = 0.0;
  for_each_quad_node(dim, lo, hi, order, [&](const Vec& x, double w) { acc += w * f(x); });
  return acc;
}

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol || (b - a) < 1e-300)
    return left + right + delta / 15.0;
  require(depth > 0, Err::Quadrature, "adaptive refinement did not settle");
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  require(abs_tol > 0.0, Err::InvalidArgument, "tolerance must be positive");
  if (a == b) return 0.0;
  const double sgn = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fm = f(m), fb = f(hi);
  const double whole = simpson(fa, fm, fb, hi - lo);
  return sgn * adapt(f, lo, hi, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace dtlab

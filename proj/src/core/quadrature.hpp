#pragma once

#include <functional>
#include <vector>

#include "core/linalg.hpp"

namespace dtlab {

inline constexpr int kMaxQuadOrder = 64;

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2*order - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order. QuadratureError outside [1, kMaxQuadOrder].
const GaussRule& gauss_legendre(int order);

// Visit every node of the tensor-product rule over the box [lo, hi]^dim.
// f receives the node and its product weight (already scaled by the box).
void for_each_quad_node(int dim, const Vec& lo, const Vec& hi, int order,
                        const std::function<void(const Vec&, double)>& f);

double integrate_box(int dim, const Vec& lo, const Vec& hi, int order,
                     const std::function<double(const Vec&)>& f);

// Recursive adaptive Simpson; abs_tol is split across subintervals.
// QuadratureError if the refinement does not settle before max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 52);

}  // namespace dtlab

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "supq/rootdata.hpp"

namespace supq {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  long evals = 0;
};

enum class QuadScheme { gauss_jacobi_tensor, adaptive_1d };

struct QuadConfig {
  double rel_tol = 1e-10;
  int max_points_per_axis = 400;
  int min_points_per_axis = 16;
  QuadScheme scheme = QuadScheme::gauss_jacobi_tensor;
};

struct JacobiRule {
  std::vector<double> nodes;    // ascending on (-1,1)
  std::vector<double> weights;  // for weight (1-u)^alpha (1+u)^beta
};

// Newton-iterated nodes, cached per (npoints, alpha, beta). The reference
// stays valid for the program lifetime.
const JacobiRule &gauss_jacobi_nodes(int npoints, double alpha, double beta);

// Symmetric nonnegative integrand on unordered cube coordinates. Grid points
// may repeat a coordinate (tensor diagonal), which is why this takes raw
// spans rather than the strictly ordered XVector.
using SimplexIntegrand = std::function<double(std::span<const double>)>;

// Integral over the ordered region R > x_1 > ... > x_q > 0 of
//   integrand(x) * prod_r x_r^a (1-x_r)^b,
// computed as 1/q! of the cube integral. The x^a factor is always absorbed
// into the Jacobi weight; the (1-x)^b factor only when R = 1 (for R < 1 it
// is smooth on [0,R] and evaluated directly, so node tables are reused
// across many R).
QuadResult integrate_simplex(Signature sig, const SimplexIntegrand &integrand,
                             double R, double a, double b, const QuadConfig &cfg);

namespace detail {
// One tensor pass at a fixed node budget: no refinement, no convergence
// claim, no symmetry spot-check. Meant for error-density integrands whose
// value is itself an error estimate (abs_err is reported as 0).
QuadResult tensor_eval_fixed(Signature sig, const SimplexIntegrand &integrand,
                             double R, double a, double b, int npoints);
}

// B(R; l/2+1, m/2-1) / B(1; l/2+1, m/2-1) by continued fraction, the one
// variable reduction of the mass ratio when p = q = 1.
double incomplete_ratio_1d(int m, int l, double R);

// Regularized incomplete beta I_x(a, b); exposed for tests.
double regularized_incomplete_beta(double a, double b, double x);

} // namespace supq

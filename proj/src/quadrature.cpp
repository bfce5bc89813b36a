#include "supq/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

#include "supq/errors.hpp"
#include "supq/rng.hpp"

namespace supq {

namespace {

// Jacobi polynomial P_n^(alpha,beta) at x with derivative and P_{n-1},
// by the three-term recurrence. Runs in extended precision internally: the
// recurrence cancels one factor of k per step near x = +-1, which in plain
// double leaves ~1e-10 relative error in the endpoint weights at n = 400.
void jacobi_eval(int n, double alf, double bet, double x, double &p, double &pp,
                 double &pm1) {
  using real = long double;
  const real a = alf, b = bet, xx = x;
  real p0 = 1.0L;
  real p1 = 0.5L * (a + b + 2.0L) * xx + 0.5L * (a - b);
  for (int k = 2; k <= n; ++k) {
    const real t = 2.0L * k + a + b;
    const real a1 = 2.0L * k * (k + a + b) * (t - 2.0L);
    const real a2 = (t - 1.0L) * (a * a - b * b);
    const real a3 = (t - 1.0L) * t * (t - 2.0L);
    const real a4 = 2.0L * (k + a - 1.0L) * (k + b - 1.0L) * t;
    const real p2 = ((a2 + a3 * xx) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  p = static_cast<double>(p1);
  pm1 = static_cast<double>(p0);
  const real t = 2.0L * n + a + b;
  pp = static_cast<double>(
      (n * (a - b - t * xx) * p1 + 2.0L * (n + a) * (n + b) * p0) /
      (t * (1.0L - xx * xx)));
}

JacobiRule compute_rule(int n, double alf, double bet) {
  JacobiRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Weight via M_n / ((1-x^2) P_n'(x)^2). The 1/(P_n' P_{n-1}) form is badly
  // conditioned at the endpoint clusters: interlacing pushes a root of P_{n-1}
  // within ~1e-4 of the node there, so the node's own half-ulp rounding costs
  // ~1e-9 of relative weight. P_n' stays away from zero at a simple root.
  const double logw = (alf + bet + 1.0) * std::log(2.0) + std::lgamma(n + alf + 1.0) +
                      std::lgamma(n + bet + 1.0) - std::lgamma(n + 1.0) -
                      std::lgamma(n + alf + bet + 1.0);
  double z = 0.0;
  // Roots found in descending order; initial guesses follow the classical
  // recipe (largest roots explicitly, interior by cubic extrapolation).
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      const double an = alf / n, bn = bet / n;
      const double r1 = (1.0 + alf) * (2.78 / (4.0 + n * n) + 0.768 * an / n);
      const double r2 =
          1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
      z = 1.0 - r1 / r2;
    } else if (i == 1) {
      const double r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.156 * alf));
      const double r2 = 1.0 + 0.06 * (n - 8.0) * (1.0 + 0.12 * alf) / n;
      const double r3 = 1.0 + 0.012 * bet * (1.0 + 0.25 * std::abs(alf)) / n;
      z -= (1.0 - z) * r1 * r2 * r3;
    } else if (i == 2) {
      const double r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
      const double r2 = 1.0 + 0.22 * (n - 8.0) / n;
      const double r3 = 1.0 + 8.0 * bet / ((6.28 + bet) * n * n);
      z -= (rule.nodes[0] - z) * r1 * r2 * r3;
    } else if (i == n - 2) {
      const double r1 = (1.0 + 0.235 * bet) / (0.766 + 0.119 * bet);
      const double r2 = 1.0 / (1.0 + 0.639 * (n - 4.0) / (1.0 + 0.71 * (n - 4.0)));
      const double r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * n * n));
      z += (z - rule.nodes[n - 4]) * r1 * r2 * r3;
    } else if (i == n - 1) {
      const double r1 = (1.0 + 0.37 * bet) / (1.67 + 0.28 * bet);
      const double r2 = 1.0 / (1.0 + 0.22 * (n - 8.0) / n);
      const double r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * n * n));
      z += (z - rule.nodes[n - 3]) * r1 * r2 * r3;
    } else {
      z = 3.0 * rule.nodes[i - 1] - 3.0 * rule.nodes[i - 2] + rule.nodes[i - 3];
    }
    double p = 0.0, pp = 0.0, pm1 = 0.0;
    bool done = false;
    for (int it = 0; it < 100; ++it) {
      jacobi_eval(n, alf, bet, z, p, pp, pm1);
      const double z1 = z;
      z = z1 - p / pp;
      if (z >= 1.0) z = 0.5 * (z1 + 1.0);
      if (z <= -1.0) z = 0.5 * (z1 - 1.0);
      if (std::abs(z - z1) <= 1e-14) {
        done = true;
        break;
      }
    }
    if (!done) throw ConvergenceError("gauss_jacobi_nodes: Newton did not converge");
    jacobi_eval(n, alf, bet, z, p, pp, pm1);
    rule.nodes[i] = z;
    rule.weights[i] = std::exp(logw) / ((1.0 - z * z) * pp * pp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  // The lgamma combination above carries O(n*eps) relative error at large n,
  // shared by every weight; pin the common factor to the exact zeroth moment.
  const double mom0 = std::exp((alf + bet + 1.0) * std::log(2.0) + std::lgamma(alf + 1.0) +
                               std::lgamma(bet + 1.0) - std::lgamma(alf + bet + 2.0));
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  const double fix = mom0 / sum;
  for (double &w : rule.weights) w *= fix;
  return rule;
}

} // namespace

const JacobiRule &gauss_jacobi_nodes(int npoints, double alpha, double beta) {
  if (npoints < 1) throw std::invalid_argument("gauss_jacobi_nodes: npoints < 1");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("gauss_jacobi_nodes: need alpha, beta > -1");
  using Key = std::tuple<int, std::uint64_t, std::uint64_t>;
  static std::map<Key, std::unique_ptr<JacobiRule>> cache;
  static std::shared_mutex mx;
  const Key key{npoints, std::bit_cast<std::uint64_t>(alpha),
                std::bit_cast<std::uint64_t>(beta)};
  {
    std::shared_lock lock(mx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<JacobiRule>(compute_rule(npoints, alpha, beta));
  std::unique_lock lock(mx);
  auto [it, inserted] = cache.try_emplace(key, std::move(rule));
  return *it->second;
}

namespace {

struct Axis {
  std::vector<double> x;  // points in (0, R)
  std::vector<double> w;  // weights including all absorbed factors
};

Axis build_axis(int npts, double R, double a, double b) {
  Axis axis;
  axis.x.resize(npts);
  axis.w.resize(npts);
  if (R == 1.0) {
    const JacobiRule &rule = gauss_jacobi_nodes(npts, b, a);
    const double scale = std::pow(0.5, a + b + 1.0);
    for (int i = 0; i < npts; ++i) {
      axis.x[i] = 0.5 * (rule.nodes[i] + 1.0);
      axis.w[i] = scale * rule.weights[i];
    }
  } else {
    const JacobiRule &rule = gauss_jacobi_nodes(npts, 0.0, a);
    const double scale = std::pow(0.5 * R, a + 1.0);
    for (int i = 0; i < npts; ++i) {
      axis.x[i] = 0.5 * R * (rule.nodes[i] + 1.0);
      axis.w[i] = scale * rule.weights[i] * std::pow(1.0 - axis.x[i], b);
    }
  }
  return axis;
}

double tensor_pass(int q, const Axis &axis, const SimplexIntegrand &f, long &evals) {
  const int n = static_cast<int>(axis.x.size());
  std::vector<int> idx(q, 0);
  std::vector<double> pt(q);
  double sum = 0.0;
  for (;;) {
    double wprod = 1.0;
    for (int d = 0; d < q; ++d) {
      pt[d] = axis.x[idx[d]];
      wprod *= axis.w[idx[d]];
    }
    sum += wprod * f(pt);
    ++evals;
    int d = 0;
    while (d < q && ++idx[d] == n) {
      idx[d] = 0;
      ++d;
    }
    if (d == q) break;
  }
  return sum;
}

double factorial(int q) {
  double f = 1.0;
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}

void spot_check_symmetry(int q, const SimplexIntegrand &f, double R) {
  if (q < 2) return;
  Rng rng(0x53C4E57ULL);
  std::vector<double> pt(q), perm(q);
  for (int trial = 0; trial < 10; ++trial) {
    for (int d = 0; d < q; ++d) pt[d] = rng.uniform(0.0, R);
    perm = pt;
    for (int d = q - 1; d > 0; --d) {
      int j = static_cast<int>(rng.uniform() * (d + 1));
      std::swap(perm[d], perm[j]);
    }
    const double f1 = f(pt);
    const double f2 = f(perm);
    if (std::abs(f1 - f2) > 1e-8 * std::max({std::abs(f1), std::abs(f2), 1e-300}))
      throw SymmetryError("integrate_simplex: integrand failed symmetry spot-check");
  }
}

QuadResult adaptive_1d_pass(const SimplexIntegrand &f, double R, double a, double b,
                            const QuadConfig &cfg) {
  // Interval-splitting fallback for one axis; evaluates the endpoint factors
  // pointwise, so it is intended for nonnegative exponents.
  struct Panel {
    double lo, hi, value, err;
  };
  auto full = [&](double x) {
    double v = f(std::span<const double>(&x, 1));
    if (a != 0.0) v *= std::pow(x, a);
    if (b != 0.0) v *= std::pow(1.0 - x, b);
    return v;
  };
  long evals = 0;
  auto estimate = [&](double lo, double hi) {
    const JacobiRule &r10 = gauss_jacobi_nodes(10, 0.0, 0.0);
    const JacobiRule &r20 = gauss_jacobi_nodes(20, 0.0, 0.0);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double v10 = 0.0, v20 = 0.0;
    for (int i = 0; i < 10; ++i) v10 += r10.weights[i] * full(mid + half * r10.nodes[i]);
    for (int i = 0; i < 20; ++i) v20 += r20.weights[i] * full(mid + half * r20.nodes[i]);
    evals += 30;
    return Panel{lo, hi, v20 * half, std::abs(v20 - v10) * half};
  };
  std::vector<Panel> panels{estimate(0.0, R)};
  for (int round = 0; round < 2000; ++round) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (err <= cfg.rel_tol * std::max(std::abs(total), 1e-300) || panels[worst].err == 0.0)
      return {total, err + 4e-16 * std::abs(total), evals};
    Panel split = panels[worst];
    panels[worst] = estimate(split.lo, 0.5 * (split.lo + split.hi));
    panels.push_back(estimate(0.5 * (split.lo + split.hi), split.hi));
  }
  throw ConvergenceError("integrate_simplex: adaptive refinement stalled");
}

} // namespace

QuadResult integrate_simplex(Signature sig, const SimplexIntegrand &integrand,
                             double R, double a, double b, const QuadConfig &cfg) {
  if (!(R > 0.0 && R <= 1.0))
    throw std::invalid_argument("integrate_simplex: R must lie in (0,1]");
  if (!(a > -1.0)) throw std::invalid_argument("integrate_simplex: need a > -1");
  if (R == 1.0 && !(b > -1.0))
    throw std::invalid_argument("integrate_simplex: need b > -1 when R = 1");
  const int q = sig.q;
  spot_check_symmetry(q, integrand, R);

  if (cfg.scheme == QuadScheme::adaptive_1d) {
    if (q != 1)
      throw std::invalid_argument("integrate_simplex: adaptive_1d supports q = 1 only");
    return adaptive_1d_pass(integrand, R, a, b, cfg);
  }

  long evals = 0;
  double prev = 0.0;
  bool have_prev = false;
  int npts = std::min(cfg.min_points_per_axis, cfg.max_points_per_axis);
  const double qfact = factorial(q);
  for (;;) {
    Axis axis = build_axis(npts, R, a, b);
    const double value = tensor_pass(q, axis, integrand, evals) / qfact;
    if (have_prev) {
      const double diff = std::abs(value - prev);
      if (diff <= cfg.rel_tol * std::abs(value) || (value == 0.0 && diff == 0.0))
        return {value, diff + 4e-16 * std::abs(value), evals};
    }
    if (npts >= cfg.max_points_per_axis) break;
    prev = value;
    have_prev = true;
    npts = std::min(2 * npts, cfg.max_points_per_axis);
  }
  throw ConvergenceError("integrate_simplex: refinement stalled above rel_tol");
}

namespace detail {

QuadResult tensor_eval_fixed(Signature sig, const SimplexIntegrand &integrand,
                             double R, double a, double b, int npoints) {
  if (!(R > 0.0 && R <= 1.0))
    throw std::invalid_argument("tensor_eval_fixed: R must lie in (0,1]");
  long evals = 0;
  Axis axis = build_axis(npoints, R, a, b);
  const double value = tensor_pass(sig.q, axis, integrand, evals) / factorial(sig.q);
  return {value, 0.0, evals};
}

} // namespace detail

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) return h;
  }
  throw ConvergenceError("regularized_incomplete_beta: continued fraction stalled");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: need a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double incomplete_ratio_1d(int m, int l, double R) {
  if (l < 0) throw std::invalid_argument("incomplete_ratio_1d: need l >= 0");
  if (m < 3 || 0.5 * m - 1.0 <= 0.0)
    throw std::invalid_argument("incomplete_ratio_1d: need m >= 3");
  if (!(R >= 0.0 && R <= 1.0))
    throw std::invalid_argument("incomplete_ratio_1d: R must lie in [0,1]");
  return regularized_incomplete_beta(0.5 * l + 1.0, 0.5 * m - 1.0, R);
}

} // namespace supq

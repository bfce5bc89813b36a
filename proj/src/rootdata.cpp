#include "supq/rootdata.hpp"

#include <cmath>
#include <stdexcept>

namespace supq {

Signature::Signature(int p_, int q_) : p(p_), q(q_) {
  if (q < 1 || p < q) throw std::invalid_argument("Signature: need p >= q >= 1");
}

double RestrictedRoot::eval(std::span<const double> t) const {
  double v = 0.0;
  for (std::size_t r = 0; r < coeffs.size(); ++r) v += coeffs[r] * t[r];
  return v;
}

RootSystem build_sigma_plus(Signature sig) {
  RootSystem rs;
  rs.sig = sig;
  const int q = sig.q;
  auto unit = [q](int r, int c) {
    std::vector<int> v(q, 0);
    v[r] = c;
    return v;
  };
  for (int r = 0; r < q; ++r)
    for (int s = r + 1; s < q; ++s) {
      std::vector<int> diff = unit(r, 1), sum = unit(r, 1);
      diff[s] = -1;
      sum[s] = 1;
      rs.roots.push_back({std::move(diff), 2});
      rs.roots.push_back({std::move(sum), 2});
    }
  for (int r = 0; r < q; ++r) rs.roots.push_back({unit(r, 2), 1});
  if (sig.p > sig.q)
    for (int r = 0; r < q; ++r) rs.roots.push_back({unit(r, 1), 2 * (sig.p - sig.q)});
  return rs;
}

ChamberVector::ChamberVector(std::vector<double> t) : t_(std::move(t)) {
  if (t_.empty()) throw std::invalid_argument("ChamberVector: empty");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0.0)) throw std::invalid_argument("ChamberVector: coordinates must be > 0");
    if (i > 0 && !(t_[i - 1] > t_[i]))
      throw std::invalid_argument("ChamberVector: coordinates must strictly decrease");
  }
}

XVector::XVector(std::vector<double> x) : x_(std::move(x)) {
  if (x_.empty()) throw std::invalid_argument("XVector: empty");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] > 0.0 && x_[i] < 1.0))
      throw std::invalid_argument("XVector: coordinates must lie in (0,1)");
    if (i > 0 && !(x_[i - 1] > x_[i]))
      throw std::invalid_argument("XVector: coordinates must strictly decrease");
  }
}

namespace {

double log_sinh(double x) {
  // sinh x = e^x (1 - e^{-2x}) / 2, stable for all x > 0
  return x + std::log1p(-std::exp(-2.0 * x)) - 0.6931471805599453094;
}

} // namespace

double log_sinh_density(const RootSystem &rs, const ChamberVector &t) {
  if (t.q() != rs.sig.q) throw std::invalid_argument("sinh_density: wrong dimension");
  const std::span<const double> tv(t.coords());
  double acc = 0.0;
  for (const auto &root : rs.roots) acc += root.mult * log_sinh(root.eval(tv));
  return acc;
}

double sinh_density(const RootSystem &rs, const ChamberVector &t) {
  return std::exp(log_sinh_density(rs, t));
}

double detail::mu_raw(Signature sig, std::span<const double> x) {
  double v = 1.0;
  for (int r = 0; r < sig.q; ++r) {
    v *= std::pow(x[r], sig.p - sig.q) / std::pow(1.0 - x[r], sig.n());
    for (int s = r + 1; s < sig.q; ++s) {
      double d = x[r] - x[s];
      v *= d * d;
    }
  }
  return v;
}

double mu(Signature sig, const XVector &x) {
  if (x.q() != sig.q) throw std::invalid_argument("mu: wrong dimension");
  return detail::mu_raw(sig, x.coords());
}

double nu(int n, int N) {
  if (n < 1 || N < 1) throw std::invalid_argument("nu: need n, N >= 1");
  const double e = n / (2.0 * N * N);
  const double s = std::sqrt(1.0 + e) + std::sqrt(e);
  return 1.0 / (s * s);
}

double max_R(int n, int N) { return std::atanh(std::sqrt(nu(n, N))); }

double cov_identity_residual(Signature sig, const ChamberVector &t) {
  if (t.q() != sig.q) throw std::invalid_argument("cov_identity_residual: wrong dimension");
  const double log_lhs = log_sinh_density(build_sigma_plus(sig), t);
  // Right-hand side through the simplex density at x = tanh^2 t, in log space
  // so that the comparison survives chamber points far from the origin.
  std::vector<double> x(sig.q);
  for (int r = 0; r < sig.q; ++r) {
    double th = std::tanh(t[r]);
    x[r] = th * th;
  }
  double log_rhs = std::log(detail::mu_raw(sig, x));
  for (int r = 0; r < sig.q; ++r) {
    double th = std::tanh(t[r]);
    double sech = 1.0 / std::cosh(t[r]);
    log_rhs += std::log(2.0 * th * sech * sech);
  }
  return std::abs(1.0 - std::exp(log_rhs - log_lhs));
}

} // namespace supq

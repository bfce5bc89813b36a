#pragma once

#include <span>
#include <vector>

namespace supq {

struct Signature {
  int p = 1, q = 1;
  Signature() = default;
  Signature(int p_, int q_);
  int n() const { return p + q; }
  bool operator==(const Signature &o) const { return p == o.p && q == o.q; }
};

// One positive restricted root, as integer coefficients on the flat
// coordinates t_1..t_q, together with its multiplicity.
struct RestrictedRoot {
  std::vector<int> coeffs;
  int mult = 0;
  double eval(std::span<const double> t) const;
};

// The families e_r - e_s and e_r + e_s (r < s) with multiplicity 2,
// 2 e_r with multiplicity 1, and e_r with multiplicity 2(p - q),
// the last family absent when p = q.
struct RootSystem {
  Signature sig;
  std::vector<RestrictedRoot> roots;
};

RootSystem build_sigma_plus(Signature sig);

// Strictly ordered flat coordinates t_1 > ... > t_q > 0. Ties are rejected
// with zero tolerance: degenerate inputs mean a bug upstream, not noise.
class ChamberVector {
public:
  explicit ChamberVector(std::vector<double> t);
  int q() const { return static_cast<int>(t_.size()); }
  const std::vector<double> &coords() const { return t_; }
  double operator[](int i) const { return t_[i]; }

private:
  std::vector<double> t_;
};

// Simplex coordinates 1 > x_1 > ... > x_q > 0, strictly ordered.
class XVector {
public:
  explicit XVector(std::vector<double> x);
  int q() const { return static_cast<int>(x_.size()); }
  const std::vector<double> &coords() const { return x_; }
  double operator[](int i) const { return x_[i]; }

private:
  std::vector<double> x_;
};

// prod over positive roots of sinh(root(t))^mult. Computed in log space so
// that chamber points with t_1 well above 3 do not overflow.
double sinh_density(const RootSystem &rs, const ChamberVector &t);
double log_sinh_density(const RootSystem &rs, const ChamberVector &t);

// Density on the x-simplex: prod_r x_r^(p-q) / (1-x_r)^n * prod_{r<s} (x_r - x_s)^2.
double mu(Signature sig, const XVector &x);

namespace detail {
// Same formula on unvalidated coordinates; used on tensor grid points where
// ordering is arbitrary (the value is permutation invariant).
double mu_raw(Signature sig, std::span<const double> x);
}

// Truncation endpoint in simplex coordinates for level N:
//   (sqrt(1 + n/(2N^2)) + sqrt(n/(2N^2)))^(-2).
double nu(int n, int N);

// Matching radius in flat coordinates, artanh(sqrt(nu)).
// Identity: equals (1/4) arcosh(1 + 4N^2/n).
double max_R(int n, int N);

// Relative defect of the change-of-variables identity
//   sinh_density(t) = mu(tanh^2 t) * prod_r 2 tanh(t_r) sech^2(t_r),
// evaluated through the two independent routes.
double cov_identity_residual(Signature sig, const ChamberVector &t);

} // namespace supq

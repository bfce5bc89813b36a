#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "supq/group.hpp"
#include "supq/integrand.hpp"
#include "supq/rootdata.hpp"

namespace supq {

using BigInt = boost::multiprecision::cpp_int;

// Exact Gaussian integer; all congruence and norm statements about Gamma_G(N)
// run through this type so there is no rounding anywhere in the lemma checks.
struct GaussInt {
  BigInt re, im;

  GaussInt() = default;
  GaussInt(long r, long i) : re(r), im(i) {}
  GaussInt(BigInt r, BigInt i) : re(std::move(r)), im(std::move(i)) {}

  GaussInt operator+(const GaussInt &o) const { return {re + o.re, im + o.im}; }
  GaussInt operator-(const GaussInt &o) const { return {re - o.re, im - o.im}; }
  GaussInt operator*(const GaussInt &o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussInt conj() const { return {re, -im}; }
  BigInt norm() const { return re * re + im * im; }
  bool is_zero() const { return re == 0 && im == 0; }
  bool operator==(const GaussInt &o) const { return re == o.re && im == o.im; }
  bool divisible_by(long N) const { return re % N == 0 && im % N == 0; }
};

// Element of Gamma_G(N) held exactly; construction happens only inside
// enumerate_gamma, which verifies the defining relations in integer
// arithmetic before emitting.
struct LatticeElement {
  Signature sig;
  std::vector<GaussInt> entries;  // n x n row-major
  BigInt norm_sq;

  const GaussInt &at(int r, int c) const {
    return entries[static_cast<std::size_t>(r) * static_cast<std::size_t>(sig.n()) +
                   static_cast<std::size_t>(c)];
  }
};

// Exact membership relations g* I_{p,q} g = I_{p,q} and det g = 1.
bool check_relations(const LatticeElement &g);
// Off-diagonal blocks exactly zero (the Gamma \cap K dichotomy).
bool in_k(const LatticeElement &g);
CMatrix to_cmatrix(const LatticeElement &g);

// Complete set {gamma in Gamma_G(N) : ||gamma||^2 <= bound}, canonically
// ordered (norm, then entrywise lexicographic). (1,1) runs through the
// SU(1,1) normal form [[a, b],[conj b, conj a]]; other signatures fall back
// to column backtracking with exact Gram pruning and a candidate cap.
std::vector<LatticeElement> enumerate_gamma(Signature sig, long N, long long bound,
                                            long long cap = 10000000);

namespace detail {
// The generic backtracking path regardless of signature; exposed so tests can
// confront it with the (1,1) normal form.
std::vector<LatticeElement> enumerate_backtracking(Signature sig, long N, long long bound,
                                                   long long cap);
}

struct NormGapReport {
  long total = 0;
  long in_k = 0;
  long off_k = 0;
  BigInt min_off_k_norm;  // zero when off_k == 0
  BigInt gap_bound;       // 4 N^2 + n
  bool holds = false;
};

// Verifies norm_sq >= 4 N^2 + n for every enumerated element outside K,
// entirely in integer arithmetic. A violation would falsify the separation
// bound the whole construction rests on, so it throws rather than returning.
NormGapReport check_norm_gap(Signature sig, long N, const std::vector<LatticeElement> &elems);

// count elements k1 exp_Ht(t) k2 exp_Ht(-l) k3 with t, l uniform on the
// ordered chamber cut at radius R (cube draws sorted into the chamber).
std::vector<GroupElement> sample_KSK(Signature sig, double R, long count, HaarSampler &sampler);

// Closed-form separation test: true iff n cosh 4R <= 4 N^2 + n, i.e.
// R <= max_R(n, N). Non-strict at the boundary.
bool check_separation(Signature sig, long N, double R);

struct TruncationReport {
  long long bound = 0;
  long terms_used = 0;
  cplx partial_value = 0.0;
  double tail_indicator = 0.0;  // magnitude sum over the outermost norm shell
};

// Partial Poincare series sum_{||gamma||^2 <= bound} of
//   det(A z + B)^l / det(C z + D)^{l+m}
// over enumerate_gamma output, accumulated shell by shell in canonical order
// so identical inputs give identical bytes.
TruncationReport truncated_poincare(Signature sig, long N, int m, int l, const DomainPoint &z,
                                    long long bound, long long cap = 10000000);

// One JSON object per element: {"level": N, "norm_sq": s, "entries": [[re, im], ...]}.
std::string to_json_lines(const std::vector<LatticeElement> &elems, long N);

} // namespace supq

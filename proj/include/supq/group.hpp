#pragma once

#include <functional>
#include <vector>

#include "supq/cmatrix.hpp"
#include "supq/rootdata.hpp"

namespace supq {

// diag(I_p, -I_q)
CMatrix signature_matrix(Signature sig);

// Certified element of SU(p,q): g* I_{p,q} g = I_{p,q} and det g = 1, both
// within 1e-10. Construct through make_group_element only.
class GroupElement {
public:
  Signature sig() const { return sig_; }
  const CMatrix &mat() const { return mat_; }

private:
  GroupElement(Signature sig, CMatrix mat) : sig_(sig), mat_(std::move(mat)) {}
  friend GroupElement make_group_element(Signature sig, CMatrix mat);

  Signature sig_;
  CMatrix mat_;
};

GroupElement make_group_element(Signature sig, CMatrix mat);

// Exact inverse I_{p,q} g* I_{p,q}; no residual accumulation.
GroupElement inverse(const GroupElement &g);
GroupElement operator*(const GroupElement &a, const GroupElement &b);

// Point of the matrix ball: z is p x q with I_q - z*z positive definite.
class DomainPoint {
public:
  DomainPoint(Signature sig, CMatrix z);
  Signature sig() const { return sig_; }
  const CMatrix &z() const { return z_; }

private:
  Signature sig_;
  CMatrix z_;
};

// Certified element of K = S(U(p) x U(q)): A, D unitary with det A det D = 1.
class KElement {
public:
  KElement(Signature sig, CMatrix a, CMatrix d);
  Signature sig() const { return sig_; }
  const CMatrix &a() const { return a_; }
  const CMatrix &d() const { return d_; }
  GroupElement embed() const;

private:
  Signature sig_;
  CMatrix a_, d_;
};

// Invertible block-diagonal pair (complexified-K component of a factorization).
struct KCElement {
  CMatrix a;  // p x p
  CMatrix d;  // q x q
};

// g = g_+ g_0 g_- with unipotent upper/lower factors and block-diagonal g_0.
struct Factorization {
  CMatrix b_plus;     // p x q, the B D^{-1} block
  KCElement k_zero;   // (A - B D^{-1} C, D)
  CMatrix c_minus;    // q x p, the D^{-1} C block
};

// Requires the lower-right q x q block invertible; the reassembled product is
// checked against the input to 1e-10 before returning.
Factorization factor(Signature sig, const CMatrix &mat);

// Moebius action z -> (Az+B)(Cz+D)^{-1}; membership of the result in the ball
// is re-certified by the DomainPoint constructor.
DomainPoint act(const GroupElement &g, const DomainPoint &z);

// (A - (g.z)C, Cz + D); cross-checked against the block-diagonal part of
// factor(g exp z) where exp z = [[I, z],[0, I]].
KCElement automorphy(const GroupElement &g, const DomainPoint &z);

// det(Cz + D)^m
cplx j_scalar(int m, const GroupElement &g, const DomainPoint &z);

using DomainFn = std::function<cplx(const DomainPoint &)>;

// Weight-m slash action: (f|g)(z) = det(Cz+D)^{-m} f(g.z).
DomainFn slash(DomainFn f, int m, const GroupElement &g);

// (f|g)(0). Evaluated both through the slash action at the origin and through
// det(D)^{-m} f(B D^{-1}); the two routes must agree to 1e-10.
cplx lift_F(const DomainFn &f, int m, const GroupElement &g);

// Block matrix [[cosh t_pp, sinh t_pq],[sinh t_qp, cosh t_qq]] where t_pq is
// the rectangular diagonal embedding of t. Entries must be finite and >= 0;
// weakly decreasing order is not required here (kak output is sorted).
GroupElement exp_Ht(Signature sig, std::span<const double> t);

struct KakResult {
  KElement k1;
  std::vector<double> t;  // t_1 >= ... >= t_q >= 0
  KElement k2;
};

// g = k1 exp_Ht(t) k2 with t the log of the top q singular values of g.
// k1, k2 are not unique when singular values coincide; reconstruction is
// asserted to 1e-9.
KakResult kak_decompose(const GroupElement &g);

} // namespace supq

#include "supq/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "supq/errors.hpp"

namespace supq {

CMatrix signature_matrix(Signature sig) {
  CMatrix m = CMatrix::identity(sig.n());
  for (int i = sig.p; i < sig.n(); ++i) m(i, i) = -1.0;
  return m;
}

GroupElement make_group_element(Signature sig, CMatrix mat) {
  const int n = sig.n();
  if (mat.rows() != n || mat.cols() != n)
    throw std::invalid_argument("make_group_element: matrix must be n x n");
  const CMatrix ipq = signature_matrix(sig);
  const double residual = max_abs(adjoint(mat) * ipq * mat - ipq);
  if (residual >= 1e-10)
    throw NotInGroupError("make_group_element: metric residual " + std::to_string(residual));
  const double det_err = std::abs(det(mat) - cplx(1.0));
  if (det_err >= 1e-10)
    throw NotInGroupError("make_group_element: |det - 1| = " + std::to_string(det_err));
  return GroupElement(sig, std::move(mat));
}

GroupElement inverse(const GroupElement &g) {
  const CMatrix ipq = signature_matrix(g.sig());
  return make_group_element(g.sig(), ipq * adjoint(g.mat()) * ipq);
}

GroupElement operator*(const GroupElement &a, const GroupElement &b) {
  if (!(a.sig() == b.sig()))
    throw std::invalid_argument("GroupElement product: signature mismatch");
  return make_group_element(a.sig(), a.mat() * b.mat());
}

DomainPoint::DomainPoint(Signature sig, CMatrix z) : sig_(sig), z_(std::move(z)) {
  if (z_.rows() != sig.p || z_.cols() != sig.q)
    throw std::invalid_argument("DomainPoint: z must be p x q");
  CMatrix gram = CMatrix::identity(sig.q) - adjoint(z_) * z_;
  if (!is_positive_definite(gram, 1e-14))
    throw std::invalid_argument("DomainPoint: I - z*z not positive definite");
}

KElement::KElement(Signature sig, CMatrix a, CMatrix d)
    : sig_(sig), a_(std::move(a)), d_(std::move(d)) {
  if (a_.rows() != sig.p || a_.cols() != sig.p || d_.rows() != sig.q || d_.cols() != sig.q)
    throw std::invalid_argument("KElement: block dimensions off");
  const double ra = max_abs(adjoint(a_) * a_ - CMatrix::identity(sig.p));
  const double rd = max_abs(adjoint(d_) * d_ - CMatrix::identity(sig.q));
  if (ra >= 1e-10 || rd >= 1e-10)
    throw NotInGroupError("KElement: unitarity residual " + std::to_string(std::max(ra, rd)));
  const double det_err = std::abs(det(a_) * det(d_) - cplx(1.0));
  if (det_err >= 1e-10)
    throw NotInGroupError("KElement: |det A det D - 1| = " + std::to_string(det_err));
}

GroupElement KElement::embed() const {
  CMatrix m = CMatrix::zero(sig_.n(), sig_.n());
  set_block(m, 0, 0, a_);
  set_block(m, sig_.p, sig_.p, d_);
  return make_group_element(sig_, std::move(m));
}

Factorization factor(Signature sig, const CMatrix &mat) {
  const int p = sig.p, q = sig.q, n = sig.n();
  if (mat.rows() != n || mat.cols() != n)
    throw std::invalid_argument("factor: matrix must be n x n");
  const CMatrix a = block(mat, 0, 0, p, p);
  const CMatrix b = block(mat, 0, p, p, q);
  const CMatrix c = block(mat, p, 0, q, p);
  const CMatrix d = block(mat, p, p, q, q);
  const CMatrix dinv = inverse(d);  // SingularError when D degenerates

  Factorization out;
  out.b_plus = b * dinv;
  out.c_minus = dinv * c;
  out.k_zero = {a - out.b_plus * c, d};

  CMatrix recon = CMatrix::zero(n, n);
  set_block(recon, 0, 0, out.k_zero.a + out.b_plus * d * out.c_minus);
  set_block(recon, 0, p, out.b_plus * d);
  set_block(recon, p, 0, d * out.c_minus);
  set_block(recon, p, p, d);
  const double residual = max_abs(recon - mat);
  if (residual >= 1e-10)
    throw Error("factor: reassembly residual " + std::to_string(residual));
  return out;
}

DomainPoint act(const GroupElement &g, const DomainPoint &z) {
  if (!(g.sig() == z.sig())) throw std::invalid_argument("act: signature mismatch");
  const Signature sig = g.sig();
  const int p = sig.p, q = sig.q;
  const CMatrix a = block(g.mat(), 0, 0, p, p);
  const CMatrix b = block(g.mat(), 0, p, p, q);
  const CMatrix c = block(g.mat(), p, 0, q, p);
  const CMatrix d = block(g.mat(), p, p, q, q);
  const CMatrix denom = c * z.z() + d;
  return DomainPoint(sig, (a * z.z() + b) * inverse(denom));
}

KCElement automorphy(const GroupElement &g, const DomainPoint &z) {
  if (!(g.sig() == z.sig())) throw std::invalid_argument("automorphy: signature mismatch");
  const Signature sig = g.sig();
  const int p = sig.p, q = sig.q, n = sig.n();
  const CMatrix a = block(g.mat(), 0, 0, p, p);
  const CMatrix c = block(g.mat(), p, 0, q, p);
  const CMatrix d = block(g.mat(), p, p, q, q);
  const DomainPoint gz = act(g, z);
  KCElement out{a - gz.z() * c, c * z.z() + d};

  // Independent route: the block-diagonal part of g exp(z).
  CMatrix exp_z = CMatrix::identity(n);
  set_block(exp_z, 0, p, z.z());
  const Factorization f = factor(sig, g.mat() * exp_z);
  const double mismatch =
      std::max(max_abs(f.k_zero.a - out.a), max_abs(f.k_zero.d - out.d));
  if (mismatch >= 1e-10)
    throw Error("automorphy: factorization cross-check residual " + std::to_string(mismatch));
  return out;
}

cplx j_scalar(int m, const GroupElement &g, const DomainPoint &z) {
  if (!(g.sig() == z.sig())) throw std::invalid_argument("j_scalar: signature mismatch");
  const Signature sig = g.sig();
  const CMatrix c = block(g.mat(), sig.p, 0, sig.q, sig.p);
  const CMatrix d = block(g.mat(), sig.p, sig.p, sig.q, sig.q);
  return std::pow(det(c * z.z() + d), static_cast<double>(m));
}

DomainFn slash(DomainFn f, int m, const GroupElement &g) {
  return [f = std::move(f), m, g](const DomainPoint &z) {
    return f(act(g, z)) / j_scalar(m, g, z);
  };
}

cplx lift_F(const DomainFn &f, int m, const GroupElement &g) {
  const Signature sig = g.sig();
  const DomainPoint origin(sig, CMatrix::zero(sig.p, sig.q));
  const cplx via_slash = slash(f, m, g)(origin);

  const Factorization fc = factor(sig, g.mat());
  const cplx via_blocks = f(DomainPoint(sig, fc.b_plus)) /
                          std::pow(det(fc.k_zero.d), static_cast<double>(m));
  const double scale = std::max({1.0, std::abs(via_slash), std::abs(via_blocks)});
  if (std::abs(via_slash - via_blocks) >= 1e-10 * scale)
    throw Error("lift_F: route disagreement " + std::to_string(std::abs(via_slash - via_blocks)));
  return via_slash;
}

GroupElement exp_Ht(Signature sig, std::span<const double> t) {
  if (static_cast<int>(t.size()) != sig.q)
    throw std::invalid_argument("exp_Ht: need q coordinates");
  for (double v : t)
    if (!(std::isfinite(v) && v >= 0.0))
      throw std::invalid_argument("exp_Ht: coordinates must be finite and nonnegative");
  const int p = sig.p, q = sig.q, n = sig.n();
  CMatrix m = CMatrix::identity(n);
  for (int r = 0; r < q; ++r) {
    m(r, r) = std::cosh(t[r]);
    m(p + r, p + r) = std::cosh(t[r]);
    m(r, p + r) = std::sinh(t[r]);
    m(p + r, r) = std::sinh(t[r]);
  }
  return make_group_element(sig, std::move(m));
}

namespace {

// [[cosh t, -sinh t],[-sinh t, cosh t]] on the embedded coordinates.
CMatrix exp_Ht_neg(Signature sig, std::span<const double> t) {
  const int p = sig.p, q = sig.q, n = sig.n();
  CMatrix m = CMatrix::identity(n);
  for (int r = 0; r < q; ++r) {
    m(r, r) = std::cosh(t[r]);
    m(p + r, p + r) = std::cosh(t[r]);
    m(r, p + r) = -std::sinh(t[r]);
    m(p + r, r) = -std::sinh(t[r]);
  }
  return m;
}

} // namespace

KakResult kak_decompose(const GroupElement &g) {
  const Signature sig = g.sig();
  const int p = sig.p, q = sig.q;

  // Polar part: g*g is Hermitian positive definite, so its SVD is an
  // eigendecomposition and X = (1/2) log(g*g) lies in the -1 eigenspace of
  // the Cartan involution, i.e. has the off-diagonal block shape.
  const CMatrix h = adjoint(g.mat()) * g.mat();
  const Svd eh = svd(h);
  CMatrix logs = CMatrix::zero(sig.n(), sig.n());
  for (int i = 0; i < sig.n(); ++i) logs(i, i) = 0.5 * std::log(eh.s[i]);
  const CMatrix x = eh.u * logs * adjoint(eh.u);
  const CMatrix y = block(x, 0, p, p, q);

  // Y = A2* t_pq D2 for k2 = diag(A2, D2): a full SVD of Y supplies both
  // factors, with t the singular values.
  Svd ys = svd_full(y);
  std::vector<double> t(ys.s);

  // Phase gauge: rotating the leading left and right singular vectors by a
  // common phase preserves Y while steering det(A2) det(D2) to 1.
  const cplx delta = det(ys.u) * det(ys.v);
  const cplx phase = std::polar(1.0, -0.5 * std::arg(delta));
  for (int r = 0; r < p; ++r) ys.u(r, 0) *= phase;
  for (int r = 0; r < q; ++r) ys.v(r, 0) *= phase;

  const KElement k2(sig, adjoint(ys.u), adjoint(ys.v));
  const CMatrix k2_mat = k2.embed().mat();
  const CMatrix k1_mat = g.mat() * adjoint(k2_mat) * exp_Ht_neg(sig, t);
  const KElement k1(sig, block(k1_mat, 0, 0, p, p), block(k1_mat, p, p, q, q));

  const CMatrix recon = k1.embed().mat() * exp_Ht(sig, t).mat() * k2_mat;
  const double residual = max_abs(recon - g.mat());
  if (residual >= 1e-9)
    throw Error("kak_decompose: reconstruction residual " + std::to_string(residual));
  return {k1, std::move(t), k2};
}

} // namespace supq

#include "supq/cmatrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "supq/errors.hpp"

namespace supq {

namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMat to_eigen(const CMatrix &a) {
  return Eigen::Map<const EMat>(a.data().data(), a.rows(), a.cols());
}

CMatrix from_eigen(const EMat &m) {
  CMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  Eigen::Map<EMat>(out.data().data(), m.rows(), m.cols()) = m;
  return out;
}

// In-place LU with partial pivoting. Returns the pivot permutation sign and
// leaves U on and above the diagonal. Records the largest row scale of the
// input for the singularity threshold.
struct Lu {
  CMatrix lu;
  std::vector<int> perm;
  int sign = 1;
  double row_scale = 0.0;
};

Lu lu_decompose(const CMatrix &a) {
  const int n = a.rows();
  Lu f{a, {}, 1, 0.0};
  f.perm.resize(n);
  for (int r = 0; r < n; ++r) {
    f.perm[r] = r;
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += std::abs(a(r, c));
    f.row_scale = std::max(f.row_scale, s);
  }
  CMatrix &m = f.lu;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m(k, k));
    for (int r = k + 1; r < n; ++r) {
      double v = std::abs(m(r, k));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    if (best == 0.0) continue;  // exactly singular; det handles it, inverse throws
    const cplx d = m(k, k);
    for (int r = k + 1; r < n; ++r) {
      const cplx l = m(r, k) / d;
      m(r, k) = l;
      for (int c = k + 1; c < n; ++c) m(r, c) -= l * m(k, c);
    }
  }
  return f;
}

} // namespace

CMatrix::CMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("CMatrix: negative dimension");
  a_.assign(static_cast<std::size_t>(rows) * cols, cplx(0.0, 0.0));
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix mul(const CMatrix &a, const CMatrix &b) {
  if (a.cols() != b.rows())
    throw DimensionError("mul: inner dimensions disagree");
  CMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CMatrix operator*(const CMatrix &a, const CMatrix &b) { return mul(a, b); }

CMatrix operator+(const CMatrix &a, const CMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("operator+: shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

CMatrix operator-(const CMatrix &a, const CMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("operator-: shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

CMatrix operator*(cplx s, const CMatrix &a) {
  CMatrix out = a;
  for (auto &v : out.data()) v *= s;
  return out;
}

CMatrix adjoint(const CMatrix &a) {
  CMatrix out(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

cplx det(const CMatrix &a) {
  if (a.rows() != a.cols()) throw DimensionError("det: matrix not square");
  if (a.rows() == 0) return 1.0;
  Lu f = lu_decompose(a);
  cplx d = static_cast<double>(f.sign);
  for (int k = 0; k < a.rows(); ++k) d *= f.lu(k, k);
  return d;
}

CMatrix inverse(const CMatrix &a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse: matrix not square");
  const int n = a.rows();
  Lu f = lu_decompose(a);
  const double thresh = 1e-14 * f.row_scale;
  for (int k = 0; k < n; ++k)
    if (std::abs(f.lu(k, k)) < thresh || f.lu(k, k) == cplx(0.0, 0.0))
      throw SingularError("inverse: pivot below threshold");
  CMatrix inv(n, n);
  // Solve A x = e_j column by column through the stored factors.
  std::vector<cplx> y(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) y[i] = (f.perm[i] == j) ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < i; ++k) y[i] -= f.lu(i, k) * y[k];
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) y[i] -= f.lu(i, k) * y[k];
      y[i] /= f.lu(i, i);
    }
    for (int i = 0; i < n; ++i) inv(i, j) = y[i];
  }
  return inv;
}

double frob_norm_sq(const CMatrix &a) {
  double s = 0.0;
  for (const auto &v : a.data()) s += std::norm(v);
  return s;
}

double max_abs(const CMatrix &a) {
  double s = 0.0;
  for (const auto &v : a.data()) s = std::max(s, std::abs(v));
  return s;
}

namespace {

Svd svd_impl(const CMatrix &a, unsigned options) {
  Eigen::JacobiSVD<EMat> dec(to_eigen(a), options);
  if (dec.info() != Eigen::Success)
    throw ConvergenceError("svd: decomposition did not converge");
  Svd out;
  out.u = from_eigen(dec.matrixU());
  out.v = from_eigen(dec.matrixV());
  const auto &sv = dec.singularValues();
  out.s.assign(sv.data(), sv.data() + sv.size());
  return out;
}

} // namespace

Svd svd(const CMatrix &a) {
  return svd_impl(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Svd svd_full(const CMatrix &a) {
  return svd_impl(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

bool is_positive_definite(const CMatrix &a, double tol) {
  if (a.rows() != a.cols()) throw DimensionError("is_positive_definite: not square");
  const int n = a.rows();
  const double herm_tol = 1e-10 * (1.0 + max_abs(a));
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c)
      if (std::abs(a(r, c) - std::conj(a(c, r))) > herm_tol) return false;
  // Cholesky sweep; every pivot must clear tol.
  CMatrix m = a;
  for (int k = 0; k < n; ++k) {
    double piv = m(k, k).real();
    if (!(piv > tol)) return false;
    double root = std::sqrt(piv);
    m(k, k) = root;
    for (int r = k + 1; r < n; ++r) m(r, k) /= root;
    for (int j = k + 1; j < n; ++j)
      for (int r = j; r < n; ++r) m(r, j) -= m(r, k) * std::conj(m(j, k));
  }
  return true;
}

CMatrix qr_unitary(const CMatrix &a) {
  if (a.rows() != a.cols()) throw DimensionError("qr_unitary: matrix not square");
  const int n = a.rows();
  // Householder triangularization, accumulating Q explicitly.
  CMatrix r = a;
  CMatrix q = CMatrix::identity(n);
  std::vector<cplx> v(n);
  for (int k = 0; k < n - 1; ++k) {
    double norm = 0.0;
    for (int i = k; i < n; ++i) norm += std::norm(r(i, k));
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    cplx x0 = r(k, k);
    cplx phase = (x0 == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : x0 / std::abs(x0);
    cplx alpha = -phase * norm;
    double vnorm_sq = 0.0;
    for (int i = k; i < n; ++i) {
      v[i] = r(i, k) - ((i == k) ? alpha : cplx(0.0, 0.0));
      vnorm_sq += std::norm(v[i]);
    }
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;
    for (int j = k; j < n; ++j) {
      cplx dot = 0.0;
      for (int i = k; i < n; ++i) dot += std::conj(v[i]) * r(i, j);
      dot *= beta;
      for (int i = k; i < n; ++i) r(i, j) -= v[i] * dot;
    }
    // accumulate q <- q * H with H = I - beta v v*
    for (int j = 0; j < n; ++j) {
      cplx dot = 0.0;
      for (int i = k; i < n; ++i) dot += q(j, i) * v[i];
      dot *= beta;
      for (int i = k; i < n; ++i) q(j, i) -= dot * std::conj(v[i]);
    }
  }
  // Phase fix: make the R diagonal real positive by absorbing its phases
  // into the columns of Q.
  for (int k = 0; k < n; ++k) {
    cplx d = r(k, k);
    cplx phase = (d == cplx(0.0, 0.0)) ? cplx(1.0, 0.0) : d / std::abs(d);
    for (int i = 0; i < n; ++i) q(i, k) *= phase;
  }
  return q;
}

CMatrix block(const CMatrix &a, int r0, int c0, int nrows, int ncols) {
  if (r0 < 0 || c0 < 0 || r0 + nrows > a.rows() || c0 + ncols > a.cols())
    throw DimensionError("block: out of range");
  CMatrix out(nrows, ncols);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c) out(r, c) = a(r0 + r, c0 + c);
  return out;
}

void set_block(CMatrix &a, int r0, int c0, const CMatrix &b) {
  if (r0 < 0 || c0 < 0 || r0 + b.rows() > a.rows() || c0 + b.cols() > a.cols())
    throw DimensionError("set_block: out of range");
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c) a(r0 + r, c0 + c) = b(r, c);
}

} // namespace supq

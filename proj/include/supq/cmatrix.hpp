#pragma once

#include <complex>
#include <vector>

namespace supq {

using cplx = std::complex<double>;

// Dense complex matrix, row-major storage.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(int rows, int cols);

  static CMatrix identity(int n);
  static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx &operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cplx &operator()(int r, int c) const {
    return a_[static_cast<std::size_t>(r) * cols_ + c];
  }

  const std::vector<cplx> &data() const { return a_; }
  std::vector<cplx> &data() { return a_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

CMatrix mul(const CMatrix &a, const CMatrix &b);
CMatrix operator*(const CMatrix &a, const CMatrix &b);
CMatrix operator+(const CMatrix &a, const CMatrix &b);
CMatrix operator-(const CMatrix &a, const CMatrix &b);
CMatrix operator*(cplx s, const CMatrix &a);

CMatrix adjoint(const CMatrix &a);

// LU with partial pivoting; relative error <= 1e-12 for well-conditioned
// inputs up to n = 12.
cplx det(const CMatrix &a);

// Throws SingularError when a pivot falls below 1e-14 times the largest row
// scale of the input.
CMatrix inverse(const CMatrix &a);

double frob_norm_sq(const CMatrix &a);
double max_abs(const CMatrix &a);

struct Svd {
  CMatrix u;              // rows x k, unitary columns
  std::vector<double> s;  // descending, k = min(rows, cols)
  CMatrix v;              // cols x k; a = u * diag(s) * adjoint(v)
};

Svd svd(const CMatrix &a);

// Same with square u (rows x rows) and v (cols x cols); s keeps min(rows, cols)
// entries.
Svd svd_full(const CMatrix &a);

// Hermitian check followed by a Cholesky sweep; true iff every pivot
// exceeds tol.
bool is_positive_definite(const CMatrix &a, double tol);

// Unitary factor of the QR decomposition of a square matrix, with the phase
// convention that the R diagonal is real and positive. This makes the map
// Gaussian -> Q distribute by Haar measure.
CMatrix qr_unitary(const CMatrix &a);

CMatrix block(const CMatrix &a, int r0, int c0, int nrows, int ncols);
void set_block(CMatrix &a, int r0, int c0, const CMatrix &b);

} // namespace supq

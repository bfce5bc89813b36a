#include <doctest.h>

#include <cmath>

#include "supq/cmatrix.hpp"
#include "supq/errors.hpp"
#include "supq/rng.hpp"

using namespace supq;

namespace {

CMatrix random_matrix(int rows, int cols, Rng &rng) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian_complex();
  return m;
}

// Independent determinant oracle: cofactor expansion along the first row.
cplx cofactor_det(const CMatrix &a) {
  const int n = a.rows();
  if (n == 1) return a(0, 0);
  cplx sum = 0.0;
  for (int j = 0; j < n; ++j) {
    CMatrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = a(r, c);
      }
    }
    cplx term = a(0, j) * cofactor_det(minor);
    sum += (j % 2 == 0) ? term : -term;
  }
  return sum;
}

} // namespace

TEST_CASE("product against hand-computed values") {
  CMatrix a(2, 2), b(2, 2);
  a(0, 0) = {1, 2};
  a(0, 1) = {0, -1};
  a(1, 0) = {3, 0};
  a(1, 1) = {2, 2};
  b(0, 0) = {0, 1};
  b(0, 1) = {1, 0};
  b(1, 0) = {2, 0};
  b(1, 1) = {0, -2};
  CMatrix c = a * b;
  CHECK(c(0, 0) == cplx(-2, -1));  // (1+2i)i + (-i)(2)
  CHECK(c(0, 1) == cplx(-1, 2));   // (1+2i) + (-i)(-2i)
  CHECK(c(1, 0) == cplx(4, 7));
  CHECK(c(1, 1) == cplx(7, -4));
  CHECK_THROWS_AS(mul(CMatrix(2, 3), CMatrix(2, 3)), DimensionError);
}

TEST_CASE("adjoint reverses products") {
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 6);
    CMatrix a = random_matrix(n, n, rng);
    CMatrix b = random_matrix(n, n, rng);
    CMatrix lhs = adjoint(a * b);
    CMatrix rhs = adjoint(b) * adjoint(a);
    CHECK(max_abs(lhs - rhs) < 1e-13 * (1.0 + max_abs(lhs)));
  }
}

TEST_CASE("determinant matches cofactor expansion up to 4x4") {
  Rng rng(12);
  for (int it = 0; it < 1000; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 4);
    CMatrix a = random_matrix(n, n, rng);
    cplx d1 = det(a);
    cplx d2 = cofactor_det(a);
    CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + std::abs(d2)));
  }
  CMatrix ii(2, 2);
  ii(0, 0) = {0, 1};
  ii(1, 1) = {0, 1};
  CHECK(std::abs(det(ii) - cplx(-1, 0)) < 1e-15);
}

TEST_CASE("determinant is multiplicative") {
  Rng rng(13);
  for (int it = 0; it < 300; ++it) {
    int n = 2 + static_cast<int>(rng.uniform() * 11);  // up to 12
    CMatrix a = random_matrix(n, n, rng);
    CMatrix b = random_matrix(n, n, rng);
    cplx lhs = det(a * b);
    cplx rhs = det(a) * det(b);
    CHECK(std::abs(lhs - rhs) < 1e-11 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("inverse round trip and singular detection") {
  Rng rng(14);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 8);
    CMatrix a = random_matrix(n, n, rng);
    CMatrix r = a * inverse(a) - CMatrix::identity(n);
    CHECK(max_abs(r) < 1e-10);
  }
  // Rank-deficient: duplicate a row.
  CMatrix s = random_matrix(3, 3, rng);
  for (int c = 0; c < 3; ++c) s(2, c) = s(0, c);
  CHECK_THROWS_AS(inverse(s), SingularError);
}

TEST_CASE("frobenius norm equals trace of a* a") {
  Rng rng(15);
  for (int it = 0; it < 100; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 6);
    int m = 1 + static_cast<int>(rng.uniform() * 6);
    CMatrix a = random_matrix(n, m, rng);
    CMatrix g = adjoint(a) * a;
    double tr = 0.0;
    for (int i = 0; i < m; ++i) tr += g(i, i).real();
    CHECK(frob_norm_sq(a) == doctest::Approx(tr).epsilon(1e-12));
  }
}

TEST_CASE("svd reconstructs and orders singular values") {
  Rng rng(16);
  for (int it = 0; it < 1000; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 8);
    int m = 1 + static_cast<int>(rng.uniform() * 8);
    CMatrix a = random_matrix(n, m, rng);
    Svd f = svd(a);
    const int k = static_cast<int>(f.s.size());
    REQUIRE(k == std::min(n, m));
    for (int i = 0; i + 1 < k; ++i) CHECK(f.s[i] >= f.s[i + 1]);
    CMatrix sd(k, k);
    for (int i = 0; i < k; ++i) sd(i, i) = f.s[i];
    CMatrix recon = f.u * sd * adjoint(f.v);
    CHECK(max_abs(recon - a) < 1e-10);
  }
}

TEST_CASE("positive definiteness via cholesky pivots") {
  Rng rng(17);
  for (int it = 0; it < 100; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 5);
    CMatrix a = random_matrix(n, n, rng);
    CMatrix g = adjoint(a) * a + CMatrix::identity(n);
    CHECK(is_positive_definite(g, 1e-12));
    CMatrix neg = cplx(-1.0, 0.0) * g;
    CHECK_FALSE(is_positive_definite(neg, 1e-12));
  }
  CMatrix nh(2, 2);
  nh(0, 0) = 1.0;
  nh(0, 1) = {0.0, 0.5};
  nh(1, 0) = {0.0, 0.5};  // equal, not conjugate: not Hermitian
  nh(1, 1) = 1.0;
  CHECK_FALSE(is_positive_definite(nh, 1e-12));
}

TEST_CASE("qr_unitary gives a unitary factor with positive real R diagonal") {
  Rng rng(18);
  for (int it = 0; it < 300; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 8);
    CMatrix a = random_matrix(n, n, rng);
    CMatrix q = qr_unitary(a);
    CHECK(max_abs(adjoint(q) * q - CMatrix::identity(n)) < 1e-12);
    CMatrix r = adjoint(q) * a;
    for (int i = 0; i < n; ++i) {
      CHECK(r(i, i).real() > 0.0);
      CHECK(std::abs(r(i, i).imag()) < 1e-10 * (1.0 + std::abs(r(i, i))));
      for (int j = 0; j < i; ++j) CHECK(std::abs(r(i, j)) < 1e-10);
    }
  }
}

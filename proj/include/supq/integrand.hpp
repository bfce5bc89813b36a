#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "supq/cmatrix.hpp"
#include "supq/group.hpp"
#include "supq/rng.hpp"
#include "supq/rootdata.hpp"

namespace supq {

// The determinant-power character weight; m >= 2n - 1 keeps the mass
// integrals finite.
struct WeightSpec {
  Signature sig;
  int m;
  WeightSpec(Signature sig_, int m_);
};

struct ConstantPoly {
  cplx c = 1.0;
};

// (det z)^l; evaluation requires square z (p = q).
struct DetPower {
  int l = 0;
};

struct MonomialTerm {
  std::vector<std::vector<int>> exps;  // row r, column s exponent of z(r,s)
  cplx coeff;
};

struct MonomialSum {
  std::vector<MonomialTerm> terms;
};

using PolySpec = std::variant<ConstantPoly, DetPower, MonomialSum>;

cplx eval_poly(const PolySpec &f, const CMatrix &z);
bool poly_is_zero(const PolySpec &f);

// Text forms: "det^l" (or "det"), "const re[,im]",
// "sum: c * z[r][s]^e ... + c * ..." with 1-based indices, terms joined by
// '+', coefficients as re[,im]. parse(to_string(f)) reproduces f.
PolySpec parse_poly(const std::string &text);
std::string to_string(const PolySpec &f);

// Deterministic source of Haar draws; a fixed seed fixes the whole stream.
struct HaarSampler {
  explicit HaarSampler(std::uint64_t seed) : rng(seed) {}
  Rng rng;
};

// Haar on S(U(p) x U(q)): independent Haar unitary blocks, then the last
// column of D rephased so det A det D = 1.
KElement haar_sample_K(Signature sig, HaarSampler &sampler);

// Integrand of the mass ratio at radial coordinate x and compact twist k:
//   prod_r (1 - x_r)^{m/2} * |f(A sqrt(x)_{p x q} D*)|.
double phi(const WeightSpec &w, const PolySpec &f, const KElement &k, const XVector &x);

struct KAvg {
  double value = 0.0;
  double std_err = 0.0;  // zero on the closed-form paths
};

struct KAvgConfig {
  long samples = 100000;
  std::uint64_t seed = 0xA111;
};

// Average of phi over Haar-random k. Constant and DetPower collapse to closed
// forms (the character has modulus one); MonomialSum falls back to Monte
// Carlo with a standard-error estimate.
KAvg phi_k_avg(const WeightSpec &w, const PolySpec &f, const XVector &x,
               const KAvgConfig &cfg = {});

namespace detail {
// Monte Carlo path regardless of variant; lets tests confront the closed
// forms with sampling.
KAvg phi_k_avg_mc(const WeightSpec &w, const PolySpec &f, const XVector &x,
                  const KAvgConfig &cfg);
}

// Convenience overloads of the weight-m twisted pullback for parsed
// polynomials; p = q and a DetPower / MonomialSum f evaluated on domain
// points.
DomainFn slash(const PolySpec &f, int m, const GroupElement &g);
cplx lift_F(const PolySpec &f, int m, const GroupElement &g);

} // namespace supq

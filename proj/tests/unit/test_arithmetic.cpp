#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "supq/arithmetic.hpp"
#include "supq/errors.hpp"
#include "supq/group.hpp"
#include "supq/integrand.hpp"
#include "supq/rootdata.hpp"

using namespace supq;

namespace {

long as_long(const BigInt &v) { return v.convert_to<long>(); }

// (a, b) of a (1,1) normal-form element, flattened for set comparison.
std::tuple<long, long, long, long> key_11(const LatticeElement &e) {
  return {as_long(e.at(0, 0).re), as_long(e.at(0, 0).im), as_long(e.at(0, 1).re),
          as_long(e.at(0, 1).im)};
}

bool same_elements(const std::vector<LatticeElement> &va, const std::vector<LatticeElement> &vb) {
  if (va.size() != vb.size()) return false;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i].norm_sq != vb[i].norm_sq) return false;
    if (!(va[i].entries == vb[i].entries)) return false;
  }
  return true;
}

cplx poincare_value(long N, int m, int l, cplx z, long long bound) {
  const Signature sig{1, 1};
  CMatrix zm(1, 1);
  zm(0, 0) = z;
  return truncated_poincare(sig, N, m, l, DomainPoint(sig, zm), bound).partial_value;
}

}  // namespace

TEST_CASE("gaussian integer arithmetic") {
  const GaussInt a(3, -2), b(-1, 4);
  CHECK(a + b == GaussInt(2, 2));
  CHECK(a - b == GaussInt(4, -6));
  // (3 - 2i)(-1 + 4i) = -3 + 12i + 2i + 8 = 5 + 14i
  CHECK(a * b == GaussInt(5, 14));
  CHECK(a.conj() == GaussInt(3, 2));
  CHECK(a.norm() == 13);
  CHECK((a * a.conj()).im == 0);
  CHECK(GaussInt(0, 0).is_zero());
  CHECK_FALSE(a.is_zero());
  CHECK(GaussInt(6, -9).divisible_by(3));
  CHECK_FALSE(GaussInt(6, -8).divisible_by(3));
}

TEST_CASE("small ball enumeration counts") {
  const Signature sig{1, 1};

  // Level 3: identity alone below the gap, the first shell exactly at it.
  const auto tight = enumerate_gamma(sig, 3, 37);
  REQUIRE(tight.size() == 1);
  CHECK(in_k(tight[0]));
  CHECK(tight[0].norm_sq == 2);
  CHECK(tight[0].at(0, 0) == GaussInt(1, 0));
  CHECK(tight[0].at(0, 1).is_zero());

  const auto shell = enumerate_gamma(sig, 3, 38);
  CHECK(shell.size() == 9);
  long off = 0;
  for (const auto &e : shell) {
    CHECK(check_relations(e));
    if (!in_k(e)) {
      ++off;
      CHECK(e.norm_sq == 38);
    }
  }
  CHECK(off == 8);

  // Level 5: gap bound 102 is attained.
  CHECK(enumerate_gamma(sig, 5, 101).size() == 1);
  const auto l5 = enumerate_gamma(sig, 5, 102);
  CHECK(l5.size() == 9);

  // Level 1: four torus elements plus sixteen at the minimal off-K norm 6.
  const auto l1 = enumerate_gamma(sig, 1, 6);
  CHECK(l1.size() == 20);
  long in = 0;
  for (const auto &e : l1)
    if (in_k(e)) {
      ++in;
      CHECK(e.norm_sq == 2);
    } else {
      CHECK(e.norm_sq == 6);
    }
  CHECK(in == 4);

  // Norms nondecreasing in canonical order.
  for (std::size_t i = 1; i < l1.size(); ++i) CHECK(l1[i - 1].norm_sq <= l1[i].norm_sq);

  CHECK_THROWS_AS(enumerate_gamma(sig, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_gamma(sig, 3, 1), std::invalid_argument);
}

TEST_CASE("enumeration matches a direct lattice scan") {
  // Independent oracle: walk every congruent (a, b) in a box and keep the
  // determinant-one pairs. Compared as sets against the library output.
  const long N = 3;
  const long long bound = 40;
  std::vector<std::tuple<long, long, long, long>> want;
  for (long ar = -8; ar <= 8; ++ar)
    for (long ai = -8; ai <= 8; ++ai) {
      if ((ar - 1) % N != 0 || ai % N != 0) continue;
      for (long br = -8; br <= 8; ++br)
        for (long bi = -8; bi <= 8; ++bi) {
          if (br % N != 0 || bi % N != 0) continue;
          const long long na = ar * ar + ai * ai, nb = br * br + bi * bi;
          if (na - nb != 1) continue;
          if (2 * (na + nb) > bound) continue;
          want.emplace_back(ar, ai, br, bi);
        }
    }
  std::sort(want.begin(), want.end());

  std::vector<std::tuple<long, long, long, long>> got;
  for (const auto &e : enumerate_gamma(Signature{1, 1}, N, bound)) got.push_back(key_11(e));
  std::sort(got.begin(), got.end());
  CHECK(want.size() == 9);
  CHECK(got == want);
}

TEST_CASE("backtracking agrees with the normal form") {
  const Signature sig{1, 1};
  for (const auto &[N, bound] : {std::pair<long, long long>{1, 60},
                                 {3, 150},
                                 {5, 102}}) {
    const auto fast = enumerate_gamma(sig, N, bound);
    const auto slow = detail::enumerate_backtracking(sig, N, bound, 10000000);
    CHECK(same_elements(fast, slow));
  }

  // A genuinely higher-rank instance: (2,2) at level 2. Inside norm 4 the
  // group meets only its sign torus diag(s1..s4), s_i = +-1 with product 1.
  const auto torus22 = enumerate_gamma(Signature{2, 2}, 2, 4);
  REQUIRE(torus22.size() == 8);
  long identity_hits = 0;
  for (const auto &e : torus22) {
    CHECK(in_k(e));
    CHECK(e.norm_sq == 4);
    CHECK(check_relations(e));
    long long prod = 1;
    bool diag = true;
    for (int r = 0; r < 4 && diag; ++r)
      for (int c = 0; c < 4 && diag; ++c)
        if (r == c) {
          CHECK(e.at(r, c).im == 0);
          prod *= as_long(e.at(r, c).re);
        } else {
          diag = e.at(r, c).is_zero();
        }
    CHECK(diag);
    CHECK(prod == 1);
    bool is_id = true;
    for (int r = 0; r < 4 && is_id; ++r) is_id = (e.at(r, r) == GaussInt(1, 0));
    identity_hits += is_id ? 1 : 0;
  }
  CHECK(identity_hits == 1);

  CHECK_THROWS_AS(detail::enumerate_backtracking(sig, 3, 38, 2), CapError);
}

TEST_CASE("norm gap certificates") {
  const Signature sig{1, 1};

  const auto r1 = check_norm_gap(sig, 1, enumerate_gamma(sig, 1, 30));
  CHECK(r1.holds);
  CHECK(r1.gap_bound == 6);
  CHECK(r1.min_off_k_norm == 6);
  CHECK(r1.in_k == 4);

  const auto r3 = check_norm_gap(sig, 3, enumerate_gamma(sig, 3, 38));
  CHECK(r3.holds);
  CHECK(r3.gap_bound == 38);
  CHECK(r3.min_off_k_norm == 38);
  CHECK(r3.total == 9);
  CHECK(r3.off_k == 8);

  // Planted violation: a non-diagonal element below the bound must throw.
  LatticeElement fake;
  fake.sig = sig;
  fake.entries = {GaussInt(1, 0), GaussInt(1, 0), GaussInt(1, 0), GaussInt(1, 0)};
  fake.norm_sq = 4;
  CHECK_THROWS_AS(check_norm_gap(sig, 3, {fake}), Error);
}

TEST_CASE("double chamber sampling stays inside the norm bound") {
  for (const Signature sig : {Signature{1, 1}, Signature{2, 1}}) {
    const int n = sig.n();
    for (const double R : {0.1, 1.0}) {
      HaarSampler sampler(2026);
      const double cap = n * std::cosh(4.0 * R);
      double worst = 0.0;
      for (const GroupElement &g : sample_KSK(sig, R, 2000, sampler)) {
        const double ns = frob_norm_sq(g.mat());
        worst = std::max(worst, ns);
        CHECK(ns < cap);
      }
      CHECK(worst > static_cast<double>(n));  // sampler actually leaves K
    }

    // Tiny radius collapses onto K, where the norm is exactly n.
    HaarSampler tiny(7);
    for (const GroupElement &g : sample_KSK(sig, 1e-9, 50, tiny))
      CHECK(std::abs(frob_norm_sq(g.mat()) - n) <= 1e-9);

    HaarSampler s1(99), s2(99);
    const auto a = sample_KSK(sig, 0.7, 25, s1);
    const auto b = sample_KSK(sig, 0.7, 25, s2);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(frob_norm_sq(a[i].mat()) == frob_norm_sq(b[i].mat()));
  }
}

TEST_CASE("separation radius test") {
  const Signature sig{1, 1};
  const double rmax = max_R(2, 3);
  CHECK(check_separation(sig, 3, rmax));
  CHECK(check_separation(sig, 3, rmax - 1e-9));
  CHECK_FALSE(check_separation(sig, 3, rmax + 1e-6));
  CHECK(check_separation(sig, 55, 2.0));  // large level, generous radius
  CHECK_FALSE(check_separation(sig, 3, 2.0));
  CHECK_THROWS_AS(check_separation(sig, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(check_separation(sig, 3, 0.0), std::invalid_argument);

  // Consistency with the sampler: at the critical radius every double-chamber
  // product stays strictly below the first lattice shell.
  HaarSampler sampler(12);
  for (const GroupElement &g : sample_KSK(sig, rmax, 10000, sampler))
    CHECK(frob_norm_sq(g.mat()) < 38.0);
}

TEST_CASE("truncated series partial sums") {
  const Signature sig{1, 1};
  CMatrix z0(1, 1);
  z0(0, 0) = 0.0;
  const DomainPoint origin(sig, z0);

  // Identity-only truncation.
  const auto id = truncated_poincare(sig, 3, 4, 0, origin, 2);
  CHECK(id.terms_used == 1);
  CHECK(id.partial_value == cplx(1.0));
  CHECK(id.tail_indicator == 1.0);
  CHECK(id.bound == 2);

  // Determinant factor passes through: at the identity the l = 1 term is z.
  CMatrix zc(1, 1);
  zc(0, 0) = cplx(0.3, -0.2);
  const auto tw = truncated_poincare(sig, 3, 4, 1, DomainPoint(sig, zc), 2);
  CHECK(std::abs(tw.partial_value - cplx(0.3, -0.2)) < 1e-15);

  // Frozen reference values for the level-3 weight-4 series at the origin,
  // computed with an independent high-precision summation.
  CHECK(std::abs(poincare_value(3, 4, 0, 0.0, 400) - cplx(1.0282925512144954)) < 1e-12);
  CHECK(std::abs(poincare_value(3, 4, 0, 0.0, 12800) - cplx(1.0283563572458540)) < 1e-12);

  // Tail indicator at bound 38 is the whole first shell: 8 terms of equal
  // magnitude 1/|a|^4 = 1/100.
  const auto sh = truncated_poincare(sig, 3, 4, 0, origin, 38);
  CHECK(sh.terms_used == 9);
  CHECK(std::abs(sh.tail_indicator - 0.08) < 1e-15);

  CHECK_THROWS_AS(truncated_poincare(Signature{2, 1}, 3, 4, 0,
                                     DomainPoint(Signature{2, 1}, CMatrix::zero(2, 1)), 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(truncated_poincare(sig, 2, 4, 0, origin, 10), std::invalid_argument);
  CHECK_THROWS_AS(truncated_poincare(sig, 3, 0, 0, origin, 10), std::invalid_argument);
  CHECK_THROWS_AS(truncated_poincare(sig, 3, 4, -1, origin, 10), std::invalid_argument);
  CHECK_THROWS_AS(truncated_poincare(sig, 3, 4, 0, DomainPoint(sig, zc), 38, 2), CapError);
}

TEST_CASE("partial sum differences shrink under bound doubling") {
  // Window chosen so the shell pattern cooperates; doubling differences are
  // not monotone from every anchor because shells enter in bursts.
  const long long bounds[] = {800, 1600, 3200, 6400, 12800};
  double prev_diff = -1.0;
  cplx prev = poincare_value(3, 4, 0, 0.0, bounds[0]);
  for (int i = 1; i < 5; ++i) {
    const cplx cur = poincare_value(3, 4, 0, 0.0, bounds[i]);
    const double diff = std::abs(cur - prev);
    if (prev_diff >= 0.0) CHECK(diff < prev_diff);
    prev_diff = diff;
    prev = cur;
  }
  CHECK(prev_diff < 1e-7);  // last window is genuinely deep in the tail
}

TEST_CASE("slash equivariance mismatch shrinks with the bound") {
  // gamma0 = [[1+3i, 3], [3, 1-3i]], the canonical first-shell element at
  // level 3. The truncated sum is not invariant, but the defect is carried
  // by boundary shells and fades as the ball grows.
  const cplx a0(1.0, 3.0), b0(3.0, 0.0);
  const cplx z = 0.0;
  const cplx gz = (a0 * z + b0) / (std::conj(b0) * z + std::conj(a0));
  const cplx den = std::conj(b0) * z + std::conj(a0);
  const cplx twist = 1.0 / (den * den * den * den);

  auto mismatch = [&](long long bound) {
    return std::abs(twist * poincare_value(3, 4, 0, gz, bound) -
                    poincare_value(3, 4, 0, z, bound));
  };
  const double at800 = mismatch(800);
  const double at1600 = mismatch(1600);
  CHECK(at1600 < 0.5 * at800);
}

TEST_CASE("element export as json lines") {
  const auto l1 = enumerate_gamma(Signature{1, 1}, 1, 2);
  REQUIRE(l1.size() == 4);
  const std::string text = to_json_lines(l1, 1);

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    REQUIRE(nl != std::string::npos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "{\"level\": 1, \"norm_sq\": 2, \"entries\": [[[-1, 0], [0, 0]], [[0, 0], [-1, 0]]]}");
  for (const auto &line : lines) {
    CHECK(line.find("\"level\": 1") != std::string::npos);
    CHECK(line.find("\"norm_sq\": 2") != std::string::npos);
  }
}

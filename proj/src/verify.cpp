#include "supq/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supq/arithmetic.hpp"
#include "supq/cmatrix.hpp"
#include "supq/errors.hpp"
#include "supq/group.hpp"
#include "supq/integrand.hpp"
#include "supq/quadrature.hpp"
#include "supq/rng.hpp"
#include "supq/rootdata.hpp"

namespace supq {

namespace {

constexpr std::size_t kMaxRecordedFailures = 12;

struct Checker {
  SuiteReport rep;

  void check(bool ok, const std::string &what) {
    if (ok) {
      ++rep.passed;
      return;
    }
    ++rep.failed;
    if (rep.failures.size() < kMaxRecordedFailures) rep.failures.push_back(what);
  }
};

std::vector<double> random_chamber(Rng &rng, int q, double tmax) {
  std::vector<double> t(static_cast<std::size_t>(q));
  double acc = 0.0;
  for (int i = q - 1; i >= 0; --i) {
    acc += rng.uniform(0.05, tmax / q);
    t[static_cast<std::size_t>(i)] = acc;
  }
  return t;
}

std::vector<double> random_x(Rng &rng, int q) {
  std::vector<double> x(static_cast<std::size_t>(q));
  for (auto &v : x) v = rng.uniform(0.02, 0.98);
  std::sort(x.begin(), x.end(), std::greater<double>());
  // nudge apart in the unlikely event of a tie; XVector rejects them exactly
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] >= x[i - 1]) x[i] = x[i - 1] * 0.999;
  return x;
}

CMatrix gaussian_matrix(Rng &rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian_complex();
  return m;
}

KElement random_k(Rng &rng, Signature sig) {
  CMatrix a = qr_unitary(gaussian_matrix(rng, sig.p, sig.p));
  CMatrix d = qr_unitary(gaussian_matrix(rng, sig.q, sig.q));
  const cplx fix = 1.0 / (det(a) * det(d));
  for (int r = 0; r < sig.q; ++r) d(r, sig.q - 1) *= fix;
  return KElement(sig, std::move(a), std::move(d));
}

GroupElement random_g(Rng &rng, Signature sig, double tmax) {
  const auto t = random_chamber(rng, sig.q, tmax);
  return random_k(rng, sig).embed() * exp_Ht(sig, t) * random_k(rng, sig).embed();
}

DomainPoint random_z(Rng &rng, Signature sig) {
  CMatrix z = gaussian_matrix(rng, sig.p, sig.q);
  // scale well inside the ball so Moebius images stay numerically comfortable
  const double s = 0.35 / std::max(1.0, std::sqrt(frob_norm_sq(z)));
  for (int r = 0; r < sig.p; ++r)
    for (int c = 0; c < sig.q; ++c) z(r, c) *= s * rng.uniform(0.2, 1.0);
  return DomainPoint(sig, std::move(z));
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SuiteReport suite_rootdata(std::uint64_t seed) {
  Checker c;
  c.rep.suite = "rootdata";
  Rng rng(seed);

  const Signature sigs[] = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {4, 4}};
  for (const Signature sig : sigs) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const ChamberVector t(random_chamber(rng, sig.q, 2.5));
      worst = std::max(worst, cov_identity_residual(sig, t));
    }
    c.check(worst < 1e-12,
            "cov identity residual " + std::to_string(worst) + " at (" + std::to_string(sig.p) +
                "," + std::to_string(sig.q) + ")");
  }

  // artanh sqrt(nu) against the arcosh form of the critical radius.
  double worst_rad = 0.0;
  for (int n = 1; n <= 10; ++n)
    for (int N = 1; N <= 100; ++N) {
      const double lhs = std::atanh(std::sqrt(nu(n, N)));
      const double rhs = 0.25 * std::acosh(1.0 + 4.0 * double(N) * N / n);
      worst_rad = std::max(worst_rad, std::abs(lhs - rhs));
      worst_rad = std::max(worst_rad, std::abs(max_R(n, N) - rhs));
    }
  c.check(worst_rad < 1e-12, "radius identity off by " + std::to_string(worst_rad));

  c.check(std::abs(nu(2, 7) - 0.75220131380140917) < 1e-12, "nu(2,7) drifted");
  c.check(std::abs(nu(2, 6) - 0.71762430387232113) < 1e-12, "nu(2,6) drifted");
  c.check(std::abs(nu(2, 3) - 0.5194938532959157) < 1e-12, "nu(2,3) drifted");
  c.check(nu(2, 7) > 0.75 && 0.75 > nu(2, 6), "nu bracketing of 3/4 failed");
  c.check(nu(2, 3) > 0.5, "nu(2,3) not above 1/2");

  for (const Signature sig : sigs) {
    bool positive = true, raw_match = true, log_match = true;
    const RootSystem rs = build_sigma_plus(sig);
    for (int i = 0; i < 100; ++i) {
      const auto xv = random_x(rng, sig.q);
      const XVector x(xv);
      const double m = mu(sig, x);
      positive = positive && m > 0.0;
      raw_match = raw_match && rel_diff(m, detail::mu_raw(sig, xv)) < 1e-12;
      const ChamberVector t(random_chamber(rng, sig.q, 2.0));
      log_match =
          log_match && rel_diff(sinh_density(rs, t), std::exp(log_sinh_density(rs, t))) < 1e-12;
    }
    c.check(positive, "mu not positive on the open simplex");
    c.check(raw_match, "mu vs mu_raw mismatch");
    c.check(log_match, "sinh density log/linear mismatch");
  }
  return c.rep;
}

SuiteReport suite_group(std::uint64_t seed) {
  Checker c;
  c.rep.suite = "group";
  Rng rng(seed);

  const Signature sigs[] = {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};
  for (const Signature sig : sigs) {
    double worst_act = 0.0, worst_coc = 0.0, worst_fac = 0.0, worst_kak = 0.0, worst_lift = 0.0;
    for (int i = 0; i < 200; ++i) {
      const GroupElement g = random_g(rng, sig, 1.2);
      const GroupElement h = random_g(rng, sig, 1.2);
      const DomainPoint z = random_z(rng, sig);

      const DomainPoint lhs = act(g * h, z);
      const DomainPoint rhs = act(g, act(h, z));
      worst_act = std::max(worst_act, max_abs(lhs.z() - rhs.z()));

      const KCElement jl = automorphy(g * h, z);
      const KCElement jg = automorphy(g, act(h, z));
      const KCElement jh = automorphy(h, z);
      worst_coc = std::max(worst_coc, max_abs(jl.a - jg.a * jh.a));
      worst_coc = std::max(worst_coc, max_abs(jl.d - jg.d * jh.d));

      const Factorization f = factor(sig, g.mat());
      CMatrix up = CMatrix::identity(sig.n());
      set_block(up, 0, sig.p, f.b_plus);
      CMatrix mid = CMatrix::zero(sig.n(), sig.n());
      set_block(mid, 0, 0, f.k_zero.a);
      set_block(mid, sig.p, sig.p, f.k_zero.d);
      CMatrix low = CMatrix::identity(sig.n());
      set_block(low, sig.p, 0, f.c_minus);
      worst_fac = std::max(worst_fac, max_abs(up * mid * low - g.mat()));

      const KakResult kak = kak_decompose(g);
      const GroupElement re = kak.k1.embed() * exp_Ht(sig, kak.t) * kak.k2.embed();
      worst_kak = std::max(worst_kak, max_abs(re.mat() - g.mat()));
      for (std::size_t j = 1; j < kak.t.size(); ++j)
        worst_kak = std::max(worst_kak, std::max(0.0, kak.t[j] - kak.t[j - 1]));

      const int m = 2 * sig.n() + (i % 3);
      DomainFn fn = [m](const DomainPoint &w) {
        cplx s = 1.0;
        for (int r = 0; r < w.sig().p; ++r)
          for (int cc = 0; cc < w.sig().q; ++cc) s += w.z()(r, cc) * double(r + cc + 1);
        return s;
      };
      const DomainPoint origin(sig, CMatrix::zero(sig.p, sig.q));
      const cplx via_slash = slash(fn, m, g)(origin);
      worst_lift = std::max(worst_lift, std::abs(lift_F(fn, m, g) - via_slash));
    }
    const std::string tag = " at (" + std::to_string(sig.p) + "," + std::to_string(sig.q) + ")";
    c.check(worst_act < 1e-9, "action composition off by " + std::to_string(worst_act) + tag);
    c.check(worst_coc < 1e-9, "automorphy cocycle off by " + std::to_string(worst_coc) + tag);
    c.check(worst_fac < 1e-9, "factorization round trip off by " + std::to_string(worst_fac) + tag);
    c.check(worst_kak < 1e-9, "kak reconstruction off by " + std::to_string(worst_kak) + tag);
    c.check(worst_lift < 1e-9, "lift two-route gap " + std::to_string(worst_lift) + tag);
  }
  return c.rep;
}

SuiteReport suite_quadrature(std::uint64_t seed) {
  Checker c;
  c.rep.suite = "quadrature";
  Rng rng(seed);

  // Total Jacobi mass: sum of weights = 2^(a+b+1) B(a+1, b+1).
  for (const auto &[a, b] : {std::pair<double, double>{0.0, 0.0}, {0.5, 1.5}, {2.0, 0.5}, {3.5, 2.5}}) {
    for (const int npts : {16, 40, 80}) {
      const JacobiRule &rule = gauss_jacobi_nodes(npts, a, b);
      double s = 0.0;
      for (const double w : rule.weights) s += w;
      const double want = std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) +
                                   std::lgamma(b + 1) - std::lgamma(a + b + 2));
      c.check(rel_diff(s, want) < 1e-12, "jacobi mass off at a=" + std::to_string(a) +
                                             " b=" + std::to_string(b) +
                                             " n=" + std::to_string(npts));
    }
  }

  // One-variable route against the continued-fraction incomplete beta.
  const QuadConfig cfg;
  bool beta_ok = true;
  for (int i = 0; i < 40; ++i) {
    const int m = 3 + static_cast<int>(rng.uniform(0.0, 12.0));
    const int l = static_cast<int>(rng.uniform(0.0, 8.0));
    const double R = rng.uniform(0.05, 0.95);
    const auto one = [](std::span<const double>) { return 1.0; };
    const double num =
        integrate_simplex(Signature{1, 1}, one, R, l / 2.0, m / 2.0 - 2.0, cfg).value;
    const double den =
        integrate_simplex(Signature{1, 1}, one, 1.0, l / 2.0, m / 2.0 - 2.0, cfg).value;
    if (std::abs(num / den - incomplete_ratio_1d(m, l, R)) > 1e-11) beta_ok = false;
  }
  c.check(beta_ok, "1d mass ratio disagrees with incomplete beta");

  // Ordered-simplex moments with exact rational values.
  const auto vand = [](std::span<const double> x) {
    const double d = x[0] - x[1];
    return d * d;
  };
  const double v12 = integrate_simplex(Signature{2, 2}, vand, 1.0, 0.0, 0.0, cfg).value;
  c.check(std::abs(v12 - 1.0 / 12.0) < 1e-12, "squared difference moment drifted");
  const auto prod = [](std::span<const double> x) { return x[0] * x[1]; };
  const double v8 = integrate_simplex(Signature{2, 2}, prod, 1.0, 0.0, 0.0, cfg).value;
  c.check(std::abs(v8 - 1.0 / 8.0) < 1e-12, "product moment drifted");

  // The guard rails must actually fire: hidden asymmetry and refusal to
  // converge are errors, not results.
  bool threw_sym = false;
  try {
    const auto skew = [](std::span<const double> x) { return x[0] + 2.0 * x[1]; };
    integrate_simplex(Signature{2, 2}, skew, 1.0, 0.0, 0.0, cfg);
  } catch (const SymmetryError &) {
    threw_sym = true;
  }
  c.check(threw_sym, "asymmetric integrand was not rejected");

  bool threw_conv = false;
  try {
    const auto noisy = [](std::span<const double> x) {
      double lo = std::min(x[0], x[1]), hi = std::max(x[0], x[1]);
      const std::uint64_t h = std::bit_cast<std::uint64_t>(lo) * 0x9e3779b97f4a7c15ull ^
                              std::bit_cast<std::uint64_t>(hi);
      return 1.0 + 1e-3 * double(h % 1024) / 1024.0;
    };
    QuadConfig tight = cfg;
    tight.rel_tol = 1e-14;
    integrate_simplex(Signature{2, 2}, noisy, 1.0, 0.0, 0.0, tight);
  } catch (const ConvergenceError &) {
    threw_conv = true;
  }
  c.check(threw_conv, "stalled refinement was not reported");

  // Fixed-budget tensor pass tracks the adaptive result on smooth input.
  const auto smooth = [](std::span<const double> x) {
    return std::exp(-x[0] - x[1]) * (1.0 + x[0] * x[1]);
  };
  const double adaptive = integrate_simplex(Signature{2, 2}, smooth, 1.0, 1.0, 2.0, cfg).value;
  const double fixed = detail::tensor_eval_fixed(Signature{2, 2}, smooth, 1.0, 1.0, 2.0, 64).value;
  c.check(std::abs(adaptive - fixed) < 1e-8, "fixed-budget pass drifted from adaptive");

  return c.rep;
}

SuiteReport suite_lemmas(std::uint64_t seed) {
  Checker c;
  c.rep.suite = "lemmas";
  const Signature s11{1, 1};

  // Exact arithmetic side: the first off-K shell sits exactly on the bound.
  for (const long N : {1L, 2L, 3L, 5L}) {
    const long long gap = 4 * N * N + 2;
    try {
      const auto elems = enumerate_gamma(s11, N, gap + 60);
      const NormGapReport rep = check_norm_gap(s11, N, elems);
      c.check(rep.holds && rep.off_k > 0 && rep.min_off_k_norm == gap,
              "norm gap not tight at level " + std::to_string(N));
    } catch (const Error &e) {
      c.check(false, std::string("norm gap violated: ") + e.what());
    }
  }

  // Sampled side: double-chamber products stay strictly inside n cosh 4R.
  HaarSampler sampler(seed);
  const struct {
    Signature sig;
    double R;
  } runs[] = {{{1, 1}, 0.3}, {{1, 1}, max_R(2, 3)}, {{2, 1}, 0.3}, {{2, 1}, 1.0}};
  for (const auto &run : runs) {
    const double cap = run.sig.n() * std::cosh(4.0 * run.R);
    double worst = 0.0;
    for (const GroupElement &g : sample_KSK(run.sig, run.R, 20000, sampler))
      worst = std::max(worst, frob_norm_sq(g.mat()));
    c.check(worst < cap, "norm bound grazed: " + std::to_string(worst) + " vs cap " +
                             std::to_string(cap));
  }

  const double rmax = max_R(2, 3);
  c.check(check_separation(s11, 3, rmax), "separation fails at the critical radius");
  c.check(!check_separation(s11, 3, rmax + 1e-6), "separation passes beyond the critical radius");

  return c.rep;
}

}  // namespace

SuiteReport run_suite(const std::string &name, std::uint64_t seed) {
  if (name == "rootdata") return suite_rootdata(seed);
  if (name == "group") return suite_group(seed);
  if (name == "quadrature") return suite_quadrature(seed);
  if (name == "lemmas") return suite_lemmas(seed);
  throw Error("unknown suite: " + name);
}

std::vector<SuiteReport> run_all_suites(std::uint64_t seed) {
  return {suite_rootdata(seed), suite_group(seed), suite_quadrature(seed), suite_lemmas(seed)};
}

}  // namespace supq

#include "supq/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "supq/errors.hpp"

namespace supq {

namespace {

int metric_sign(const Signature &sig, int r) { return r < sig.p ? 1 : -1; }

GaussInt det_exact(const std::vector<GaussInt> &m, int n) {
  if (n == 1) return m[0];
  GaussInt acc(0, 0);
  std::vector<GaussInt> minor(static_cast<std::size_t>((n - 1) * (n - 1)));
  for (int c = 0; c < n; ++c) {
    for (int r = 1; r < n; ++r) {
      int mc = 0;
      for (int cc = 0; cc < n; ++cc) {
        if (cc == c) continue;
        minor[static_cast<std::size_t>((r - 1) * (n - 1) + mc)] =
            m[static_cast<std::size_t>(r * n + cc)];
        ++mc;
      }
    }
    GaussInt term = m[static_cast<std::size_t>(c)] * det_exact(minor, n - 1);
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

bool canonical_less(const LatticeElement &a, const LatticeElement &b) {
  if (a.norm_sq != b.norm_sq) return a.norm_sq < b.norm_sq;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].re != b.entries[i].re) return a.entries[i].re < b.entries[i].re;
    if (a.entries[i].im != b.entries[i].im) return a.entries[i].im < b.entries[i].im;
  }
  return false;
}

long long isqrt_ll(long long v) {
  if (v < 0) return -1;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

long long ceil_div(long long a, long long b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

// SU(1,1) normal form [[a, b],[conj b, conj a]] with |a|^2 - |b|^2 = 1:
// walk b over the congruence disc, then solve the circle |a|^2 = 1 + |b|^2.
std::vector<LatticeElement> enumerate_11(long N, long long bound, long long cap) {
  std::vector<LatticeElement> out;
  long long scanned = 0;
  const long long bn_max = (bound - 2) / 4;  // ||gamma||^2 = 2 + 4 |b|^2
  const long long xy_hi = isqrt_ll(bn_max / (N * N));
  for (long long x = -xy_hi; x <= xy_hi; ++x) {
    for (long long y = -xy_hi; y <= xy_hi; ++y) {
      const long long bn = N * N * (x * x + y * y);
      if (bn > bn_max) continue;
      const long long s = 1 + bn;  // |a|^2 on the solution circle
      const long long s_rt = isqrt_ll(s);
      if (++scanned > cap) throw CapError("enumeration candidate cap exceeded");
      for (long long k = ceil_div(-s_rt - 1, N);; ++k) {
        const long long w = 1 + N * k;  // Re a, congruent to 1 mod N
        if (w > s_rt) break;
        const long long rem = s - w * w;
        const long long t = isqrt_ll(rem);
        if (t * t != rem || t % N != 0) continue;
        for (int sign = 0; sign < (t == 0 ? 1 : 2); ++sign) {
          const GaussInt a(w, sign == 0 ? t : -t);
          const GaussInt b(N * x, N * y);
          LatticeElement e;
          e.sig = Signature(1, 1);
          e.entries = {a, b, b.conj(), a.conj()};
          e.norm_sq = 2 * (a.norm() + b.norm());
          out.push_back(std::move(e));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

struct SmallGauss {
  long long re = 0, im = 0;
};

struct Column {
  std::vector<SmallGauss> e;  // rows 0..n-1
  long long norm = 0;
};

} // namespace

bool check_relations(const LatticeElement &g) {
  const int n = g.sig.n();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      GaussInt s(0, 0);
      for (int r = 0; r < n; ++r) {
        const GaussInt term = g.at(r, j).conj() * g.at(r, k);
        s = metric_sign(g.sig, r) > 0 ? s + term : s - term;
      }
      const long want = (j == k) ? metric_sign(g.sig, j) : 0;
      if (!(s.im == 0 && s.re == want)) return false;
    }
  }
  return det_exact(g.entries, n) == GaussInt(1, 0);
}

bool in_k(const LatticeElement &g) {
  const int p = g.sig.p, n = g.sig.n();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if ((r < p) != (c < p) && !g.at(r, c).is_zero()) return false;
  return true;
}

CMatrix to_cmatrix(const LatticeElement &g) {
  const int n = g.sig.n();
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = cplx(g.at(r, c).re.convert_to<double>(), g.at(r, c).im.convert_to<double>());
  return m;
}

namespace detail {

std::vector<LatticeElement> enumerate_backtracking(Signature sig, long N, long long bound,
                                                   long long cap) {
  const int n = sig.n(), p = sig.p;
  long long generated = 0;
  auto charge = [&](long long k = 1) {
    if ((generated += k) > cap) throw CapError("enumeration candidate cap exceeded");
  };

  // Candidate columns per index, sorted by plain norm so each search state
  // scans a prefix. Entries carry the congruence delta_rj + N Z[i].
  const long long col_budget = bound - (n - 1);
  std::vector<std::vector<Column>> cands(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::vector<SmallGauss> cur(static_cast<std::size_t>(n));
    std::function<void(int, long long)> rec = [&](int r, long long left) {
      if (r == n) {
        charge();
        cands[static_cast<std::size_t>(j)].push_back(
            {cur, col_budget - left});
        return;
      }
      const long long delta = (r == j) ? 1 : 0;
      const long long hi = isqrt_ll(left);
      for (long long k = ceil_div(-hi - delta, N);; ++k) {
        const long long re = delta + N * k;
        if (re > hi) break;
        const long long rem = left - re * re;
        const long long im_hi = isqrt_ll(rem);
        for (long long ky = ceil_div(-im_hi, N); N * ky <= im_hi; ++ky) {
          cur[static_cast<std::size_t>(r)] = {re, N * ky};
          rec(r + 1, rem - N * N * ky * ky);
        }
      }
    };
    rec(0, col_budget);
    std::sort(cands[static_cast<std::size_t>(j)].begin(), cands[static_cast<std::size_t>(j)].end(),
              [](const Column &a, const Column &b) { return a.norm < b.norm; });
  }

  std::vector<LatticeElement> out;
  std::vector<const Column *> placed;
  long long used = 0;
  std::function<void(int)> place = [&](int j) {
    const long long budget = bound - used - (n - 1 - j);
    for (const Column &c : cands[static_cast<std::size_t>(j)]) {
      if (c.norm > budget) break;
      charge();
      // Exact Gram constraints: this column against itself and all placed
      // ones, under the indefinite form diag(I_p, -I_q).
      long long self = 0;
      for (int r = 0; r < n; ++r) {
        const long long nr = c.e[static_cast<std::size_t>(r)].re * c.e[static_cast<std::size_t>(r)].re +
                             c.e[static_cast<std::size_t>(r)].im * c.e[static_cast<std::size_t>(r)].im;
        self += metric_sign(sig, r) * nr;
      }
      if (self != (j < p ? 1 : -1)) continue;
      bool ok = true;
      for (int k = 0; k < j && ok; ++k) {
        long long cre = 0, cim = 0;
        for (int r = 0; r < n; ++r) {
          const SmallGauss &u = placed[static_cast<std::size_t>(k)]->e[static_cast<std::size_t>(r)];
          const SmallGauss &v = c.e[static_cast<std::size_t>(r)];
          const long long sg = metric_sign(sig, r);
          cre += sg * (u.re * v.re + u.im * v.im);
          cim += sg * (u.re * v.im - u.im * v.re);
        }
        ok = (cre == 0 && cim == 0);
      }
      if (!ok) continue;
      placed.push_back(&c);
      used += c.norm;
      if (j + 1 == n) {
        LatticeElement e;
        e.sig = sig;
        e.entries.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
          for (int col = 0; col < n; ++col) {
            const SmallGauss &v = placed[static_cast<std::size_t>(col)]->e[static_cast<std::size_t>(r)];
            e.entries[static_cast<std::size_t>(r * n + col)] = GaussInt(v.re, v.im);
          }
        e.norm_sq = used;
        if (check_relations(e)) out.push_back(std::move(e));
      } else {
        place(j + 1);
      }
      placed.pop_back();
      used -= c.norm;
    }
  };
  place(0);
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

} // namespace detail

std::vector<LatticeElement> enumerate_gamma(Signature sig, long N, long long bound,
                                            long long cap) {
  if (N < 1) throw std::invalid_argument("level must be >= 1");
  if (bound < sig.n()) throw std::invalid_argument("bound below the identity norm");
  if (sig.p == 1 && sig.q == 1) return enumerate_11(N, bound, cap);
  return detail::enumerate_backtracking(sig, N, bound, cap);
}

NormGapReport check_norm_gap(Signature sig, long N, const std::vector<LatticeElement> &elems) {
  NormGapReport report;
  report.gap_bound = BigInt(4) * N * N + sig.n();
  report.holds = true;
  for (const auto &e : elems) {
    ++report.total;
    if (in_k(e)) {
      ++report.in_k;
      continue;
    }
    ++report.off_k;
    if (report.off_k == 1 || e.norm_sq < report.min_off_k_norm) report.min_off_k_norm = e.norm_sq;
    if (e.norm_sq < report.gap_bound) {
      report.holds = false;
      throw Error("norm gap violated: off-K element with norm_sq " + e.norm_sq.str() +
                  " below " + report.gap_bound.str() + " at level " + std::to_string(N));
    }
  }
  return report;
}

std::vector<GroupElement> sample_KSK(Signature sig, double R, long count, HaarSampler &sampler) {
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  const int q = sig.q;
  auto chamber_draw = [&]() {
    std::vector<double> t(static_cast<std::size_t>(q));
    for (auto &v : t) v = sampler.rng.uniform(0.0, R);
    std::sort(t.begin(), t.end(), std::greater<double>());
    return t;
  };
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const GroupElement k1 = haar_sample_K(sig, sampler).embed();
    const GroupElement k2 = haar_sample_K(sig, sampler).embed();
    const GroupElement k3 = haar_sample_K(sig, sampler).embed();
    const GroupElement mid = exp_Ht(sig, chamber_draw());
    const GroupElement neg = inverse(exp_Ht(sig, chamber_draw()));
    out.push_back(k1 * mid * k2 * neg * k3);
  }
  return out;
}

bool check_separation(Signature sig, long N, double R) {
  if (N < 3) throw std::invalid_argument("separation check needs level >= 3");
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  return R <= max_R(sig.n(), static_cast<int>(N));
}

TruncationReport truncated_poincare(Signature sig, long N, int m, int l, const DomainPoint &z,
                                    long long bound, long long cap) {
  if (sig.p != sig.q) throw std::invalid_argument("det-power series needs p = q");
  if (!(z.sig() == sig)) throw DimensionError("domain point signature mismatch");
  if (N < 3) throw std::invalid_argument("series level must be >= 3");
  if (l < 0 || m < 1) throw std::invalid_argument("bad weight parameters");

  const std::vector<LatticeElement> elems = enumerate_gamma(sig, N, bound, cap);
  const int p = sig.p;

  auto int_pow = [](cplx base, int e) {
    cplx acc = 1.0;
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
  };

  TruncationReport report;
  report.bound = bound;
  report.terms_used = static_cast<long>(elems.size());
  // Canonical order groups equal norms contiguously: sum shell by shell so
  // the bytes of the result never depend on enumeration internals.
  std::size_t i = 0;
  while (i < elems.size()) {
    std::size_t jend = i;
    while (jend < elems.size() && elems[jend].norm_sq == elems[i].norm_sq) ++jend;
    cplx shell_sum = 0.0;
    double shell_mag = 0.0;
    for (std::size_t k = i; k < jend; ++k) {
      const CMatrix g = to_cmatrix(elems[k]);
      const CMatrix num = block(g, 0, 0, p, p) * z.z() + block(g, 0, p, p, p);
      const CMatrix den = block(g, p, 0, p, p) * z.z() + block(g, p, p, p, p);
      const cplx term = int_pow(det(num), l) / int_pow(det(den), l + m);
      shell_sum += term;
      shell_mag += std::abs(term);
    }
    report.partial_value += shell_sum;
    report.tail_indicator = shell_mag;
    i = jend;
  }
  return report;
}

std::string to_json_lines(const std::vector<LatticeElement> &elems, long N) {
  std::string out;
  for (const auto &e : elems) {
    out += "{\"level\": " + std::to_string(N) + ", \"norm_sq\": " + e.norm_sq.str() +
           ", \"entries\": [";
    const int n = e.sig.n();
    for (int r = 0; r < n; ++r) {
      out += r == 0 ? "[" : ", [";
      for (int c = 0; c < n; ++c) {
        if (c) out += ", ";
        out += "[" + e.at(r, c).re.str() + ", " + e.at(r, c).im.str() + "]";
      }
      out += "]";
    }
    out += "]}\n";
  }
  return out;
}

} // namespace supq

#include "supq/threshold.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "supq/errors.hpp"

namespace supq {

namespace {

// Monte Carlo budget per grid point for monomial integrands; the induced
// error is carried through a companion integral of the standard error.
constexpr long kMcSamplesPerNode = 2000;
constexpr std::uint64_t kMcSeedBase = 0xA111;
// find_n0 escalation stops doubling the axis budget here.
constexpr int kHardPointCap = 3200;
// A valid query always crosses 1/2 (nu -> 1), so this only trips on bugs.
constexpr int kMaxLevel = 1000000;

double vandermonde_sq(std::span<const double> x) {
  double v = 1.0;
  for (std::size_t r = 0; r + 1 < x.size(); ++r)
    for (std::size_t s = r + 1; s < x.size(); ++s) {
      const double d = x[r] - x[s];
      v *= d * d;
    }
  return v;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One deterministic stream per grid point, keyed on the coordinate bits, so
// repeated runs (and the companion error integral) see identical draws.
std::uint64_t point_seed(std::span<const double> x) {
  std::uint64_t h = kMcSeedBase;
  for (double c : x) h = mix64(h ^ std::bit_cast<std::uint64_t>(c));
  return h;
}

struct McStats {
  double mean = 0.0;
  double std_err = 0.0;
};

// The true compact average is a symmetric function of x; the estimator is
// made exactly symmetric (not just in distribution) by sorting the
// coordinates before seeding and evaluating, so it survives the symmetry
// spot-check inside integrate_simplex.
McStats monomial_k_average(const Signature sig, const PolySpec &f,
                           std::span<const double> x_in) {
  std::vector<double> x(x_in.begin(), x_in.end());
  std::sort(x.begin(), x.end(), std::greater<double>());
  HaarSampler sampler(point_seed(x));
  CMatrix sx(sig.p, sig.q);
  for (int r = 0; r < sig.q; ++r) sx(r, r) = std::sqrt(x[static_cast<std::size_t>(r)]);
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < kMcSamplesPerNode; ++i) {
    const KElement k = haar_sample_K(sig, sampler);
    const double v = std::abs(eval_poly(f, k.a() * sx * adjoint(k.d())));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(kMcSamplesPerNode);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

// The full integrand phi_k_avg * mu splits into per-axis endpoint factors
// x^a (1-x)^b handled by the quadrature weight, times this remainder.
struct Kernel {
  double a = 0.0;
  double b = 0.0;
  SimplexIntegrand fn;
  SimplexIntegrand err_fn;  // only set when fn carries Monte Carlo noise
};

Kernel make_kernel(const N0Query &q) {
  const Signature sig = q.sig();
  const double base_b = 0.5 * q.weight.m - sig.n();
  Kernel k;
  k.b = base_b;
  if (const auto *c = std::get_if<ConstantPoly>(&q.poly)) {
    const double scale = std::abs(c->c);
    k.a = sig.p - sig.q;
    k.fn = [scale](std::span<const double> x) { return scale * vandermonde_sq(x); };
    return k;
  }
  if (const auto *d = std::get_if<DetPower>(&q.poly)) {
    // |det(A sqrt(x) D*)|^l = prod x_r^{l/2} joins the axis weight.
    k.a = sig.p - sig.q + 0.5 * d->l;
    k.fn = [](std::span<const double> x) { return vandermonde_sq(x); };
    return k;
  }
  k.a = sig.p - sig.q;
  const PolySpec f = q.poly;
  k.fn = [sig, f](std::span<const double> x) {
    return monomial_k_average(sig, f, x).mean * vandermonde_sq(x);
  };
  k.err_fn = [sig, f](std::span<const double> x) {
    return monomial_k_average(sig, f, x).std_err * vandermonde_sq(x);
  };
  return k;
}

struct Mass {
  double value = 0.0;
  double abs_err = 0.0;
};

Mass integrate_mass(const Signature sig, const Kernel &k, double R, const QuadConfig &cfg) {
  QuadConfig eff = cfg;
  if (k.err_fn) {
    // The sampled average leaves sqrt(x)-type factors in the remainder that
    // tensor Gauss-Jacobi cannot push to 1e-10, and refinement deltas bottom
    // out at the Monte Carlo noise. Ask for what is reachable; abs_err stays
    // honest through the refinement delta plus the noise integral below.
    eff.rel_tol = std::max(cfg.rel_tol, 1e-5);
  }
  const QuadResult res = integrate_simplex(sig, k.fn, R, k.a, k.b, eff);
  Mass out{res.value, res.abs_err};
  if (k.err_fn) {
    // The noise density integrates at a fixed budget: its value is already an
    // error estimate, so chasing refinement convergence on it is meaningless
    // (and impossible when the density sits at roundoff scale).
    const QuadResult noise =
        detail::tensor_eval_fixed(sig, k.err_fn, R, k.a, k.b, eff.min_points_per_axis);
    out.abs_err += std::abs(noise.value);
  }
  return out;
}

RatioValue quotient(const Mass &num, const Mass &den) {
  if (!(den.value > 0.0)) throw Error("mass denominator not positive");
  const double value = num.value / den.value;
  const double abs_err =
      num.abs_err / den.value + std::abs(num.value) * den.abs_err / (den.value * den.value);
  return {value, abs_err};
}

int det_exponent(const PolySpec &f) {
  if (const auto *d = std::get_if<DetPower>(&f)) return d->l;
  return 0;  // Constant
}

RatioValue closed_form_ratio(const N0Query &q, int N) {
  const double R = nu(2, N);
  const double v = incomplete_ratio_1d(q.weight.m, det_exponent(q.poly), R);
  // Continued-fraction accuracy; both beta factors converge to near machine
  // precision for the exponents in play.
  return {v, 1e-14 * (1.0 + v)};
}

// Denominator-caching evaluator used by the scan; ratio() wraps one call.
class RatioEngine {
public:
  RatioEngine(const N0Query &q) : q_(q), cfg_(q.cfg) {
    if (q_.route == RatioRoute::generic) {
      kernel_ = make_kernel(q_);
      den_ = integrate_mass(q_.sig(), kernel_, 1.0, cfg_);
    }
  }

  RatioValue at(int N) const {
    if (q_.route == RatioRoute::closed_form_1d) return closed_form_ratio(q_, N);
    const double R = nu(q_.sig().n(), N);
    return quotient(integrate_mass(q_.sig(), kernel_, R, cfg_), den_);
  }

  // Doubles the axis budget (keeping refinement anchored at the old cap) and
  // refreshes the denominator. False once nothing further can be gained.
  bool escalate() {
    if (q_.route == RatioRoute::closed_form_1d) return false;
    if (2 * cfg_.max_points_per_axis > kHardPointCap) return false;
    cfg_.min_points_per_axis = cfg_.max_points_per_axis;
    cfg_.max_points_per_axis *= 2;
    den_ = integrate_mass(q_.sig(), kernel_, 1.0, cfg_);
    return true;
  }

private:
  const N0Query &q_;
  QuadConfig cfg_;
  Kernel kernel_;
  Mass den_;
};

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

} // namespace

N0Query::N0Query(WeightSpec w, PolySpec f, QuadConfig c, double margin_, RatioRoute route_)
    : weight(w), poly(std::move(f)), cfg(c), margin(margin_), route(route_) {
  if (poly_is_zero(poly)) throw std::invalid_argument("threshold query needs a nonzero poly");
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  if (const auto *d = std::get_if<DetPower>(&poly)) {
    if (d->l > 0 && weight.sig.p != weight.sig.q)
      throw std::invalid_argument("det power needs p = q");
  }
  if (route == RatioRoute::closed_form_1d) {
    if (weight.sig.p != 1 || weight.sig.q != 1)
      throw std::invalid_argument("closed-form route is the p = q = 1 reduction");
    if (std::holds_alternative<MonomialSum>(poly))
      throw std::invalid_argument("closed-form route needs const or det^l");
  }
}

RatioValue ratio(const N0Query &query, int N) {
  if (N < 1) throw std::invalid_argument("level must be >= 1");
  return RatioEngine(query).at(N);
}

N0Result find_n0(const N0Query &query) {
  RatioEngine engine(query);
  // Ratio at the previous level, valid only while the budget is unchanged.
  std::optional<double> below;
  for (int N = 3; N <= kMaxLevel; ++N) {
    for (;;) {
      const RatioValue r = engine.at(N);
      const double gap = r.value - 0.5;
      if (gap > std::max(query.margin, 10.0 * r.abs_err)) {
        N0Result out;
        out.n0 = N;
        out.ratio_at_n0 = r.value;
        out.decided_margin = gap;
        if (N > 3) {
          if (!below) below = engine.at(N - 1).value;
          out.ratio_below = *below;
        }
        return out;
      }
      // Passing a level only needs the numerics to be sure the ratio is still
      // below 1/2; the margin does not apply on this side, otherwise a level
      // genuinely short of 1/2 by less than the margin could never be passed.
      if (-gap > 10.0 * r.abs_err) {
        below = r.value;
        break;
      }
      if (!engine.escalate())
        throw UndecidedError("ratio within decision margin of 1/2 at level " + std::to_string(N) +
                             " with the precision cap reached");
      below.reset();
    }
  }
  throw ConvergenceError("threshold scan exceeded the level cap");
}

TableGrid reproduce_table(Signature sig, int l_lo, int l_hi, int m_lo, int m_hi,
                          const TableOptions &opt) {
  if (l_lo < 0 || l_hi < l_lo || m_hi < m_lo) throw std::invalid_argument("bad table ranges");
  if (m_lo < 2 * sig.n() - 1)
    throw std::invalid_argument("table weights start below the integrability bound");
  if (l_hi > 0 && sig.p != sig.q) throw std::invalid_argument("det power needs p = q");

  TableGrid grid;
  grid.sig = sig;
  grid.l_lo = l_lo;
  grid.l_hi = l_hi;
  grid.m_lo = m_lo;
  grid.m_hi = m_hi;
  const int m_count = m_hi - m_lo + 1;
  const int total = (l_hi - l_lo + 1) * m_count;
  grid.cells.resize(static_cast<std::size_t>(total));

  auto run_cell = [&](int idx) {
    TableCell &cell = grid.cells[static_cast<std::size_t>(idx)];
    cell.l = l_lo + idx / m_count;
    cell.m = m_lo + idx % m_count;
    N0Query q(WeightSpec(sig, cell.m), DetPower{cell.l}, opt.cfg, opt.margin, opt.route);
    try {
      cell.result = find_n0(q);
    } catch (const UndecidedError &) {
      cell.result.reset();
    }
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1 || total == 1) {
    for (int idx = 0; idx < total; ++idx) run_cell(idx);
  } else {
    // Strided partition: cells land in fixed slots, so the merge order (and
    // therefore the emitted bytes) cannot depend on scheduling.
    std::vector<std::future<void>> tasks;
    for (int t = 1; t < threads; ++t) {
      tasks.push_back(std::async(std::launch::async, [&, t] {
        for (int idx = t; idx < total; idx += threads) run_cell(idx);
      }));
    }
    for (int idx = 0; idx < total; idx += threads) run_cell(idx);
    for (auto &task : tasks) task.get();
  }
  return grid;
}

std::string to_csv(const TableGrid &grid) {
  std::string out = "l,m,n0\n";
  for (const auto &cell : grid.cells) {
    out += std::to_string(cell.l) + "," + std::to_string(cell.m) + ",";
    out += cell.result ? std::to_string(cell.result->n0) : std::string("undecided");
    out += "\n";
  }
  return out;
}

std::string to_json(const TableGrid &grid) {
  std::string out = "[";
  bool first = true;
  for (const auto &cell : grid.cells) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "  {\"l\": " + std::to_string(cell.l) + ", \"m\": " + std::to_string(cell.m);
    if (cell.result) {
      out += ", \"n0\": " + std::to_string(cell.result->n0);
      out += ", \"ratio_at_n0\": " + fmt_double(cell.result->ratio_at_n0);
      out += ", \"margin\": " + fmt_double(cell.result->decided_margin);
    } else {
      out += ", \"n0\": null, \"undecided\": true";
    }
    out += "}";
  }
  out += "\n]\n";
  return out;
}

std::vector<GoldenEntry> load_golden_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open golden table " + path);
  std::string line;
  if (!std::getline(in, line) || line != "l,m,n0")
    throw Error("golden table " + path + " missing l,m,n0 header");
  std::vector<GoldenEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    GoldenEntry e;
    if (std::sscanf(line.c_str(), "%d,%d,%d", &e.l, &e.m, &e.n0) != 3)
      throw Error("golden table " + path + " has a malformed row: " + line);
    out.push_back(e);
  }
  return out;
}

MatchReport compare_with_golden(const TableGrid &grid, const std::vector<GoldenEntry> &golden) {
  MatchReport report;
  report.total = static_cast<int>(golden.size());
  const int m_count = grid.m_hi - grid.m_lo + 1;
  for (const auto &e : golden) {
    const std::string tag = "l=" + std::to_string(e.l) + " m=" + std::to_string(e.m);
    if (e.l < grid.l_lo || e.l > grid.l_hi || e.m < grid.m_lo || e.m > grid.m_hi) {
      report.mismatches.push_back(tag + ": outside the computed grid");
      continue;
    }
    const auto &cell =
        grid.cells[static_cast<std::size_t>((e.l - grid.l_lo) * m_count + (e.m - grid.m_lo))];
    if (!cell.result) {
      report.mismatches.push_back(tag + ": undecided, want " + std::to_string(e.n0));
    } else if (cell.result->n0 != e.n0) {
      report.mismatches.push_back(tag + ": got " + std::to_string(cell.result->n0) + ", want " +
                                  std::to_string(e.n0));
    } else {
      ++report.matched;
    }
  }
  return report;
}

} // namespace supq

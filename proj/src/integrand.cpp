#include "supq/integrand.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "supq/errors.hpp"

namespace supq {

WeightSpec::WeightSpec(Signature sig_, int m_) : sig(sig_), m(m_) {
  if (m < 2 * sig.n() - 1) {
    throw std::invalid_argument("weight m = " + std::to_string(m) + " below integrability bound " +
                                std::to_string(2 * sig.n() - 1));
  }
}

namespace {

cplx int_pow(cplx base, int e) {
  cplx out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

} // namespace

cplx eval_poly(const PolySpec &f, const CMatrix &z) {
  if (const auto *c = std::get_if<ConstantPoly>(&f)) return c->c;
  if (const auto *d = std::get_if<DetPower>(&f)) {
    if (z.rows() != z.cols()) throw std::invalid_argument("det power needs square z");
    return int_pow(det(z), d->l);
  }
  const auto &sum = std::get<MonomialSum>(f);
  cplx acc = 0.0;
  for (const auto &term : sum.terms) {
    cplx prod = term.coeff;
    for (std::size_t r = 0; r < term.exps.size(); ++r) {
      if (static_cast<int>(r) >= z.rows()) throw std::invalid_argument("monomial row out of range");
      for (std::size_t s = 0; s < term.exps[r].size(); ++s) {
        if (static_cast<int>(s) >= z.cols())
          throw std::invalid_argument("monomial column out of range");
        if (term.exps[r][s] != 0) prod *= int_pow(z(static_cast<int>(r), static_cast<int>(s)), term.exps[r][s]);
      }
    }
    acc += prod;
  }
  return acc;
}

bool poly_is_zero(const PolySpec &f) {
  if (const auto *c = std::get_if<ConstantPoly>(&f)) return c->c == 0.0;
  if (std::holds_alternative<DetPower>(f)) return false;
  const auto &sum = std::get<MonomialSum>(f);
  for (const auto &term : sum.terms)
    if (term.coeff != 0.0) return false;
  return true;
}

namespace {

std::string trim(const std::string &s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string &tok) {
  const char *b = tok.data();
  const char *e = b + tok.size();
  double v = 0.0;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw std::invalid_argument("bad number '" + tok + "'");
  return v;
}

cplx parse_complex(const std::string &tok) {
  std::size_t comma = tok.find(',');
  if (comma == std::string::npos) return cplx(parse_double(tok), 0.0);
  return cplx(parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1)));
}

int parse_int(const std::string &tok) {
  const char *b = tok.data();
  const char *e = b + tok.size();
  int v = 0;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw std::invalid_argument("bad integer '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string &s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

// "z[r][s]" with optional "^e", 1-based indices.
void parse_factor(const std::string &tok, int &r, int &s, int &e) {
  std::size_t i = 0;
  auto expect = [&](char c) {
    if (i >= tok.size() || tok[i] != c)
      throw std::invalid_argument("bad monomial factor '" + tok + "'");
    ++i;
  };
  auto read_int = [&]() {
    std::size_t b = i;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    if (i == b) throw std::invalid_argument("bad monomial factor '" + tok + "'");
    return parse_int(tok.substr(b, i - b));
  };
  expect('z');
  expect('[');
  r = read_int();
  expect(']');
  expect('[');
  s = read_int();
  expect(']');
  e = 1;
  if (i < tok.size()) {
    expect('^');
    e = read_int();
  }
  if (i != tok.size()) throw std::invalid_argument("bad monomial factor '" + tok + "'");
  if (r < 1 || s < 1 || e < 0) throw std::invalid_argument("bad monomial factor '" + tok + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_complex(cplx c) {
  if (c.imag() == 0.0) return fmt_double(c.real());
  return fmt_double(c.real()) + "," + fmt_double(c.imag());
}

} // namespace

PolySpec parse_poly(const std::string &text) {
  std::string s = trim(text);
  if (s == "det") return DetPower{1};
  if (s.rfind("det^", 0) == 0) {
    int l = parse_int(s.substr(4));
    if (l < 0) throw std::invalid_argument("det exponent must be >= 0");
    return DetPower{l};
  }
  if (s.rfind("const", 0) == 0) {
    std::string rest = trim(s.substr(5));
    if (rest.empty()) throw std::invalid_argument("const needs a value");
    return ConstantPoly{parse_complex(rest)};
  }
  if (s.rfind("sum:", 0) == 0) {
    std::vector<std::string> toks = split_ws(s.substr(4));
    if (toks.empty()) throw std::invalid_argument("empty sum");
    struct RawTerm {
      cplx coeff;
      std::vector<std::array<int, 3>> factors;  // (r, s, e), 1-based
    };
    std::vector<RawTerm> raw;
    std::size_t i = 0;
    int max_r = 0, max_s = 0;
    while (i < toks.size()) {
      RawTerm t;
      t.coeff = parse_complex(toks[i++]);
      if (i < toks.size() && toks[i] == "*") {
        ++i;
        bool saw_factor = false;
        while (i < toks.size() && toks[i] != "+") {
          if (toks[i] == "*") {
            ++i;
            continue;
          }
          int r, c, e;
          parse_factor(toks[i++], r, c, e);
          t.factors.push_back({r, c, e});
          max_r = std::max(max_r, r);
          max_s = std::max(max_s, c);
          saw_factor = true;
        }
        if (!saw_factor) throw std::invalid_argument("term has '*' but no factors");
      }
      raw.push_back(std::move(t));
      if (i < toks.size()) {
        if (toks[i] != "+") throw std::invalid_argument("expected '+' between terms");
        ++i;
        if (i == toks.size()) throw std::invalid_argument("trailing '+'");
      }
    }
    MonomialSum sum;
    for (const auto &t : raw) {
      MonomialTerm mt;
      mt.coeff = t.coeff;
      mt.exps.assign(static_cast<std::size_t>(std::max(max_r, 1)),
                     std::vector<int>(static_cast<std::size_t>(std::max(max_s, 1)), 0));
      for (const auto &f : t.factors)
        mt.exps[static_cast<std::size_t>(f[0] - 1)][static_cast<std::size_t>(f[1] - 1)] += f[2];
      sum.terms.push_back(std::move(mt));
    }
    return sum;
  }
  throw std::invalid_argument("cannot parse polynomial '" + text + "'");
}

std::string to_string(const PolySpec &f) {
  if (const auto *c = std::get_if<ConstantPoly>(&f)) return "const " + fmt_complex(c->c);
  if (const auto *d = std::get_if<DetPower>(&f)) return "det^" + std::to_string(d->l);
  const auto &sum = std::get<MonomialSum>(f);
  std::string out = "sum:";
  bool first = true;
  for (const auto &term : sum.terms) {
    out += first ? " " : " + ";
    first = false;
    out += fmt_complex(term.coeff);
    std::string factors;
    for (std::size_t r = 0; r < term.exps.size(); ++r) {
      for (std::size_t s = 0; s < term.exps[r].size(); ++s) {
        int e = term.exps[r][s];
        if (e == 0) continue;
        factors += " z[" + std::to_string(r + 1) + "][" + std::to_string(s + 1) + "]";
        if (e != 1) factors += "^" + std::to_string(e);
      }
    }
    if (!factors.empty()) out += " *" + factors;
  }
  return out;
}

KElement haar_sample_K(Signature sig, HaarSampler &sampler) {
  auto gauss = [&](int n) {
    CMatrix g(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) g(r, c) = sampler.rng.gaussian_complex();
    return g;
  };
  CMatrix a = qr_unitary(gauss(sig.p));
  CMatrix d = qr_unitary(gauss(sig.q));
  cplx phase = det(a) * det(d);
  for (int r = 0; r < sig.q; ++r) d(r, sig.q - 1) /= phase;
  return KElement(sig, std::move(a), std::move(d));
}

double phi(const WeightSpec &w, const PolySpec &f, const KElement &k, const XVector &x) {
  if (!(k.sig() == w.sig)) throw DimensionError("phi: k signature mismatch");
  if (x.q() != w.sig.q) throw DimensionError("phi: x dimension mismatch");
  CMatrix sx(w.sig.p, w.sig.q);
  double logwt = 0.0;
  for (int r = 0; r < w.sig.q; ++r) {
    sx(r, r) = std::sqrt(x[r]);
    logwt += 0.5 * w.m * std::log1p(-x[r]);
  }
  CMatrix zk = k.a() * sx * adjoint(k.d());
  return std::exp(logwt) * std::abs(eval_poly(f, zk));
}

namespace detail {

KAvg phi_k_avg_mc(const WeightSpec &w, const PolySpec &f, const XVector &x,
                  const KAvgConfig &cfg) {
  if (cfg.samples < 2) throw std::invalid_argument("need at least 2 Monte Carlo samples");
  HaarSampler sampler(cfg.seed);
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < cfg.samples; ++i) {
    double v = phi(w, f, haar_sample_K(w.sig, sampler), x);
    sum += v;
    sum_sq += v * v;
  }
  double n = static_cast<double>(cfg.samples);
  double mean = sum / n;
  double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

} // namespace detail

KAvg phi_k_avg(const WeightSpec &w, const PolySpec &f, const XVector &x, const KAvgConfig &cfg) {
  if (x.q() != w.sig.q) throw DimensionError("phi_k_avg: x dimension mismatch");
  // The compact average collapses whenever |f| is K-invariant along the
  // orbit: constants trivially, det powers because A and D* have modulus-one
  // determinant, leaving |det sqrt(x)|^l.
  if (const auto *c = std::get_if<ConstantPoly>(&f)) {
    double logv = 0.0;
    for (int r = 0; r < w.sig.q; ++r) logv += 0.5 * w.m * std::log1p(-x[r]);
    return {std::abs(c->c) * std::exp(logv), 0.0};
  }
  if (const auto *d = std::get_if<DetPower>(&f)) {
    if (w.sig.p != w.sig.q)
      throw std::invalid_argument("det power needs p = q");
    double logv = 0.0;
    for (int r = 0; r < w.sig.q; ++r)
      logv += 0.5 * d->l * std::log(x[r]) + 0.5 * w.m * std::log1p(-x[r]);
    return {std::exp(logv), 0.0};
  }
  return detail::phi_k_avg_mc(w, f, x, cfg);
}

DomainFn slash(const PolySpec &f, int m, const GroupElement &g) {
  DomainFn fn = [f](const DomainPoint &zp) { return eval_poly(f, zp.z()); };
  return slash(std::move(fn), m, g);
}

cplx lift_F(const PolySpec &f, int m, const GroupElement &g) {
  DomainFn fn = [&f](const DomainPoint &zp) { return eval_poly(f, zp.z()); };
  return lift_F(fn, m, g);
}

} // namespace supq

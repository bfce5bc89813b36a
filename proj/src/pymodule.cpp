#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <string>

#include "supq/arithmetic.hpp"
#include "supq/integrand.hpp"
#include "supq/rootdata.hpp"
#include "supq/threshold.hpp"
#include "supq/verify.hpp"

namespace py = pybind11;

namespace {

supq::RatioRoute route_from(const std::string &name) {
  if (name == "generic") return supq::RatioRoute::generic;
  if (name == "closed") return supq::RatioRoute::closed_form_1d;
  throw std::invalid_argument("unknown route: " + name);
}

supq::N0Query make_query(int p, int q, int m, int l, const std::string &f, double margin,
                         const std::string &route) {
  const supq::Signature sig(p, q);
  supq::PolySpec poly = f.empty() ? (l == 0 ? supq::PolySpec(supq::ConstantPoly{})
                                            : supq::PolySpec(supq::DetPower{l}))
                                  : supq::parse_poly(f);
  return supq::N0Query(supq::WeightSpec(sig, m), std::move(poly), supq::QuadConfig{}, margin,
                       route_from(route));
}

py::dict result_dict(const supq::N0Result &res) {
  py::dict d;
  d["n0"] = res.n0;
  d["ratio_at_n0"] = res.ratio_at_n0;
  d["margin"] = res.decided_margin;
  if (res.ratio_below) d["ratio_below"] = *res.ratio_below;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "truncated-domain mass ratios, minimal-level tables, and congruence "
            "lattice checks for the matrix ball of SU(p,q)";

  m.def("nu", &supq::nu, py::arg("n"), py::arg("N"),
        "Critical truncation proportion nu_n(N) of the radial coordinate.");
  m.def("max_R", &supq::max_R, py::arg("n"), py::arg("N"),
        "Largest chamber radius compatible with the level-N norm gap.");

  m.def(
      "find_n0",
      [](int p, int q, int mm, int l, const std::string &f, double margin,
         const std::string &route) {
        return result_dict(supq::find_n0(make_query(p, q, mm, l, f, margin, route)));
      },
      py::arg("p"), py::arg("q"), py::arg("m"), py::arg("l") = 0, py::arg("f") = std::string(),
      py::arg("margin") = 1e-6, py::arg("route") = "generic",
      "Smallest level whose truncated-to-full mass ratio exceeds 1/2.");

  m.def(
      "ratio",
      [](int p, int q, int mm, int l, int N, const std::string &f, const std::string &route) {
        const supq::RatioValue v = supq::ratio(make_query(p, q, mm, l, f, 1e-6, route), N);
        return py::make_tuple(v.value, v.abs_err);
      },
      py::arg("p"), py::arg("q"), py::arg("m"), py::arg("l"), py::arg("N"),
      py::arg("f") = std::string(), py::arg("route") = "generic",
      "Mass ratio at a fixed level, with its error estimate.");

  m.def(
      "table",
      [](int p, int l_lo, int l_hi, int m_lo, int m_hi, int threads, const std::string &route) {
        supq::TableOptions opt;
        opt.threads = threads;
        opt.route = route_from(route);
        const supq::TableGrid grid =
            supq::reproduce_table(supq::Signature(p, p), l_lo, l_hi, m_lo, m_hi, opt);
        py::list rows;
        for (const auto &cell : grid.cells) {
          py::dict d;
          d["l"] = cell.l;
          d["m"] = cell.m;
          if (cell.result) {
            d["n0"] = cell.result->n0;
            d["margin"] = cell.result->decided_margin;
          } else {
            d["n0"] = py::none();
          }
          rows.append(std::move(d));
        }
        return rows;
      },
      py::arg("p"), py::arg("l_lo"), py::arg("l_hi"), py::arg("m_lo"), py::arg("m_hi"),
      py::arg("threads") = 1, py::arg("route") = "generic",
      "Minimal-level grid over an (l, m) rectangle; one dict per cell.");

  m.def(
      "check_norm_gap",
      [](int p, int q, long N, long long bound) {
        const supq::Signature sig(p, q);
        const auto elems = supq::enumerate_gamma(sig, N, bound);
        const supq::NormGapReport rep = supq::check_norm_gap(sig, N, elems);
        py::dict d;
        d["total"] = rep.total;
        d["in_k"] = rep.in_k;
        d["off_k"] = rep.off_k;
        d["min_off_k_norm"] = rep.min_off_k_norm.convert_to<long long>();
        d["gap_bound"] = rep.gap_bound.convert_to<long long>();
        d["holds"] = rep.holds;
        return d;
      },
      py::arg("p"), py::arg("q"), py::arg("N"), py::arg("bound"),
      "Enumerate the level-N lattice ball and certify the off-K norm gap.");

  m.def(
      "truncated_poincare",
      [](long N, int mm, int l, std::complex<double> z, long long bound) {
        const supq::Signature sig(1, 1);
        supq::CMatrix zm(1, 1);
        zm(0, 0) = z;
        const supq::TruncationReport rep =
            supq::truncated_poincare(sig, N, mm, l, supq::DomainPoint(sig, zm), bound);
        py::dict d;
        d["bound"] = rep.bound;
        d["terms_used"] = rep.terms_used;
        d["partial_value"] = rep.partial_value;
        d["tail_indicator"] = rep.tail_indicator;
        return d;
      },
      py::arg("N"), py::arg("m"), py::arg("l"), py::arg("z") = std::complex<double>(0.0),
      py::arg("bound") = 2,
      "Scalar-ball truncated series report at one norm bound.");

  m.def(
      "run_suite",
      [](const std::string &name, std::uint64_t seed) {
        const supq::SuiteReport rep = supq::run_suite(name, seed);
        py::dict d;
        d["suite"] = rep.suite;
        d["passed"] = rep.passed;
        d["failed"] = rep.failed;
        d["failures"] = rep.failures;
        return d;
      },
      py::arg("name"), py::arg("seed") = std::uint64_t{0xA111},
      "Run one seeded property suite: rootdata, group, quadrature, or lemmas.");
}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "supq/errors.hpp"
#include "supq/threshold.hpp"

using namespace supq;

namespace {

N0Query query_11(int m, int l, RatioRoute route, double margin = 1e-6) {
  return N0Query(WeightSpec(Signature(1, 1), m), DetPower{l}, QuadConfig{}, margin, route);
}

} // namespace

TEST_CASE("query validation") {
  CHECK_THROWS_AS(N0Query(WeightSpec(Signature(1, 1), 3), ConstantPoly{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(N0Query(WeightSpec(Signature(2, 1), 5), DetPower{1}), std::invalid_argument);
  CHECK_NOTHROW(N0Query(WeightSpec(Signature(2, 1), 5), DetPower{0}));
  CHECK_THROWS_AS(N0Query(WeightSpec(Signature(1, 1), 3), DetPower{0}, QuadConfig{}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(N0Query(WeightSpec(Signature(2, 2), 7), DetPower{0}, QuadConfig{}, 1e-6,
                          RatioRoute::closed_form_1d),
                  std::invalid_argument);
  MonomialSum z11;
  z11.terms.push_back({{{1}}, 1.0});
  CHECK_THROWS_AS(N0Query(WeightSpec(Signature(1, 1), 3), z11, QuadConfig{}, 1e-6,
                          RatioRoute::closed_form_1d),
                  std::invalid_argument);
  CHECK_THROWS_AS(ratio(query_11(3, 0, RatioRoute::generic), 0), std::invalid_argument);
}

TEST_CASE("scalar closed-form ratios") {
  // m = 3, l = 0 reduces to 1 - sqrt(1 - nu_2(N)); values frozen from a
  // 50-digit evaluation of that antiderivative.
  const N0Query q30 = query_11(3, 0, RatioRoute::closed_form_1d);
  const RatioValue r7 = ratio(q30, 7);
  CHECK(r7.value == doctest::Approx(0.5022061810361735).epsilon(1e-12));
  CHECK(r7.value > 0.5);
  const RatioValue r6 = ratio(q30, 6);
  CHECK(r6.value == doctest::Approx(0.46860965747608957).epsilon(1e-12));
  CHECK(r6.value < 0.5);

  // m = 4, l = 0: flat beta density, so the ratio is the endpoint itself.
  const RatioValue r3 = ratio(query_11(4, 0, RatioRoute::closed_form_1d), 3);
  CHECK(r3.value == doctest::Approx(0.5194938532959157).epsilon(1e-12));
  CHECK(r3.value > 0.5);

  // Frozen beta-function value for a nontrivial (l, m) pair.
  const RatioValue r25 = ratio(query_11(5, 2, RatioRoute::closed_form_1d), 10);
  CHECK(r25.value == doctest::Approx(0.8283980278385817).epsilon(1e-12));
}

TEST_CASE("generic route matches the scalar reduction") {
  for (int m : {3, 5, 8}) {
    for (int l : {0, 2, 5}) {
      for (int N : {3, 7, 20}) {
        const RatioValue closed = ratio(query_11(m, l, RatioRoute::closed_form_1d), N);
        const RatioValue quad = ratio(query_11(m, l, RatioRoute::generic), N);
        CHECK(quad.value == doctest::Approx(closed.value).epsilon(1e-9));
        CHECK(quad.abs_err < 1e-8);
      }
    }
  }

  // Constant poly behaves as l = 0 regardless of scale.
  const N0Query qc(WeightSpec(Signature(1, 1), 6), ConstantPoly{cplx(0.0, -3.0)});
  const RatioValue rc = ratio(qc, 5);
  const RatioValue r0 = ratio(query_11(6, 0, RatioRoute::generic), 5);
  CHECK(rc.value == doctest::Approx(r0.value).epsilon(1e-12));
}

TEST_CASE("ratio increases with the level") {
  const N0Query q = query_11(5, 1, RatioRoute::closed_form_1d);
  RatioValue prev = ratio(q, 3);
  for (int N = 4; N <= 30; ++N) {
    const RatioValue cur = ratio(q, N);
    CHECK(cur.value > prev.value - 2.0 * cur.abs_err);
    prev = cur;
  }
  // Large levels push the truncation out and the ratio to 1.
  CHECK(ratio(q, 4000).value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("threshold search on published cells") {
  for (RatioRoute route : {RatioRoute::closed_form_1d, RatioRoute::generic}) {
    const N0Result a = find_n0(query_11(3, 0, route));
    CHECK(a.n0 == 7);
    CHECK(a.ratio_at_n0 > 0.5 + 1e-6);
    CHECK(a.decided_margin == doctest::Approx(a.ratio_at_n0 - 0.5));
    REQUIRE(a.ratio_below.has_value());
    CHECK(*a.ratio_below < 0.5);

    const N0Result b = find_n0(query_11(15, 12, route));
    CHECK(b.n0 == 3);
    CHECK(!b.ratio_below.has_value());

    const N0Result c = find_n0(query_11(4, 0, route));
    CHECK(c.n0 == 3);
  }

  // One q = 2 cell from the published grid, generic route only.
  const N0Query q2(WeightSpec(Signature(2, 2), 20), DetPower{12});
  const N0Result d = find_n0(q2);
  CHECK(d.n0 == 7);
  REQUIRE(d.ratio_below.has_value());
  CHECK(*d.ratio_below < 0.5);
}

TEST_CASE("monomial route and scale invariance") {
  // For (1, 1) the monomial |z| equals sqrt(x) on the whole compact orbit, so
  // the Monte Carlo route must land on the det^1 closed form, and rescaling
  // the poly by a constant cancels in the ratio exactly.
  MonomialSum z11, z11s;
  z11.terms.push_back({{{1}}, 1.0});
  z11s.terms.push_back({{{1}}, cplx(0.0, 3.7)});
  const N0Query qa(WeightSpec(Signature(1, 1), 5), z11);
  const N0Query qb(WeightSpec(Signature(1, 1), 5), z11s);
  const N0Query qdet = query_11(5, 1, RatioRoute::closed_form_1d);

  const RatioValue ra = ratio(qa, 6);
  const RatioValue rb = ratio(qb, 6);
  // Same seeded draws; the scale cancels up to |c z| vs |c||z| rounding.
  CHECK(ra.value == doctest::Approx(rb.value).epsilon(1e-12));
  CHECK(std::abs(ra.value - ratio(qdet, 6).value) <= 10.0 * ra.abs_err + 1e-10);

  const N0Result na = find_n0(qa);
  const N0Result nb = find_n0(qb);
  const N0Result nd = find_n0(qdet);
  CHECK(na.n0 == nb.n0);
  CHECK(na.n0 == nd.n0);

  // q = 2 corner monomial: genuinely k-dependent, so refinement deltas bottom
  // out at the integrated sampling noise and the caller must budget for it.
  MonomialSum corner;
  corner.terms.push_back({{{1, 0}, {0, 0}}, 1.0});
  QuadConfig loose;
  loose.rel_tol = 3e-3;
  loose.min_points_per_axis = 8;
  loose.max_points_per_axis = 32;
  const N0Query qm(WeightSpec(Signature(2, 2), 8), corner, loose);
  const RatioValue rm = ratio(qm, 8);
  CHECK(rm.value > 0.0);
  CHECK(rm.value < 1.0);
  CHECK(rm.abs_err > 0.0);
  CHECK(rm.value == ratio(qm, 8).value);  // deterministic draws per grid point
}

TEST_CASE("table reproduction on golden subsets") {
  TableOptions opt;
  opt.route = RatioRoute::closed_form_1d;
  const TableGrid g1 = reproduce_table(Signature(1, 1), 0, 1, 3, 4, opt);
  REQUIRE(g1.cells.size() == 4);
  CHECK(g1.cells[0].result->n0 == 7);   // l=0, m=3
  CHECK(g1.cells[1].result->n0 == 3);   // l=0, m=4
  CHECK(g1.cells[2].result->n0 == 12);  // l=1, m=3
  CHECK(g1.cells[3].result->n0 == 5);   // l=1, m=4

  CHECK(to_csv(g1) == "l,m,n0\n0,3,7\n0,4,3\n1,3,12\n1,4,5\n");
  const std::string js = to_json(g1);
  CHECK(js.find("{\"l\": 0, \"m\": 3, \"n0\": 7, \"ratio_at_n0\": ") != std::string::npos);
  CHECK(js.find("\"margin\": ") != std::string::npos);

  // Same cells through the quadrature route, multithreaded: identical bytes.
  TableOptions par = opt;
  par.route = RatioRoute::generic;
  par.threads = 4;
  TableOptions ser = par;
  ser.threads = 1;
  const TableGrid gp = reproduce_table(Signature(1, 1), 0, 1, 3, 4, par);
  const TableGrid gs = reproduce_table(Signature(1, 1), 0, 1, 3, 4, ser);
  CHECK(to_csv(gp) == to_csv(gs));
  CHECK(to_json(gp) == to_json(gs));
  CHECK(to_csv(gp) == to_csv(g1));

  CHECK_THROWS_AS(reproduce_table(Signature(1, 1), 0, 1, 2, 4, opt), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_table(Signature(2, 1), 0, 1, 5, 6, TableOptions{}),
                  std::invalid_argument);
}

TEST_CASE("golden csv round trip and comparison") {
  const char *path = "/tmp/supq_test_golden.csv";
  {
    std::ofstream out(path);
    out << "l,m,n0\n0,3,7\n0,4,3\n1,3,12\n1,4,5\n2,3,16\n";
  }
  const std::vector<GoldenEntry> golden = load_golden_csv(path);
  REQUIRE(golden.size() == 5);
  CHECK(golden[0].l == 0);
  CHECK(golden[0].m == 3);
  CHECK(golden[0].n0 == 7);
  CHECK(golden[4].n0 == 16);

  TableOptions opt;
  opt.route = RatioRoute::closed_form_1d;
  const TableGrid grid = reproduce_table(Signature(1, 1), 0, 1, 3, 4, opt);
  const MatchReport rep = compare_with_golden(grid, golden);
  CHECK(rep.total == 5);
  CHECK(rep.matched == 4);
  REQUIRE(rep.mismatches.size() == 1);
  CHECK(rep.mismatches[0] == "l=2 m=3: outside the computed grid");

  std::vector<GoldenEntry> wrong = {{0, 3, 8}};
  const MatchReport bad = compare_with_golden(grid, wrong);
  CHECK(bad.matched == 0);
  CHECK(bad.mismatches[0] == "l=0 m=3: got 7, want 8");

  std::remove(path);
  CHECK_THROWS_AS(load_golden_csv("/tmp/supq_no_such_file.csv"), Error);
}

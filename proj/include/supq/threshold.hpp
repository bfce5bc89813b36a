#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supq/integrand.hpp"
#include "supq/quadrature.hpp"

namespace supq {

// Which route evaluates the mass ratio. The generic route integrates the
// compact average against mu over the truncated simplex; closed_form_1d is
// the p = q = 1 incomplete-beta reduction (Constant or DetPower only).
enum class RatioRoute { generic, closed_form_1d };

struct N0Query {
  WeightSpec weight;  // carries the signature
  PolySpec poly;
  QuadConfig cfg;
  double margin = 1e-6;
  RatioRoute route = RatioRoute::generic;

  N0Query(WeightSpec w, PolySpec f, QuadConfig c = {}, double margin_ = 1e-6,
          RatioRoute route_ = RatioRoute::generic);
  Signature sig() const { return weight.sig; }
};

struct RatioValue {
  double value = 0.0;
  double abs_err = 0.0;
};

// Truncated-to-full mass ratio at level N. Shares nothing across calls; the
// scan in find_n0 uses an internal engine that computes the denominator once.
RatioValue ratio(const N0Query &query, int N);

struct N0Result {
  int n0 = 3;
  double ratio_at_n0 = 0.0;
  // Ratio one level below the threshold; absent when n0 = 3 (the scan floor).
  std::optional<double> ratio_below;
  // Clearance ratio_at_n0 - 1/2 backing the stop decision.
  double decided_margin = 0.0;
};

// Minimal N >= 3 with ratio above 1/2, by linear scan (the ratio increases in
// N). Stopping at N demands clearance above max(margin, 10 * abs_err);
// passing N demands only 1/2 - ratio > 10 * abs_err, since a level that is
// genuinely short of 1/2 by less than the margin must still be passed, not
// reported as the answer. Blocked decisions escalate the node budget x2 up to
// a hard cap, then throw UndecidedError.
N0Result find_n0(const N0Query &query);

struct TableCell {
  int l = 0, m = 0;
  std::optional<N0Result> result;  // empty = undecided at the precision cap
};

struct TableGrid {
  Signature sig;
  int l_lo = 0, l_hi = 0, m_lo = 0, m_hi = 0;
  std::vector<TableCell> cells;  // l-major, m inner
};

struct TableOptions {
  QuadConfig cfg;
  double margin = 1e-6;
  RatioRoute route = RatioRoute::generic;
  int threads = 1;
};

// find_n0 over the l x m rectangle with f = det^l and weight chi_m. Cells are
// independent; they are farmed out in strides and merged in grid order, so
// the output is identical for any thread count.
TableGrid reproduce_table(Signature sig, int l_lo, int l_hi, int m_lo, int m_hi,
                          const TableOptions &opt);

// "l,m,n0" rows; undecided cells print "undecided" in the n0 column.
std::string to_csv(const TableGrid &grid);
// Array of {l, m, n0, ratio_at_n0, margin}; undecided cells carry null n0.
std::string to_json(const TableGrid &grid);

struct GoldenEntry {
  int l = 0, m = 0, n0 = 0;
};

std::vector<GoldenEntry> load_golden_csv(const std::string &path);

struct MatchReport {
  int matched = 0;
  int total = 0;
  std::vector<std::string> mismatches;
};

// Compares computed n0 against golden (l, m, n0) rows; entries outside the
// grid count as mismatches, as do undecided cells.
MatchReport compare_with_golden(const TableGrid &grid, const std::vector<GoldenEntry> &golden);

} // namespace supq

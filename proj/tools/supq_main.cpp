#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supq/arithmetic.hpp"
#include "supq/errors.hpp"
#include "supq/group.hpp"
#include "supq/integrand.hpp"
#include "supq/quadrature.hpp"
#include "supq/rootdata.hpp"
#include "supq/threshold.hpp"
#include "supq/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;

#ifndef SUPQ_DATA_DIR
#define SUPQ_DATA_DIR "data"
#endif

// Shortest round-trip decimal; keeps output byte-stable across runs.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Range {
  int lo = 0, hi = 0;
};

Range parse_range(const std::string &text) {
  Range r;
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos) {
    r.lo = r.hi = std::stoi(text);
    return r;
  }
  r.lo = std::stoi(text.substr(0, dots));
  r.hi = std::stoi(text.substr(dots + 2));
  if (r.hi < r.lo) throw std::invalid_argument("empty range: " + text);
  return r;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char *env = std::getenv("THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

supq::RatioRoute parse_route(const std::string &name) {
  if (name == "generic") return supq::RatioRoute::generic;
  if (name == "closed") return supq::RatioRoute::closed_form_1d;
  throw std::invalid_argument("unknown route: " + name);
}

supq::PolySpec build_poly(int l, const std::string &fspec) {
  if (!fspec.empty()) return supq::parse_poly(fspec);
  if (l == 0) return supq::ConstantPoly{};
  return supq::DetPower{l};
}

// ---- n0 -------------------------------------------------------------------

struct N0Args {
  int p = 0, q = 0, m = 0;
  std::optional<int> l;
  std::string fspec;
  double margin = 1e-6;
  double rel_tol = 1e-10;
  int max_points = 400;
  std::string route = "generic";
  bool json = false;
};

int run_n0(const N0Args &a) {
  if (a.l.has_value() == !a.fspec.empty())
    throw std::invalid_argument("give exactly one of --l and --f");
  const supq::Signature sig(a.p, a.q);
  supq::N0Query query(supq::WeightSpec(sig, a.m), build_poly(a.l.value_or(0), a.fspec),
                      supq::QuadConfig{}, a.margin, parse_route(a.route));
  query.cfg.rel_tol = a.rel_tol;
  query.cfg.max_points_per_axis = a.max_points;
  const supq::N0Result res = supq::find_n0(query);
  if (a.json) {
    std::string out = "{\"n0\": " + std::to_string(res.n0) +
                      ", \"ratio_at_n0\": " + fmt(res.ratio_at_n0) +
                      ", \"margin\": " + fmt(res.decided_margin);
    if (res.ratio_below) out += ", \"ratio_below\": " + fmt(*res.ratio_below);
    std::printf("%s}\n", out.c_str());
  } else {
    std::printf("n0=%d\n", res.n0);
    std::printf("ratio_at_n0=%s\n", fmt(res.ratio_at_n0).c_str());
    std::printf("margin=%s\n", fmt(res.decided_margin).c_str());
    if (res.ratio_below) std::printf("ratio_below=%s\n", fmt(*res.ratio_below).c_str());
  }
  return kExitOk;
}

// ---- table ----------------------------------------------------------------

struct TableArgs {
  int p = 0;
  std::string l_range, m_range;
  bool check_paper = false;
  bool json = false;
  double margin = 1e-6;
  double rel_tol = 1e-10;
  std::string route;
  int threads = 0;
  std::string data_dir = SUPQ_DATA_DIR;
};

int run_table(const TableArgs &a) {
  if (a.p != 1 && a.p != 2) throw std::invalid_argument("--p must be 1 or 2");
  const supq::Signature sig(a.p, a.p);
  Range lr{0, 12};
  Range mr = (a.p == 1) ? Range{3, 15} : Range{7, 20};
  if (!a.l_range.empty()) lr = parse_range(a.l_range);
  if (!a.m_range.empty()) mr = parse_range(a.m_range);

  supq::TableOptions opts;
  opts.cfg.rel_tol = a.rel_tol;
  opts.margin = a.margin;
  opts.route = a.route.empty() ? supq::RatioRoute::generic : parse_route(a.route);
  opts.threads = resolve_threads(a.threads);
  const supq::TableGrid grid = supq::reproduce_table(sig, lr.lo, lr.hi, mr.lo, mr.hi, opts);

  bool any_undecided = false;
  for (const auto &cell : grid.cells) any_undecided = any_undecided || !cell.result.has_value();

  if (a.check_paper) {
    const std::string path =
        a.data_dir + (a.p == 1 ? "/table1.csv" : "/table2.csv");
    const auto golden = supq::load_golden_csv(path);
    const supq::MatchReport rep = supq::compare_with_golden(grid, golden);
    for (const auto &line : rep.mismatches) std::printf("mismatch: %s\n", line.c_str());
    std::printf("%d/%d match\n", rep.matched, rep.total);
    if (any_undecided) return kExitUndecided;
    return rep.matched == rep.total ? kExitOk : kExitFailure;
  }

  if (a.json)
    std::fputs(supq::to_json(grid).c_str(), stdout);
  else
    std::fputs(supq::to_csv(grid).c_str(), stdout);
  return any_undecided ? kExitUndecided : kExitOk;
}

// ---- verify ---------------------------------------------------------------

int run_verify(const std::string &suite, std::uint64_t seed) {
  std::vector<supq::SuiteReport> reports;
  if (suite == "all")
    reports = supq::run_all_suites(seed);
  else
    reports.push_back(supq::run_suite(suite, seed));
  long failed = 0;
  for (const auto &rep : reports) {
    std::printf("suite %s: %ld passed, %ld failed\n", rep.suite.c_str(), rep.passed, rep.failed);
    for (const auto &f : rep.failures) std::printf("  fail: %s\n", f.c_str());
    failed += rep.failed;
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

// ---- poincare -------------------------------------------------------------

struct PoincareArgs {
  int p = 1, q = 1;
  long N = 3;
  int m = 4, l = 0;
  std::string z = "0,0";
  std::vector<long long> bounds;
};

int run_poincare(const PoincareArgs &a) {
  if (a.p != 1 || a.q != 1)
    throw std::invalid_argument("series reproduction is wired for --p 1 --q 1");
  const std::size_t comma = a.z.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--z expects re,im");
  const double zre = std::stod(a.z.substr(0, comma));
  const double zim = std::stod(a.z.substr(comma + 1));
  const supq::Signature sig(1, 1);
  supq::CMatrix zm(1, 1);
  zm(0, 0) = supq::cplx(zre, zim);
  const supq::DomainPoint z(sig, zm);  // rejects |z| >= 1
  for (const long long bound : a.bounds) {
    const supq::TruncationReport rep = supq::truncated_poincare(sig, a.N, a.m, a.l, z, bound);
    std::printf("{\"bound\": %lld, \"terms_used\": %ld, \"partial_value\": [%s, %s], "
                "\"tail_indicator\": %s}\n",
                rep.bound, rep.terms_used, fmt(rep.partial_value.real()).c_str(),
                fmt(rep.partial_value.imag()).c_str(), fmt(rep.tail_indicator).c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"numerical reproduction toolkit for indefinite-unitary threshold tables"};
  app.require_subcommand(1);
  std::uint64_t seed = 0xA111;
  app.add_option("--seed", seed, "seed for randomized suites")->capture_default_str();

  N0Args n0;
  CLI::App *cmd_n0 = app.add_subcommand("n0", "smallest level with mass ratio above 1/2");
  cmd_n0->add_option("--p", n0.p, "rows of the matrix ball")->required();
  cmd_n0->add_option("--q", n0.q, "columns of the matrix ball")->required();
  cmd_n0->add_option("--m", n0.m, "weight")->required();
  int n0_l = 0;
  CLI::Option *optl = cmd_n0->add_option("--l", n0_l, "determinant power");
  cmd_n0->add_option("--f", n0.fspec, "polynomial spec (overrides --l)");
  cmd_n0->add_option("--margin", n0.margin, "decision margin")->capture_default_str();
  cmd_n0->add_option("--rel-tol", n0.rel_tol, "quadrature relative tolerance")
      ->capture_default_str();
  cmd_n0->add_option("--max-points", n0.max_points, "quadrature node cap per axis")
      ->capture_default_str();
  cmd_n0->add_option("--route", n0.route, "ratio route: generic|closed")->capture_default_str();
  cmd_n0->add_flag("--json", n0.json, "emit a JSON object");

  TableArgs table;
  CLI::App *cmd_table = app.add_subcommand("table", "reproduce a threshold grid");
  cmd_table->add_option("--p", table.p, "1 for the scalar ball, 2 for the 2x2 ball")->required();
  cmd_table->add_option("--l", table.l_range, "l range, e.g. 0..12 or 3");
  cmd_table->add_option("--m", table.m_range, "m range, e.g. 3..15 or 4");
  cmd_table->add_flag("--check-paper", table.check_paper,
                      "compare against the bundled reference tables");
  cmd_table->add_flag("--json", table.json, "emit JSON instead of CSV");
  cmd_table->add_option("--margin", table.margin, "decision margin")->capture_default_str();
  cmd_table->add_option("--rel-tol", table.rel_tol, "quadrature relative tolerance")
      ->capture_default_str();
  cmd_table->add_option("--route", table.route, "ratio route: generic|closed");
  cmd_table->add_option("--threads", table.threads, "worker threads (overrides THREADS)");
  cmd_table->add_option("--data-dir", table.data_dir, "directory with the reference tables")
      ->capture_default_str();

  std::string suite;
  CLI::App *cmd_verify = app.add_subcommand("verify", "run a property suite");
  cmd_verify->add_option("--suite", suite, "rootdata|group|quadrature|lemmas|all")
      ->required()
      ->check(CLI::IsMember({"rootdata", "group", "quadrature", "lemmas", "all"}));

  PoincareArgs poin;
  CLI::App *cmd_poincare = app.add_subcommand("poincare", "truncated series reports");
  cmd_poincare->add_option("--p", poin.p)->required();
  cmd_poincare->add_option("--q", poin.q)->required();
  cmd_poincare->add_option("--N", poin.N, "congruence level")->required();
  cmd_poincare->add_option("--m", poin.m, "weight")->required();
  cmd_poincare->add_option("--l", poin.l, "determinant power")->required();
  cmd_poincare->add_option("--z", poin.z, "evaluation point re,im")->capture_default_str();
  cmd_poincare->add_option("--bounds", poin.bounds, "norm bounds")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(cmd_n0)) {
      if (optl->count() > 0) n0.l = n0_l;
      return run_n0(n0);
    }
    if (app.got_subcommand(cmd_table)) return run_table(table);
    if (app.got_subcommand(cmd_verify)) return run_verify(suite, seed);
    if (app.got_subcommand(cmd_poincare)) return run_poincare(poin);
  } catch (const supq::UndecidedError &e) {
    std::fprintf(stderr, "undecided: %s\n", e.what());
    return kExitUndecided;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const supq::DimensionError &e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is nonzero when any
// non-advisory criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "jtmat/bench.hpp"
#include "jtmat/bif.hpp"
#include "jtmat/native_io.hpp"
#include "jtmat/oracle.hpp"

using namespace jtmat;
using jtmat::testing::data_path;
using jtmat::testing::random_dp_instance;
using jtmat::testing::random_network;
using jtmat::testing::reevaluate_dp_objective;
using jtmat::testing::restrict_network;
using jtmat::testing::TestRng;

namespace {

struct Outcome {
  bool pass = true;
  bool advisory = false;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const Outcome& outcome) {
  const char* tag = outcome.pass ? "PASS" : (outcome.advisory ? "WARN" : "FAIL");
  std::printf("[%s] criterion %d: %s — %s\n", tag, number, name.c_str(), outcome.detail.c_str());
  if (!outcome.pass && !outcome.advisory) ++failures;
}

std::vector<Query> random_queries(const JunctionTree& jt, int n, int max_size, TestRng& rng) {
  std::vector<Query> out;
  int vars = static_cast<int>(jt.variables.size());
  for (int i = 0; i < n; ++i) {
    std::vector<int> ids;
    int size = rng.in(1, max_size);
    for (int s = 0; s < size; ++s) ids.push_back(rng.below(vars));
    out.push_back({make_scope(std::move(ids)), 1});
  }
  return out;
}

// --------------------------------------------------------------------------
// 1. Calibration exactness against full-joint enumeration
// --------------------------------------------------------------------------
Outcome criterion_calibration() {
  Outcome out;
  double worst = 0.0;
  Catalog empty;

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BayesianNetwork bn = random_network(8 + static_cast<int>(seed % 9), {2}, 3, seed * 101);
    JunctionTree jt = build_junction_tree(bn);
    DiscreteFactor joint = oracle_joint(bn);
    for (const CliqueNode& c : jt.cliques) {
      worst = std::max(worst, c.potential.max_abs_diff(marginalize(joint, c.scope)));
    }
    TestRng rng(seed);
    for (const Query& q : random_queries(jt, 10, 3, rng)) {
      QueryResult r = answer_query(jt, q, empty);
      worst = std::max(worst,
                       r.answer.max_abs_diff(normalize(marginalize(joint, q.variables))));
    }
  }

  // Child, restricted to an ancestrally closed prefix whose joint state
  // space stays enumerable.
  BayesianNetwork child = parse_bif_file(data_path("child.bif"));
  std::vector<int> order = topological_order(child);
  std::vector<int> keep;
  std::int64_t states = 1;
  for (int v : order) {
    std::int64_t next = states * child.variables[static_cast<std::size_t>(v)].cardinality;
    if (next > (1 << 20)) break;
    states = next;
    keep.push_back(v);
  }
  BayesianNetwork sub = restrict_network(child, keep);
  JunctionTree jt = build_junction_tree(sub);
  DiscreteFactor joint = oracle_joint(sub);
  for (const CliqueNode& c : jt.cliques) {
    worst = std::max(worst, c.potential.max_abs_diff(marginalize(joint, c.scope)));
  }
  TestRng rng(7);
  for (const Query& q : random_queries(jt, 30, 3, rng)) {
    QueryResult r = answer_query(jt, q, empty);
    worst = std::max(worst, r.answer.max_abs_diff(normalize(marginalize(joint, q.variables))));
  }

  out.pass = worst <= 1e-9;
  std::ostringstream d;
  d << "20 random binary networks plus a " << keep.size() << "-variable Child subnetwork ("
    << states << " joint states); worst deviation " << worst;
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 2. DP optimality vs exhaustive oracles
// --------------------------------------------------------------------------
Outcome criterion_dp_optimality() {
  Outcome out;
  double worst = 0.0;
  int sosp_nontrivial = 0, mosp_nontrivial = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    // Single-shortcut problem on trees of up to 12 cliques.
    {
      auto inst = random_dp_instance(12, seed);
      std::int64_t budget = 10 + static_cast<std::int64_t>(seed % 41);
      CostGrid grid = epsilon_grid(budget, 1.0);
      DPStateSingle dp = lrdp(inst.jt, inst.jt.pivot, budget, inst.log, grid);
      OracleSospResult oracle = oracle_sosp(inst.jt, inst.jt.pivot, budget, inst.log);
      double dp_value = dp.P[0].back();
      if (std::abs(dp_value - oracle.benefit) > 1e-9 * std::max(1.0, oracle.benefit)) {
        out.pass = false;
      }
      if (oracle.benefit > 0.0) ++sosp_nontrivial;
      SingleSolutions sol = reconstruct_single(inst.jt, std::move(dp));
      if (sol.shortcut.back().has_value()) {
        double reeval = reevaluate_dp_objective(inst.jt, *sol.shortcut.back(), inst.log);
        worst = std::max(worst, std::abs(reeval - sol.dp.P[0].back()));
      }
    }
    // Disjoint packing on trees of up to 10 cliques.
    {
      auto inst = random_dp_instance(10, seed + 1000);
      std::int64_t budget = 10 + static_cast<std::int64_t>(seed % 41);
      CostGrid grid = epsilon_grid(budget, 1.0);
      auto roots = solve_all_roots(inst.jt, inst.log, budget, grid);
      DPStateMulti dp = budp(inst.jt, budget, roots, grid);
      OracleMospResult oracle = oracle_mosp(inst.jt, budget, inst.log);
      double dp_value = dp.H[static_cast<std::size_t>(inst.jt.pivot)].back();
      if (std::abs(dp_value - oracle.benefit) > 1e-9 * std::max(1.0, oracle.benefit)) {
        out.pass = false;
      }
      if (oracle.benefit > 0.0) ++mosp_nontrivial;
      Catalog cat = reconstruct_multi(inst.jt, dp, roots, budget);
      double reeval = 0.0;
      for (const ShortcutPotential& s : cat.shortcuts) {
        reeval += reevaluate_dp_objective(inst.jt, s, inst.log);
      }
      worst = std::max(worst, std::abs(reeval - dp_value));
    }
  }
  out.pass = out.pass && worst <= 1e-9;
  std::ostringstream d;
  d << "50 SOSP + 50 MOSP instances (" << sosp_nontrivial << "/" << mosp_nontrivial
    << " with positive optimum); objectives equal the oracles exactly, reconstruction drift "
    << worst;
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 3. Junction-tree structure vs the published benchmark profiles
// --------------------------------------------------------------------------
Outcome criterion_structure() {
  struct Expect {
    const char* file;
    int cliques, treewidth;
  };
  const Expect expected[] = {
      {"child.bif", 17, 3}, {"hepar2.bif", 58, 6}, {"hailfinder.bif", 43, 4}};
  Outcome out;
  std::ostringstream d;
  for (const Expect& e : expected) {
    BayesianNetwork bn = parse_bif_file(data_path(e.file));
    JunctionTree jt = build_junction_tree(bn);
    bool clique_ok = std::abs(jt.num_cliques() - e.cliques) <= 2;
    bool tw_ok = jt.treewidth() <= e.treewidth + 1;
    if (!clique_ok || !tw_ok) out.pass = false;
    d << e.file << " cliques " << jt.num_cliques() << " (expect " << e.cliques
      << "+/-2) treewidth " << jt.treewidth() << " (expect <= " << e.treewidth + 1 << "); ";
  }
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 4. Savings non-negativity and exactness under materialization
// --------------------------------------------------------------------------
struct SavingsRun {
  SavingsReport peanut, plus;
  std::int64_t budget = 0;
  MaterializeReport peanut_report, plus_report;
};

SavingsRun run_network_savings(const std::string& file, std::uint64_t seed) {
  BayesianNetwork bn = parse_bif_file(data_path(file));
  JunctionTree jt = build_junction_tree(bn);
  auto queries = generate_skewed(jt, 3000, {1, 5}, seed);
  auto [train, test] = split_train_test(queries, 2000);
  QueryLog log = estimate_probabilities(train);
  MaterializeOptions opts;
  opts.budget = 10 * jt.total_separator_size();
  opts.epsilon = 1.2;
  SavingsRun run;
  run.budget = opts.budget;
  opts.mode = MaterializeMode::Peanut;
  Catalog peanut = build_catalog(jt, log, opts, &run.peanut_report);
  opts.mode = MaterializeMode::PeanutPlus;
  Catalog plus = build_catalog(jt, log, opts, &run.plus_report);
  run.peanut = run_bench(jt, peanut, test, &run.peanut_report);
  run.plus = run_bench(jt, plus, test, &run.plus_report);
  return run;
}

Outcome criterion_savings(std::vector<SavingsRun>& runs) {
  Outcome out;
  const char* files[] = {"child.bif", "hepar2.bif", "hailfinder.bif"};
  std::ostringstream d;
  for (int i = 0; i < 3; ++i) {
    // run_bench itself verifies each answer against the no-catalog
    // baseline within 1e-9 and throws on deviation.
    SavingsRun run = run_network_savings(files[i], 20240000 + static_cast<std::uint64_t>(i));
    for (const SavingsRow& row : run.peanut.rows) {
      if (row.materialized_cost > row.baseline_cost) out.pass = false;
    }
    for (const SavingsRow& row : run.plus.rows) {
      if (row.materialized_cost > row.baseline_cost) out.pass = false;
    }
    d << files[i] << " mean savings peanut " << run.peanut.mean_savings_pct << "% / peanut+ "
      << run.plus.mean_savings_pct << "%; ";
    runs.push_back(std::move(run));
  }
  // Substitute headline check on Child at 10*b_T, eps 1.2.
  if (!(runs[0].plus.mean_savings_pct > 0.0)) out.pass = false;
  if (!(runs[0].plus.mean_savings_pct >= runs[0].peanut.mean_savings_pct)) out.pass = false;
  d << "Child: peanut+ mean > 0 and >= peanut mean; 1000 test queries per network, answers "
       "exact within 1e-9";
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 5. Epsilon-grid dominance
// --------------------------------------------------------------------------
Outcome criterion_grid_dominance() {
  Outcome out;
  std::ostringstream d;

  BayesianNetwork bn = parse_bif_file(data_path("child.bif"));
  JunctionTree jt = build_junction_tree(bn);
  auto queries = generate_skewed(jt, 1200, {1, 5}, 9);
  QueryLog log = estimate_probabilities(queries);
  std::int64_t budget = jt.total_separator_size();
  BenefitContext ctx = make_benefit_context(jt, log);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 1.2, 6.0}) {
    CostGrid grid = epsilon_grid(budget, eps);
    auto roots = solve_all_roots(jt, log, budget, grid, &ctx);
    double h = budp(jt, budget, roots, grid).H[static_cast<std::size_t>(jt.pivot)].back();
    d << "child eps " << eps << " benefit " << h << "; ";
    if (h > previous + 1e-9) out.pass = false;
    previous = h;
  }

  // Exactness of the eps=1 grid against the oracle on a small instance.
  auto inst = random_dp_instance(10, 424242);
  std::int64_t small_budget = 30;
  CostGrid grid = epsilon_grid(small_budget, 1.0);
  auto roots = solve_all_roots(inst.jt, inst.log, small_budget, grid);
  double h =
      budp(inst.jt, small_budget, roots, grid).H[static_cast<std::size_t>(inst.jt.pivot)].back();
  double oracle = oracle_mosp(inst.jt, small_budget, inst.log).benefit;
  if (std::abs(h - oracle) > 1e-9 * std::max(1.0, oracle)) out.pass = false;
  d << "eps=1 equals the packing oracle on a 10-clique instance (" << h << ")";
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 6. Budget accounting
// --------------------------------------------------------------------------
Outcome criterion_budget(const std::vector<SavingsRun>& runs) {
  Outcome out;
  std::ostringstream d;
  for (const SavingsRun& run : runs) {
    if (run.peanut_report.actual_budget > run.budget) out.pass = false;
    if (run.plus_report.actual_budget > run.budget) out.pass = false;
  }
  // The disjointness constraint leaves slack that greedy packing reclaims.
  const SavingsRun& child = runs[0];
  if (!(child.plus_report.actual_budget >= child.peanut_report.actual_budget)) out.pass = false;
  d << "actual <= target in all " << 2 * runs.size() << " runs; Child target " << child.budget
    << ", peanut actual " << child.peanut_report.actual_budget << ", peanut+ actual "
    << child.plus_report.actual_budget;
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 7. Cost model vs wall clock (advisory)
// --------------------------------------------------------------------------
Outcome criterion_cost_correlation() {
  Outcome out;
  out.advisory = true;
  BayesianNetwork bn = parse_bif_file(data_path("child.bif"));
  JunctionTree jt = build_junction_tree(bn);
  auto queries = generate_skewed(jt, 200, {1, 5}, 77);
  CardMap cards = jt.cardinalities();

  std::vector<double> costs, times;
  for (const Query& q : queries) {
    SteinerTree st = steiner_tree(jt, q);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 15; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      QueryResult r = message_passing(st, q, cards);
      auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
      if (rep == 0) costs.push_back(static_cast<double>(r.cost));
    }
    times.push_back(best);
  }
  double n = static_cast<double>(costs.size());
  double mc = 0, mt = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    mc += costs[i];
    mt += times[i];
  }
  mc /= n;
  mt /= n;
  double num = 0, dc = 0, dt = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    num += (costs[i] - mc) * (times[i] - mt);
    dc += (costs[i] - mc) * (costs[i] - mc);
    dt += (times[i] - mt) * (times[i] - mt);
  }
  double pearson = num / std::sqrt(dc * dt);
  out.pass = pearson >= 0.9;
  std::ostringstream d;
  d << "Pearson(cost, wall clock) = " << pearson << " over 200 Child queries"
    << (out.pass ? "" : " (advisory only: timers on constrained hardware are noisy)");
  out.detail = d.str();
  return out;
}

// --------------------------------------------------------------------------
// 8. Determinism
// --------------------------------------------------------------------------
Outcome criterion_determinism() {
  Outcome out;
  auto run_once = [&]() {
    BayesianNetwork bn = parse_bif_file(data_path("child.bif"));
    JunctionTree jt = build_junction_tree(bn);
    auto queries = generate_skewed(jt, 600, {1, 5}, 31);
    auto [train, test] = split_train_test(queries, 400);
    QueryLog log = estimate_probabilities(train);
    MaterializeOptions opts;
    opts.budget = 4 * jt.total_separator_size();
    opts.epsilon = 1.2;
    opts.mode = MaterializeMode::PeanutPlus;
    Catalog cat = build_catalog(jt, log, opts);
    std::string blob = serialize_tree(jt);
    blob += serialize_catalog(cat);
    blob += savings_csv(run_bench(jt, cat, test));
    blob += format_query_file(queries, jt.variables);
    return blob;
  };
  std::string first = run_once();
  std::string second = run_once();
  out.pass = first == second;

  // The command-line binary reproduces files byte for byte as well.
  std::string cli = JTMAT_CLI_PATH;
  std::string tmp = "acceptance_tmp";
  std::string cmd1 =
      cli + " build --network " + data_path("child.bif") + " --out " + tmp + "_a.jtt > /dev/null";
  std::string cmd2 =
      cli + " build --network " + data_path("child.bif") + " --out " + tmp + "_b.jtt > /dev/null";
  bool cli_ok = std::system(cmd1.c_str()) == 0 && std::system(cmd2.c_str()) == 0;
  if (cli_ok) {
    std::ifstream a(tmp + "_a.jtt"), b(tmp + "_b.jtt");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    cli_ok = !sa.str().empty() && sa.str() == sb.str();
  }
  std::remove((tmp + "_a.jtt").c_str());
  std::remove((tmp + "_b.jtt").c_str());
  out.pass = out.pass && cli_ok;
  out.detail = std::string("library pipeline outputs byte-identical across runs (") +
               std::to_string(first.size()) + " bytes); CLI tree files " +
               (cli_ok ? "byte-identical" : "differ");
  return out;
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  report(1, "calibration exactness", criterion_calibration());
  report(2, "DP optimality vs oracles", criterion_dp_optimality());
  report(3, "benchmark junction-tree structure", criterion_structure());
  std::vector<SavingsRun> runs;
  report(4, "savings non-negativity and exactness", criterion_savings(runs));
  report(5, "epsilon-grid dominance", criterion_grid_dominance());
  report(6, "budget accounting", criterion_budget(runs));
  report(7, "cost model correlation (advisory)", criterion_cost_correlation());
  report(8, "determinism", criterion_determinism());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance finished in %.1fs with %d failure(s)\n", secs, failures);
  return failures == 0 ? 0 : 1;
}

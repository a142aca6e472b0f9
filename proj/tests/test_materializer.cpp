#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "jtmat/materialize.hpp"
#include "jtmat/oracle.hpp"

using namespace jtmat;
using jtmat::testing::paper_example;
using jtmat::testing::PaperExample;
using jtmat::testing::random_dp_instance;

using jtmat::testing::reevaluate_dp_objective;

namespace {

QueryLog example_log(const PaperExample& ex) {
  std::vector<Query> raw;
  raw.push_back({make_scope({ex.b, ex.i, ex.f}), 4});
  raw.push_back({make_scope({ex.b, ex.l}), 2});
  raw.push_back({make_scope({ex.g, ex.h}), 1});
  raw.push_back({make_scope({ex.c, ex.f}), 1});
  return estimate_probabilities(raw);
}

}  // namespace

TEST_CASE("enumerate_cut reproduces the example shortcut data") {
  PaperExample ex = paper_example();
  CutInfo info = enumerate_cut(ex.jt, {ex.egh, ex.ce});
  CHECK(info.scope == make_scope({ex.c, ex.e, ex.g}));
  CHECK(info.cost == 8);
  CHECK(info.cut.size() == 3);

  // All cliques: empty cut, scalar table.
  std::vector<int> all;
  for (const CliqueNode& c : ex.jt.cliques) all.push_back(c.id);
  CutInfo whole = enumerate_cut(ex.jt, all);
  CHECK(whole.cut.empty());
  CHECK(whole.scope.empty());
  CHECK(whole.cost == 1);

  // Internal clique with two incident separators: scope is their union.
  CutInfo mid = enumerate_cut(ex.jt, {ex.ce});
  CHECK(mid.scope == make_scope({ex.c, ex.e}));

  // Disconnected node sets are rejected.
  CHECK_THROWS_AS(enumerate_cut(ex.jt, {ex.bc, ex.egh}), std::invalid_argument);
}

TEST_CASE("usefulness matches the example and fails off the tree") {
  PaperExample ex = paper_example();
  ShortcutPotential s = make_shortcut(ex.jt, {ex.egh, ex.ce});
  Query q{make_scope({ex.b, ex.i, ex.f}), 1};
  CHECK(usefulness(s, q, ex.jt));

  // Subtree disjoint from the Steiner tree: {gil} never touches bc-ce-ef.
  ShortcutPotential off = make_shortcut(ex.jt, {ex.gil});
  Query left{make_scope({ex.b, ex.c, ex.f}), 1};
  CHECK(!usefulness(off, left, ex.jt));

  // Swallowing a query variable's only home without covering it.
  ShortcutPotential shallow = make_shortcut(ex.jt, {ex.gil});
  Query needs_l{make_scope({ex.b, ex.l}), 1};
  CHECK(!usefulness(shallow, needs_l, ex.jt));  // l not in the cut scope
}

TEST_CASE("benefit_single sums clique sizes scaled by query cardinalities") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  BenefitContext ctx = make_benefit_context(ex.jt, log);

  ShortcutPotential s = make_shortcut(ex.jt, {ex.egh, ex.ce});
  Query q{make_scope({ex.b, ex.i, ex.f}), 1};

  // Not useful -> 0.
  Query inside{make_scope({ex.g, ex.h}), 1};
  CHECK(benefit_single(s, inside, ex.jt) == 0.0);

  // Independent recomputation walking subtrees explicitly.
  double expect = 0.0;
  for (int v : s.nodes) {
    double term = static_cast<double>(ex.jt.cliques[static_cast<std::size_t>(v)].size);
    std::set<int> below_vars;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int var : ex.jt.cliques[static_cast<std::size_t>(u)].scope) below_vars.insert(var);
      for (int c : ex.jt.children[static_cast<std::size_t>(u)]) stack.push_back(c);
    }
    for (int w : q.variables) {
      if (below_vars.count(w)) {
        term *= ex.jt.cardinalities()[static_cast<std::size_t>(w)];
      }
    }
    expect += term;
  }
  CHECK(benefit_single(s, q, ex.jt) == doctest::Approx(expect));
  CHECK(benefit_single(ctx, s, 0) == doctest::Approx(expect));
}

TEST_CASE("benefit_log averages single-query benefits by probability") {
  PaperExample ex = paper_example();
  ShortcutPotential s = make_shortcut(ex.jt, {ex.egh, ex.ce});

  QueryLog single = estimate_probabilities({{make_scope({ex.b, ex.i, ex.f}), 1}});
  CHECK(benefit_log(s, single, ex.jt) ==
        doctest::Approx(benefit_single(s, single.entries[0], ex.jt)));

  // No useful query -> 0.
  QueryLog useless = estimate_probabilities({{make_scope({ex.g, ex.h}), 1}});
  CHECK(benefit_log(s, useless, ex.jt) == 0.0);

  // Three-query uniform log: the average of the three singles.
  std::vector<Query> qs{{make_scope({ex.b, ex.i, ex.f}), 1},
                        {make_scope({ex.b, ex.l}), 1},
                        {make_scope({ex.c, ex.f}), 1}};
  QueryLog uniform = estimate_probabilities(qs);
  double expect = 0.0;
  for (const Query& q : qs) expect += benefit_single(s, q, ex.jt) / 3.0;
  CHECK(benefit_log(s, uniform, ex.jt) == doctest::Approx(expect));
}

TEST_CASE("path_stats matches direct recomputation") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  PathShortcutStats stats = path_stats(ex.jt, ex.bc, log);

  // Child of the root: V(S_v) = {root}.
  int child = ex.jt.children[static_cast<std::size_t>(ex.bc)][0];
  ShortcutPotential s_root = make_shortcut(ex.jt, {ex.bc});
  CHECK(stats.cost[static_cast<std::size_t>(child)] == s_root.cost);
  CHECK(stats.benefit[static_cast<std::size_t>(child)] ==
        doctest::Approx(benefit_log(s_root, log, ex.jt)));

  // Leaf at depth 3 (gil): the path covers bc, ce, egh.
  ShortcutPotential s_path = make_shortcut(ex.jt, {ex.bc, ex.ce, ex.egh});
  CHECK(stats.cost[static_cast<std::size_t>(ex.gil)] == s_path.cost);
  CHECK(stats.benefit[static_cast<std::size_t>(ex.gil)] ==
        doctest::Approx(benefit_log(s_path, log, ex.jt)));

  // A log no shortcut helps leaves every b at 0.
  QueryLog inclique = estimate_probabilities({{make_scope({ex.g, ex.h}), 1}});
  PathShortcutStats zero = path_stats(ex.jt, ex.bc, inclique);
  for (int v = 0; v < ex.jt.num_cliques(); ++v) {
    if (zero.in_subtree[static_cast<std::size_t>(v)]) {
      CHECK(zero.benefit[static_cast<std::size_t>(v)] == 0.0);
    }
  }
}

TEST_CASE("epsilon grids") {
  CHECK(epsilon_grid(10, 1.0) == CostGrid{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(epsilon_grid(10, 2.0) == CostGrid{0, 1, 2, 4, 8, 10});
  CHECK(epsilon_grid(0, 2.0) == CostGrid{0});
  CHECK_THROWS_AS(epsilon_grid(10, 0.5), std::invalid_argument);
}

TEST_CASE("lrdp finds nothing when the budget is below every path cost") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  CostGrid grid = epsilon_grid(1, 1.0);
  DPStateSingle dp = lrdp(ex.jt, ex.bc, 1, log, grid);
  CHECK(dp.value_at(static_cast<int>(grid.size()) - 1) == 0.0);
  SingleSolutions sol = reconstruct_single(ex.jt, std::move(dp));
  for (const auto& s : sol.shortcut) CHECK(!s.has_value());
}

TEST_CASE("lrdp equals the exhaustive oracle on the example tree") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  std::int64_t budget = 40;
  CostGrid grid = epsilon_grid(budget, 1.0);
  for (int root : internal_roots(ex.jt)) {
    DPStateSingle dp = lrdp(ex.jt, root, budget, log, grid);
    OracleSospResult oracle = oracle_sosp(ex.jt, root, budget, log);
    CHECK(dp.value_at(static_cast<int>(grid.size()) - 1) == doctest::Approx(oracle.benefit));
  }
}

TEST_CASE("lrdp and reconstruction agree with the oracle on random instances") {
  int nontrivial = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto inst = random_dp_instance(12, seed);
    std::int64_t budget = 10 + static_cast<std::int64_t>(seed % 41);  // up to 50
    CostGrid grid = epsilon_grid(budget, 1.0);
    int root = inst.jt.pivot;
    DPStateSingle dp = lrdp(inst.jt, root, budget, inst.log, grid);
    OracleSospResult oracle = oracle_sosp(inst.jt, root, budget, inst.log);
    double dp_value = dp.value_at(static_cast<int>(grid.size()) - 1);
    CHECK(dp_value == doctest::Approx(oracle.benefit).epsilon(1e-12));
    if (oracle.benefit > 0.0) ++nontrivial;

    SingleSolutions sol = reconstruct_single(inst.jt, std::move(dp));
    const auto& best = sol.shortcut.back();
    if (best.has_value()) {
      CHECK(reevaluate_dp_objective(inst.jt, *best, inst.log) ==
            doctest::Approx(sol.dp.value_at(static_cast<int>(grid.size()) - 1)).epsilon(1e-9));
    }
  }
  CHECK(nontrivial >= 20);  // the generator must exercise real instances
}

TEST_CASE("P is non-decreasing along the cost axis") {
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    auto inst = random_dp_instance(10, seed);
    CostGrid grid = epsilon_grid(25, 1.0);
    DPStateSingle dp = lrdp(inst.jt, inst.jt.pivot, 25, inst.log, grid);
    for (const auto& row : dp.P) {
      for (std::size_t g = 1; g < row.size(); ++g) CHECK(row[g] >= row[g - 1]);
    }
  }
}

TEST_CASE("star-shaped subtrees reduce to a knapsack over branches") {
  // Root 0 with three leaf children: every antichain is a subset of the
  // leaves.
  JunctionTree jt = jtmat::testing::synthetic_tree(4, {-1, 0, 0, 0}, {2, 2, 3, 2}, {2, 2, 2, 2});
  std::vector<Query> raw;
  raw.push_back({make_scope({3, 4}), 1});  // p0 and p1
  raw.push_back({make_scope({3, 5}), 2});  // p0 and p2
  raw.push_back({make_scope({4, 6}), 1});  // p1 and p3
  QueryLog log = estimate_probabilities(raw);
  std::int64_t budget = 30;
  CostGrid grid = epsilon_grid(budget, 1.0);
  DPStateSingle dp = lrdp(jt, 0, budget, log, grid);
  OracleSospResult oracle = oracle_sosp(jt, 0, budget, log);
  CHECK(dp.value_at(static_cast<int>(grid.size()) - 1) == doctest::Approx(oracle.benefit));
}

TEST_CASE("reconstruct_single returns the oracle argmax on a path fixture") {
  // Path of 4 cliques rooted at one end.
  JunctionTree jt = jtmat::testing::synthetic_tree(4, {-1, 0, 1, 2}, {2, 2, 2, 2}, {2, 3, 2, 3});
  std::vector<Query> raw;
  raw.push_back({make_scope({3, 6}), 3});  // ends of the path
  raw.push_back({make_scope({4, 6}), 1});
  QueryLog log = estimate_probabilities(raw);
  std::int64_t budget = 12;
  CostGrid grid = epsilon_grid(budget, 1.0);
  SingleSolutions sol = reconstruct_single(jt, lrdp(jt, 0, budget, log, grid));
  OracleSospResult oracle = oracle_sosp(jt, 0, budget, log);
  const auto& best = sol.shortcut.back();
  if (oracle.benefit > 0.0) {
    REQUIRE(best.has_value());
    CHECK(best->benefit == doctest::Approx(oracle.benefit));
    CHECK(best->nodes == oracle.nodes);
  } else {
    CHECK(!best.has_value());
  }
}

TEST_CASE("budp handles zero budget and matches exhaustive packing on random instances") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  CostGrid zero_grid = epsilon_grid(0, 1.0);
  auto roots0 = solve_all_roots(ex.jt, log, 0, zero_grid);
  DPStateMulti dp0 = budp(ex.jt, 0, roots0, zero_grid);
  for (int v = 0; v < ex.jt.num_cliques(); ++v) {
    for (double h : dp0.H[static_cast<std::size_t>(v)]) CHECK(h == 0.0);
  }
  Catalog empty = reconstruct_multi(ex.jt, dp0, roots0, 0);
  CHECK(empty.shortcuts.empty());

  int nontrivial = 0;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    auto inst = random_dp_instance(10, seed);
    std::int64_t budget = 10 + static_cast<std::int64_t>(seed % 41);
    CostGrid grid = epsilon_grid(budget, 1.0);
    auto roots = solve_all_roots(inst.jt, inst.log, budget, grid);
    DPStateMulti dp = budp(inst.jt, budget, roots, grid);
    OracleMospResult oracle = oracle_mosp(inst.jt, budget, inst.log);
    double dp_value = dp.H[static_cast<std::size_t>(inst.jt.pivot)].back();
    CHECK(dp_value == doctest::Approx(oracle.benefit).epsilon(1e-12));
    if (oracle.benefit > 0.0) ++nontrivial;

    Catalog cat = reconstruct_multi(inst.jt, dp, roots, budget);
    std::set<int> used;
    double total_benefit = 0.0;
    double reeval = 0.0;
    for (const ShortcutPotential& s : cat.shortcuts) {
      for (int v : s.nodes) CHECK(used.insert(v).second);
      total_benefit += s.benefit;
      reeval += reevaluate_dp_objective(inst.jt, s, inst.log);
    }
    CHECK(total_benefit == doctest::Approx(dp_value).epsilon(1e-9));
    CHECK(reeval == doctest::Approx(dp_value).epsilon(1e-9));
  }
  CHECK(nontrivial >= 20);
}

TEST_CASE("a two-shortcut fixture packs exactly those two") {
  // Star of three branches off the pivot, two of which carry all the
  // query mass; the third is never useful.
  JunctionTree jt = jtmat::testing::synthetic_tree(
      7, {-1, 0, 1, 0, 3, 0, 5}, {2, 2, 2, 2, 2, 2, 2}, {2, 3, 2, 3, 2, 2, 2});
  std::vector<Query> raw;
  raw.push_back({make_scope({6 + 0, 6 + 2}), 2});  // p0, p2: through branch 1
  raw.push_back({make_scope({6 + 0, 6 + 4}), 2});  // p0, p4: through branch 3
  QueryLog log = estimate_probabilities(raw);
  std::int64_t budget = 200;
  CostGrid grid = epsilon_grid(budget, 1.0);
  auto roots = solve_all_roots(jt, log, budget, grid);
  DPStateMulti dp = budp(jt, budget, roots, grid);
  Catalog cat = reconstruct_multi(jt, dp, roots, budget);
  OracleMospResult oracle = oracle_mosp(jt, budget, log);
  double total = 0.0;
  for (const ShortcutPotential& s : cat.shortcuts) total += s.benefit;
  CHECK(total == doctest::Approx(oracle.benefit));
  CHECK(dp.H[static_cast<std::size_t>(jt.pivot)].back() == doctest::Approx(oracle.benefit));
}

TEST_CASE("budp is monotone in the budget") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  double prev = -1.0;
  for (std::int64_t budget : {0, 8, 16, 24, 40, 64}) {
    CostGrid grid = epsilon_grid(budget, 1.0);
    auto roots = solve_all_roots(ex.jt, log, budget, grid);
    DPStateMulti dp = budp(ex.jt, budget, roots, grid);
    double h = dp.H[static_cast<std::size_t>(ex.jt.pivot)].back();
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("coarser grids never beat the full grid") {
  for (std::uint64_t seed = 200; seed < 215; ++seed) {
    auto inst = random_dp_instance(10, seed);
    std::int64_t budget = 30;
    double full_value;
    {
      CostGrid grid = epsilon_grid(budget, 1.0);
      auto roots = solve_all_roots(inst.jt, inst.log, budget, grid);
      full_value =
          budp(inst.jt, budget, roots, grid).H[static_cast<std::size_t>(inst.jt.pivot)].back();
    }
    for (double eps : {1.2, 2.0, 6.0}) {
      CostGrid grid = epsilon_grid(budget, eps);
      auto roots = solve_all_roots(inst.jt, inst.log, budget, grid);
      double coarse =
          budp(inst.jt, budget, roots, grid).H[static_cast<std::size_t>(inst.jt.pivot)].back();
      CHECK(coarse <= full_value + 1e-12);
    }
  }
}

TEST_CASE("greedy packing fills by ratio and respects the budget") {
  PaperExample ex = paper_example();
  auto make = [&](std::vector<int> nodes, double ratio, int id) {
    ShortcutPotential s = make_shortcut(ex.jt, std::move(nodes), id);
    s.ratio = ratio;
    s.benefit = ratio * static_cast<double>(s.cost);
    return s;
  };

  // Single candidate that fits.
  Catalog single = greedy_pack({make({ex.ce}, 1.0, 0)}, 100);
  CHECK(single.shortcuts.size() == 1);

  // Ratios 5, 3, 1; the first two (cost 4 each) exhaust the budget.
  ShortcutPotential a = make({ex.ce}, 5.0, 0);   // cut scope {c, e}
  ShortcutPotential b = make({ex.egh}, 3.0, 1);  // cut scope {e, g}
  ShortcutPotential c = make({ex.bc, ex.ce}, 1.0, 2);  // cut scope {e}
  REQUIRE(a.cost == 4);
  REQUIRE(b.cost == 4);
  Catalog two = greedy_pack({a, b, c}, 8);
  REQUIRE(two.shortcuts.size() == 2);
  CHECK(two.shortcuts[0].id == 0);
  CHECK(two.shortcuts[1].id == 1);
  CHECK(two.actual_budget == 8);

  // Duplicate cut sets are deduplicated before packing.
  ShortcutPotential dup = a;
  dup.id = 7;
  dup.benefit *= 0.5;
  dup.ratio *= 0.5;
  Catalog dedup = greedy_pack({a, dup, b}, 100);
  CHECK(dedup.shortcuts.size() == 2);
}

TEST_CASE("materialize_table produces the true joint of the cut scope") {
  PaperExample ex = paper_example();
  DiscreteFactor joint = oracle_joint(ex.bn);

  // Single clique: marginal onto its incident separators.
  ShortcutPotential one = make_shortcut(ex.jt, {ex.ce});
  DiscreteFactor t1 = materialize_table(ex.jt, one);
  CHECK(t1.max_abs_diff(normalize(marginalize(joint, one.scope))) < 1e-9);

  // The example shortcut: joint over {c, e, g}.
  ShortcutPotential s = make_shortcut(ex.jt, {ex.egh, ex.ce});
  DiscreteFactor table = materialize_table(ex.jt, s);
  CHECK(table.scope() == make_scope({ex.c, ex.e, ex.g}));
  CHECK(table.max_abs_diff(normalize(marginalize(joint, s.scope))) < 1e-9);
  CHECK(table.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("build_catalog keeps every mode within budget and exact") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  for (MaterializeMode mode : {MaterializeMode::Peanut, MaterializeMode::PeanutPlus}) {
    MaterializeOptions opts;
    opts.budget = 32;
    opts.epsilon = 1.0;
    opts.mode = mode;
    MaterializeReport report;
    Catalog cat = build_catalog(ex.jt, log, opts, &report);
    CHECK(cat.actual_budget <= opts.budget);
    CHECK(report.actual_budget == cat.actual_budget);
    for (const ShortcutPotential& s : cat.shortcuts) {
      CHECK(s.table.has_value());
      CHECK(s.table->sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(s.benefit > 0.0);
    }
    // Answers stay exact through the full pipeline.
    Catalog empty;
    for (const Query& q : log.entries) {
      QueryResult base = answer_query(ex.jt, q, empty);
      QueryResult mat = answer_query(ex.jt, q, cat);
      CHECK(mat.answer.max_abs_diff(base.answer) < 1e-9);
      CHECK(mat.cost <= base.cost);
    }
  }

  // Zero budget: empty catalog.
  MaterializeOptions zero;
  zero.budget = 0;
  zero.mode = MaterializeMode::Peanut;
  Catalog cat = build_catalog(ex.jt, log, zero);
  CHECK(cat.shortcuts.empty());
  CHECK(cat.actual_budget == 0);
}

TEST_CASE("peanut-plus uses at least the disjoint budget on a slack fixture") {
  PaperExample ex = paper_example();
  QueryLog log = example_log(ex);
  MaterializeOptions opts;
  opts.budget = 48;
  opts.epsilon = 1.0;
  opts.mode = MaterializeMode::Peanut;
  Catalog peanut = build_catalog(ex.jt, log, opts);
  opts.mode = MaterializeMode::PeanutPlus;
  Catalog plus = build_catalog(ex.jt, log, opts);
  CHECK(plus.actual_budget >= peanut.actual_budget);
}

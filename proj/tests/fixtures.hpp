#ifndef JTMAT_TESTS_FIXTURES_HPP
#define JTMAT_TESTS_FIXTURES_HPP

#include <cstdint>
#include <stdexcept>
#include <functional>
#include <random>
#include <vector>

#include "jtmat/bif.hpp"
#include "jtmat/junction_tree.hpp"
#include "jtmat/materialize.hpp"
#include "jtmat/network.hpp"
#include "jtmat/oracle.hpp"
#include "jtmat/query.hpp"
#include "jtmat/workload.hpp"

namespace jtmat::testing {

// ---------------------------------------------------------------------------
// Brute-force factor evaluation over full assignments
// ---------------------------------------------------------------------------

// Value of f under a full assignment given as var -> state (must cover f's
// scope).
inline double eval_at(const DiscreteFactor& f, const std::vector<int>& full_assign) {
  std::vector<int> local(f.scope().size());
  for (std::size_t i = 0; i < f.scope().size(); ++i) {
    local[i] = full_assign[static_cast<std::size_t>(f.scope()[i])];
  }
  return f.at(f.index_of(local));
}

// Runs fn over every full assignment of the given cardinalities.
inline void for_all_assignments(const CardMap& cards,
                                const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> assign(cards.size(), 0);
  while (true) {
    fn(assign);
    std::size_t i = cards.size();
    while (i-- > 0) {
      if (++assign[i] < cards[i]) break;
      assign[i] = 0;
      if (i == 0) return;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-random helpers (stable across platforms)
// ---------------------------------------------------------------------------

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int below(int n) { return std::min(static_cast<int>(unit() * n), n - 1); }
  int in(int lo, int hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

// Random DAG over `n` variables with the given cardinality choices; CPT
// entries random positive, rows normalized.
inline BayesianNetwork random_network(int n, const std::vector<int>& card_choices,
                                      int max_parents, std::uint64_t seed) {
  TestRng rng(seed);
  BayesianNetwork bn;
  for (int v = 0; v < n; ++v) {
    bn.variables.push_back({v, "x" + std::to_string(v),
                            card_choices[static_cast<std::size_t>(
                                rng.below(static_cast<int>(card_choices.size())))]});
  }
  bn.parents.resize(static_cast<std::size_t>(n));
  CardMap cards = bn.cardinalities();
  for (int v = 1; v < n; ++v) {
    int k = rng.below(std::min(max_parents, v) + 1);
    std::vector<int> pool(static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      int pick = rng.below(static_cast<int>(pool.size()));
      bn.parents[static_cast<std::size_t>(v)].push_back(pool[static_cast<std::size_t>(pick)]);
      pool.erase(pool.begin() + pick);
    }
    std::sort(bn.parents[static_cast<std::size_t>(v)].begin(),
              bn.parents[static_cast<std::size_t>(v)].end());
  }
  for (int v = 0; v < n; ++v) {
    Scope scope = make_scope([&] {
      std::vector<int> ids = bn.parents[static_cast<std::size_t>(v)];
      ids.push_back(v);
      return ids;
    }());
    std::vector<int> scope_cards(scope.size());
    for (std::size_t i = 0; i < scope.size(); ++i) {
      scope_cards[i] = cards[static_cast<std::size_t>(scope[i])];
    }
    std::int64_t total = table_size(scope, cards);
    std::vector<double> values(static_cast<std::size_t>(total));
    for (double& x : values) x = 0.05 + rng.unit();
    DiscreteFactor raw(scope, scope_cards, values);
    // Normalize child-conditional rows.
    Scope parent_scope = scope_difference(scope, {v});
    DiscreteFactor sums = marginalize(raw, parent_scope);
    DiscreteFactor cpt = divide(raw, sums);
    bn.cpts.push_back(std::move(cpt));
  }
  return bn;
}

// The running example used throughout the query/materializer tests: a tree
// whose cliques are bc, ce, ef, egh, gil with pivot bc. Variables are
// binary except h (4 states), which makes skipping the egh clique pay off
// under the operation-count cost model.
struct PaperExample {
  BayesianNetwork bn;
  JunctionTree jt;
  int b, c, e, f, g, h, i, l;           // variable ids
  int bc, ce, ef, egh, gil;             // clique ids
};

inline PaperExample paper_example() {
  // b; c|b; e|c; f|e; g|e; h|e,g; i|g; l|g,i  (all binary)
  std::string bif = R"(
network example {
}
variable b { type discrete [ 2 ] { 0, 1 }; }
variable c { type discrete [ 2 ] { 0, 1 }; }
variable e { type discrete [ 2 ] { 0, 1 }; }
variable f { type discrete [ 2 ] { 0, 1 }; }
variable g { type discrete [ 2 ] { 0, 1 }; }
variable h { type discrete [ 4 ] { 0, 1, 2, 3 }; }
variable i { type discrete [ 2 ] { 0, 1 }; }
variable l { type discrete [ 2 ] { 0, 1 }; }
probability ( b ) { table 0.3, 0.7; }
probability ( c | b ) { (0) 0.2, 0.8; (1) 0.6, 0.4; }
probability ( e | c ) { (0) 0.35, 0.65; (1) 0.55, 0.45; }
probability ( f | e ) { (0) 0.1, 0.9; (1) 0.75, 0.25; }
probability ( g | e ) { (0) 0.45, 0.55; (1) 0.25, 0.75; }
probability ( h | e, g ) { (0, 0) 0.3, 0.4, 0.2, 0.1; (0, 1) 0.1, 0.3, 0.4, 0.2; (1, 0) 0.15, 0.45, 0.25, 0.15; (1, 1) 0.5, 0.2, 0.2, 0.1; }
probability ( i | g ) { (0) 0.4, 0.6; (1) 0.7, 0.3; }
probability ( l | g, i ) { (0, 0) 0.25, 0.75; (0, 1) 0.5, 0.5; (1, 0) 0.65, 0.35; (1, 1) 0.05, 0.95; }
)";
  PaperExample ex;
  ex.bn = parse_bif(bif);
  ex.b = ex.bn.find_variable("b");
  ex.c = ex.bn.find_variable("c");
  ex.e = ex.bn.find_variable("e");
  ex.f = ex.bn.find_variable("f");
  ex.g = ex.bn.find_variable("g");
  ex.h = ex.bn.find_variable("h");
  ex.i = ex.bn.find_variable("i");
  ex.l = ex.bn.find_variable("l");
  ex.jt = build_junction_tree(ex.bn);

  auto find_clique = [&](std::vector<int> vars) {
    Scope want = make_scope(std::move(vars));
    for (const CliqueNode& c : ex.jt.cliques) {
      if (c.scope == want) return c.id;
    }
    throw std::runtime_error("fixture clique not found");
  };
  ex.bc = find_clique({ex.b, ex.c});
  ex.ce = find_clique({ex.c, ex.e});
  ex.ef = find_clique({ex.e, ex.f});
  ex.egh = find_clique({ex.e, ex.g, ex.h});
  ex.gil = find_clique({ex.g, ex.i, ex.l});
  ex.jt.set_pivot(ex.bc);
  return ex;
}

// ---------------------------------------------------------------------------
// Synthetic junction trees for the DP tests
// ---------------------------------------------------------------------------

// A junction tree built directly: one fresh variable per separator plus one
// private variable per clique, which satisfies the running-intersection
// property trivially. Potentials are uniform; only scopes matter to the
// materializer arithmetic.
inline JunctionTree synthetic_tree(int num_cliques, const std::vector<int>& parent,
                                   const std::vector<int>& sep_cards,
                                   const std::vector<int>& private_cards) {
  JunctionTree jt;
  // Variable ids: separator i -> i (for clique i >= 1), private of clique i
  // -> (num_cliques - 1) + i.
  for (int i = 1; i < num_cliques; ++i) {
    jt.variables.push_back({static_cast<int>(jt.variables.size()), "s" + std::to_string(i),
                            sep_cards[static_cast<std::size_t>(i)]});
  }
  for (int i = 0; i < num_cliques; ++i) {
    jt.variables.push_back({static_cast<int>(jt.variables.size()), "p" + std::to_string(i),
                            private_cards[static_cast<std::size_t>(i)]});
  }
  CardMap cards(jt.variables.size());
  for (const Variable& v : jt.variables) cards[static_cast<std::size_t>(v.id)] = v.cardinality;

  std::vector<Scope> scopes(static_cast<std::size_t>(num_cliques));
  for (int i = 0; i < num_cliques; ++i) {
    std::vector<int> vars{num_cliques - 1 + i};  // private variable
    if (i >= 1) vars.push_back(i - 1);           // separator toward parent
    for (int j = 1; j < num_cliques; ++j) {
      if (parent[static_cast<std::size_t>(j)] == i) vars.push_back(j - 1);
    }
    scopes[static_cast<std::size_t>(i)] = make_scope(std::move(vars));
  }
  jt.adjacency.assign(static_cast<std::size_t>(num_cliques), {});
  for (int i = 0; i < num_cliques; ++i) {
    CliqueNode c;
    c.id = i;
    c.scope = scopes[static_cast<std::size_t>(i)];
    std::vector<int> ccards(c.scope.size());
    for (std::size_t k = 0; k < c.scope.size(); ++k) {
      ccards[k] = cards[static_cast<std::size_t>(c.scope[k])];
    }
    c.potential = DiscreteFactor::ones(c.scope, ccards);
    c.size = c.potential.size();
    jt.cliques.push_back(std::move(c));
  }
  for (int j = 1; j < num_cliques; ++j) {
    Separator s;
    s.u = std::min(parent[static_cast<std::size_t>(j)], j);
    s.v = std::max(parent[static_cast<std::size_t>(j)], j);
    s.scope = {j - 1};
    s.potential = DiscreteFactor::ones(s.scope, {cards[static_cast<std::size_t>(j - 1)]});
    int idx = static_cast<int>(jt.separators.size());
    jt.adjacency[static_cast<std::size_t>(s.u)].push_back({s.v, idx});
    jt.adjacency[static_cast<std::size_t>(s.v)].push_back({s.u, idx});
    jt.separators.push_back(std::move(s));
  }
  for (auto& nbs : jt.adjacency) std::sort(nbs.begin(), nbs.end());
  jt.calibrated = true;  // scope-only fixture
  jt.set_pivot(0);
  return jt;
}

struct DpInstance {
  JunctionTree jt;
  QueryLog log;
};

// Random small instance for the DP-vs-oracle property tests. Costs stay
// small (cardinalities 2..3, shallow trees) so every path shortcut is
// within the oracle budget range.
inline DpInstance random_dp_instance(int max_cliques, std::uint64_t seed) {
  TestRng rng(seed);
  int n = rng.in(4, max_cliques);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) parent[static_cast<std::size_t>(i)] = rng.below(i);
  std::vector<int> sep_cards(static_cast<std::size_t>(n), 2);
  for (int i = 1; i < n; ++i) sep_cards[static_cast<std::size_t>(i)] = rng.in(2, 3);
  std::vector<int> private_cards(static_cast<std::size_t>(n), 2);
  for (int i = 0; i < n; ++i) private_cards[static_cast<std::size_t>(i)] = rng.in(2, 4);

  DpInstance inst{synthetic_tree(n, parent, sep_cards, private_cards), {}};

  int queries = rng.in(4, 10);
  std::vector<Query> raw;
  int num_vars = static_cast<int>(inst.jt.variables.size());
  for (int i = 0; i < queries; ++i) {
    int size = rng.in(1, 3);
    std::vector<int> vars;
    for (int s = 0; s < size; ++s) vars.push_back(rng.below(num_vars));
    Query q{make_scope(std::move(vars)), rng.in(1, 7)};
    raw.push_back(std::move(q));
  }
  inst.log = estimate_probabilities(raw);
  return inst;
}

inline std::string data_path(const std::string& name) {
  return std::string(JTMAT_DATA_DIR) + "/" + name;
}

// Recomputes the DP objective of a reconstructed shortcut from first
// principles: the summed benefits of the path shortcuts ending at the
// terminals the optimizer chose.
inline double reevaluate_dp_objective(const JunctionTree& jt, const ShortcutPotential& s,
                                      const QueryLog& log) {
  BenefitContext ctx = make_benefit_context(jt, log);
  double total = 0.0;
  for (int t : s.terminals) {
    std::vector<int> path_nodes;
    for (int u = jt.parent[static_cast<std::size_t>(t)];;
         u = jt.parent[static_cast<std::size_t>(u)]) {
      path_nodes.push_back(u);
      if (u == s.root) break;
    }
    total += benefit_log(ctx, make_shortcut(jt, path_nodes));
  }
  return total;
}

// Ancestrally closed restriction of a network to the given variables
// (every parent of a kept variable must be kept). New ids preserve the
// old id order, so CPT layouts carry over unchanged.
inline BayesianNetwork restrict_network(const BayesianNetwork& bn, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  std::vector<int> remap(bn.variables.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) remap[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  BayesianNetwork out;
  for (int old_id : keep) {
    Variable v = bn.variables[static_cast<std::size_t>(old_id)];
    v.id = remap[static_cast<std::size_t>(old_id)];
    out.variables.push_back(std::move(v));
  }
  out.parents.resize(keep.size());
  out.cpts.resize(keep.size());
  for (int old_id : keep) {
    int new_id = remap[static_cast<std::size_t>(old_id)];
    for (int p : bn.parents[static_cast<std::size_t>(old_id)]) {
      if (remap[static_cast<std::size_t>(p)] < 0) {
        throw std::invalid_argument("restrict_network: kept set is not ancestrally closed");
      }
      out.parents[static_cast<std::size_t>(new_id)].push_back(remap[static_cast<std::size_t>(p)]);
    }
    const DiscreteFactor& cpt = bn.cpts[static_cast<std::size_t>(old_id)];
    Scope scope;
    for (int v : cpt.scope()) scope.push_back(remap[static_cast<std::size_t>(v)]);
    out.cpts[static_cast<std::size_t>(new_id)] = DiscreteFactor(scope, cpt.cards(), cpt.values());
  }
  return out;
}

}  // namespace jtmat::testing

#endif  // JTMAT_TESTS_FIXTURES_HPP

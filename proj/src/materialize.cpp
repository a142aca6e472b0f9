#include "jtmat/materialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

namespace {

// Scope-only picture of a (possibly reduced) Steiner tree, enough to
// simulate message-passing cost without touching tables.
struct TreeView {
  std::vector<Scope> scopes;
  struct Edge {
    int a, b;
    Scope sep;
  };
  std::vector<Edge> edges;
  int pivot = -1;
};

std::int64_t view_cost(const TreeView& view, const Scope& query_vars, const CardMap& cards) {
  const std::size_t n = view.scopes.size();
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (std::size_t e = 0; e < view.edges.size(); ++e) {
    adj[static_cast<std::size_t>(view.edges[e].a)].push_back({view.edges[e].b, static_cast<int>(e)});
    adj[static_cast<std::size_t>(view.edges[e].b)].push_back({view.edges[e].a, static_cast<int>(e)});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<int> parent(n, -1), parent_edge(n, -1), pre;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{view.pivot};
  seen[static_cast<std::size_t>(view.pivot)] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    pre.push_back(v);
    for (auto it = adj[static_cast<std::size_t>(v)].rbegin(); it != adj[static_cast<std::size_t>(v)].rend();
         ++it) {
      auto [nb, e] = *it;
      if (seen[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = true;
      parent[static_cast<std::size_t>(nb)] = v;
      parent_edge[static_cast<std::size_t>(nb)] = e;
      stack.push_back(nb);
    }
  }
  if (pre.size() != n) throw InternalError("view_cost: disconnected reduction");

  std::vector<Scope> message(n);
  std::int64_t cost = 0;
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    int v = *it;
    Scope u = view.scopes[static_cast<std::size_t>(v)];
    std::int64_t k = 0;
    for (const auto& [nb, e] : adj[static_cast<std::size_t>(v)]) {
      if (parent[static_cast<std::size_t>(nb)] == v) {
        u = scope_union(u, message[static_cast<std::size_t>(nb)]);
        ++k;
      }
    }
    cost += (k + 1) * table_size(u, cards);
    if (v != view.pivot) {
      const TreeView::Edge& e = view.edges[static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(v)])];
      message[static_cast<std::size_t>(v)] = scope_intersect(u, scope_union(e.sep, query_vars));
    }
  }
  return cost;
}

// Contracts the shortcut region of the Steiner tree into a stand-in scope.
// Returns false when the shortcut does not intersect the tree.
bool reduced_view(const SteinerTree& st, const ShortcutPotential& s, TreeView& out) {
  std::vector<int> node_map(st.nodes.size(), -1);
  int standin = -1;
  out = TreeView();
  for (std::size_t i = 0; i < st.nodes.size(); ++i) {
    int cid = st.nodes[i].clique_id;
    if (cid >= 0 && s.contains_clique(cid)) {
      if (standin == -1) {
        standin = static_cast<int>(out.scopes.size());
        out.scopes.push_back(s.scope);
      }
      node_map[i] = standin;
    } else {
      node_map[i] = static_cast<int>(out.scopes.size());
      out.scopes.push_back(st.nodes[i].scope);
    }
  }
  if (standin == -1) return false;
  for (const SteinerTree::Edge& e : st.edges) {
    int a = node_map[static_cast<std::size_t>(e.a)];
    int b = node_map[static_cast<std::size_t>(e.b)];
    if (a == b) continue;
    out.edges.push_back({a, b, e.sep_scope});
  }
  out.pivot = node_map[static_cast<std::size_t>(st.pivot)];
  return true;
}

bool view_covers(const TreeView& view, const Scope& query_vars) {
  for (int var : query_vars) {
    bool found = false;
    for (const Scope& s : view.scopes) {
      if (scope_contains(s, var)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Condition (i)/(ii): enough cut separators on some leaf-to-pivot path,
// depending on whether the Steiner pivot sits inside the shortcut subtree.
bool structural_usefulness(const SteinerTree& st, const ShortcutPotential& s) {
  if (st.nodes.size() < 2) return false;
  auto adj = st.adjacency();
  int pivot_cid = st.nodes[static_cast<std::size_t>(st.pivot)].clique_id;
  bool pivot_inside = pivot_cid >= 0 && s.contains_clique(pivot_cid);
  int needed = pivot_inside ? 1 : 2;

  // Parents toward the pivot.
  std::vector<int> parent(st.nodes.size(), -1), parent_edge(st.nodes.size(), -1);
  std::vector<bool> seen(st.nodes.size(), false);
  std::deque<int> q{st.pivot};
  seen[static_cast<std::size_t>(st.pivot)] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const auto& [nb, e] : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = true;
      parent[static_cast<std::size_t>(nb)] = v;
      parent_edge[static_cast<std::size_t>(nb)] = e;
      q.push_back(nb);
    }
  }
  for (std::size_t leaf = 0; leaf < st.nodes.size(); ++leaf) {
    if (static_cast<int>(leaf) == st.pivot || adj[leaf].size() > 1) continue;
    int count = 0;
    for (int v = static_cast<int>(leaf); v != st.pivot; v = parent[static_cast<std::size_t>(v)]) {
      int e = parent_edge[static_cast<std::size_t>(v)];
      int sep = st.edges[static_cast<std::size_t>(e)].separator_index;
      if (sep >= 0 && std::binary_search(s.cut.begin(), s.cut.end(), sep)) ++count;
    }
    if (count >= needed) return true;
  }
  return false;
}

}  // namespace

bool usefulness_for_tree(const JunctionTree& jt, const SteinerTree& st, std::int64_t base_cost,
                         const Query& q, const ShortcutPotential& s) {
  if (!structural_usefulness(st, s)) return false;
  TreeView view;
  if (!reduced_view(st, s, view)) return false;
  if (!view_covers(view, q.variables)) return false;
  return view_cost(view, q.variables, jt.cardinalities()) < base_cost;
}

bool usefulness(const ShortcutPotential& s, const Query& q, const JunctionTree& jt) {
  SteinerTree st = steiner_tree(jt, q);
  std::int64_t base = query_cost(st, q, jt.cardinalities());
  return usefulness_for_tree(jt, st, base, q, s);
}

BenefitContext make_benefit_context(const JunctionTree& jt, const QueryLog& log) {
  BenefitContext ctx;
  ctx.jt = &jt;
  ctx.cards = jt.cardinalities();
  ctx.subtree_scopes.resize(static_cast<std::size_t>(jt.num_cliques()));
  for (auto it = jt.dfs_order.rbegin(); it != jt.dfs_order.rend(); ++it) {
    int v = *it;
    Scope s = jt.cliques[static_cast<std::size_t>(v)].scope;
    for (int c : jt.children[static_cast<std::size_t>(v)]) {
      s = scope_union(s, ctx.subtree_scopes[static_cast<std::size_t>(c)]);
    }
    ctx.subtree_scopes[static_cast<std::size_t>(v)] = std::move(s);
  }
  ctx.queries = log.entries;
  ctx.probabilities = log.probabilities;
  ctx.steiner.reserve(log.entries.size());
  ctx.base_cost.reserve(log.entries.size());
  for (const Query& q : log.entries) {
    ctx.steiner.push_back(steiner_tree(jt, q));
    ctx.base_cost.push_back(query_cost(ctx.steiner.back(), q, ctx.cards));
  }
  return ctx;
}

double benefit_single(const BenefitContext& ctx, const ShortcutPotential& s, std::size_t query_index) {
  const Query& q = ctx.queries[query_index];
  if (!usefulness_for_tree(*ctx.jt, ctx.steiner[query_index], ctx.base_cost[query_index], q, s)) {
    return 0.0;
  }
  double total = 0.0;
  for (int v : s.nodes) {
    double term = static_cast<double>(ctx.jt->cliques[static_cast<std::size_t>(v)].size);
    const Scope& below = ctx.subtree_scopes[static_cast<std::size_t>(v)];
    for (int w : q.variables) {
      if (scope_contains(below, w)) term *= ctx.cards[static_cast<std::size_t>(w)];
    }
    total += term;
  }
  return total;
}

double benefit_single(const ShortcutPotential& s, const Query& q, const JunctionTree& jt) {
  QueryLog log = estimate_probabilities({q});
  BenefitContext ctx = make_benefit_context(jt, log);
  return benefit_single(ctx, s, 0);
}

double benefit_log(const BenefitContext& ctx, const ShortcutPotential& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < ctx.queries.size(); ++i) {
    total += ctx.probabilities[i] * benefit_single(ctx, s, i);
  }
  return total;
}

double benefit_log(const ShortcutPotential& s, const QueryLog& log, const JunctionTree& jt) {
  double psum = 0.0;
  for (double p : log.probabilities) psum += p;
  if (std::abs(psum - 1.0) > 1e-9) {
    throw std::invalid_argument("benefit_log: probabilities do not sum to 1");
  }
  BenefitContext ctx = make_benefit_context(jt, log);
  return benefit_log(ctx, s);
}

CostGrid epsilon_grid(std::int64_t budget, double epsilon) {
  if (budget < 0) throw std::invalid_argument("epsilon_grid: negative budget");
  if (epsilon < 1.0) throw std::invalid_argument("epsilon_grid: epsilon must be >= 1");
  CostGrid grid;
  if (epsilon == 1.0) {
    grid.resize(static_cast<std::size_t>(budget) + 1);
    for (std::int64_t c = 0; c <= budget; ++c) grid[static_cast<std::size_t>(c)] = c;
    return grid;
  }
  grid.push_back(0);
  for (double x = 1.0; x < static_cast<double>(budget); x *= epsilon) {
    std::int64_t v = static_cast<std::int64_t>(std::floor(x));
    if (v > 0 && v < budget && (grid.empty() || grid.back() != v)) grid.push_back(v);
    if (x > 2e18) break;
  }
  if (budget > 0) grid.push_back(budget);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

int grid_floor_index(const CostGrid& grid, std::int64_t value) {
  auto it = std::upper_bound(grid.begin(), grid.end(), value);
  if (it == grid.begin()) throw std::invalid_argument("grid_floor_index: value below grid");
  return static_cast<int>(it - grid.begin()) - 1;
}

PathShortcutStats path_stats(const JunctionTree& jt, int root, const QueryLog& log,
                             const BenefitContext* ctx) {
  BenefitContext local;
  if (!ctx) {
    local = make_benefit_context(jt, log);
    ctx = &local;
  }
  PathShortcutStats stats;
  stats.root = root;
  stats.benefit.assign(static_cast<std::size_t>(jt.num_cliques()), 0.0);
  stats.cost.assign(static_cast<std::size_t>(jt.num_cliques()), 0);
  stats.in_subtree.assign(static_cast<std::size_t>(jt.num_cliques()), 0);

  std::vector<int> stack(jt.children[static_cast<std::size_t>(root)].rbegin(),
                         jt.children[static_cast<std::size_t>(root)].rend());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    stats.in_subtree[static_cast<std::size_t>(v)] = 1;
    std::vector<int> path_nodes;
    for (int u = jt.parent[static_cast<std::size_t>(v)];; u = jt.parent[static_cast<std::size_t>(u)]) {
      path_nodes.push_back(u);
      if (u == root) break;
    }
    ShortcutPotential s = make_shortcut(jt, path_nodes);
    stats.cost[static_cast<std::size_t>(v)] = s.cost;
    stats.benefit[static_cast<std::size_t>(v)] = benefit_log(*ctx, s);
    for (auto it = jt.children[static_cast<std::size_t>(v)].rbegin();
         it != jt.children[static_cast<std::size_t>(v)].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return stats;
}

namespace {

struct Cand {
  double j = 0.0;
  std::int64_t w = 0;
  int rank = 0;  // Empty=0, Terminal=1, Combine=2

  bool better_than(const Cand& other) const {
    if (j != other.j) return j > other.j;
    if (w != other.w) return w < other.w;
    return rank < other.rank;
  }
};

}  // namespace

DPStateSingle lrdp(const JunctionTree& jt, int root, std::int64_t budget, const QueryLog& log,
                   const CostGrid& grid, const BenefitContext* ctx) {
  if (grid.empty() || grid.front() != 0 || grid.back() != budget ||
      !std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("lrdp: grid must ascend from 0 to the budget");
  }
  DPStateSingle st;
  st.root = root;
  st.grid = grid;
  st.stats = path_stats(jt, root, log, ctx);

  // Subtree nodes in dfs left-to-right order (labels 0..m-1, root first).
  st.local_index.assign(static_cast<std::size_t>(jt.num_cliques()), -1);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    st.local_index[static_cast<std::size_t>(v)] = static_cast<int>(st.nodes.size());
    st.nodes.push_back(v);
    for (auto it = jt.children[static_cast<std::size_t>(v)].rbegin();
         it != jt.children[static_cast<std::size_t>(v)].rend(); ++it) {
      stack.push_back(*it);
    }
  }

  const int m = static_cast<int>(st.nodes.size());
  const int g_n = static_cast<int>(grid.size());
  st.P.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(g_n), 0.0));
  st.I.assign(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(g_n), 0));
  st.choice.assign(static_cast<std::size_t>(m),
                   std::vector<DPStateSingle::Choice>(static_cast<std::size_t>(g_n),
                                                      DPStateSingle::Choice::Empty));
  st.best_w.assign(static_cast<std::size_t>(m),
                   std::vector<std::int64_t>(static_cast<std::size_t>(g_n), 0));
  st.split.assign(static_cast<std::size_t>(m), {});

  // Bottom-up over the subtree (reverse dfs order visits children first).
  for (int l = m - 1; l >= 0; --l) {
    int v = st.nodes[static_cast<std::size_t>(l)];
    const std::vector<int>& kids = jt.children[static_cast<std::size_t>(v)];
    const int k = static_cast<int>(kids.size());

    // Incremental knapsack over children branches.
    std::vector<double> comb_j(static_cast<std::size_t>(g_n), 0.0);
    std::vector<std::int64_t> comb_w(static_cast<std::size_t>(g_n), 0);
    st.split[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(k),
                                                 std::vector<int>(static_cast<std::size_t>(g_n), 0));
    for (int j = 0; j < k; ++j) {
      int child_l = st.local_index[static_cast<std::size_t>(kids[static_cast<std::size_t>(j)])];
      std::vector<double> next_j(static_cast<std::size_t>(g_n));
      std::vector<std::int64_t> next_w(static_cast<std::size_t>(g_n));
      for (int g = 0; g < g_n; ++g) {
        double best_j = -1.0;
        std::int64_t best_wv = 0;
        int best_a = 0;
        for (int a = 0; a <= g; ++a) {
          int rem = grid_floor_index(grid, grid[static_cast<std::size_t>(g)] -
                                               grid[static_cast<std::size_t>(a)]);
          double cj = comb_j[static_cast<std::size_t>(rem)] +
                      st.P[static_cast<std::size_t>(child_l)][static_cast<std::size_t>(a)];
          std::int64_t cw = comb_w[static_cast<std::size_t>(rem)] +
                            st.best_w[static_cast<std::size_t>(child_l)][static_cast<std::size_t>(a)];
          if (cj > best_j || (cj == best_j && cw < best_wv)) {
            best_j = cj;
            best_wv = cw;
            best_a = a;
          }
        }
        next_j[static_cast<std::size_t>(g)] = best_j;
        next_w[static_cast<std::size_t>(g)] = best_wv;
        st.split[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] =
            best_a;
      }
      comb_j = std::move(next_j);
      comb_w = std::move(next_w);
    }

    for (int g = 0; g < g_n; ++g) {
      Cand best{0.0, 0, 0};  // empty
      if (l != 0) {
        std::int64_t w = st.stats.cost[static_cast<std::size_t>(v)];
        if (w <= grid[static_cast<std::size_t>(g)]) {
          Cand term{st.stats.benefit[static_cast<std::size_t>(v)], w, 1};
          if (term.better_than(best)) best = term;
        }
      }
      if (k > 0) {
        Cand comb{comb_j[static_cast<std::size_t>(g)], comb_w[static_cast<std::size_t>(g)], 2};
        if (comb.better_than(best)) best = comb;
      }
      st.P[static_cast<std::size_t>(l)][static_cast<std::size_t>(g)] = best.j;
      st.best_w[static_cast<std::size_t>(l)][static_cast<std::size_t>(g)] = best.w;
      st.choice[static_cast<std::size_t>(l)][static_cast<std::size_t>(g)] =
          best.rank == 0 ? DPStateSingle::Choice::Empty
          : best.rank == 1 ? DPStateSingle::Choice::Terminal
                           : DPStateSingle::Choice::Combine;
    }
  }
  return st;
}

namespace {

void walk_single(const JunctionTree& jt, const DPStateSingle& st, int local, int g,
                 std::vector<int>& terminals) {
  switch (st.choice[static_cast<std::size_t>(local)][static_cast<std::size_t>(g)]) {
    case DPStateSingle::Choice::Empty:
      return;
    case DPStateSingle::Choice::Terminal:
      terminals.push_back(st.nodes[static_cast<std::size_t>(local)]);
      return;
    case DPStateSingle::Choice::Combine: {
      int v = st.nodes[static_cast<std::size_t>(local)];
      const std::vector<int>& kids = jt.children[static_cast<std::size_t>(v)];
      int gg = g;
      for (int j = static_cast<int>(kids.size()) - 1; j >= 0; --j) {
        int a = st.split[static_cast<std::size_t>(local)][static_cast<std::size_t>(j)]
                        [static_cast<std::size_t>(gg)];
        walk_single(jt, st,
                    st.local_index[static_cast<std::size_t>(kids[static_cast<std::size_t>(j)])], a,
                    terminals);
        gg = grid_floor_index(st.grid, st.grid[static_cast<std::size_t>(gg)] -
                                           st.grid[static_cast<std::size_t>(a)]);
      }
      return;
    }
  }
}

}  // namespace

SingleSolutions reconstruct_single(const JunctionTree& jt, DPStateSingle state) {
  SingleSolutions out;
  const int g_n = static_cast<int>(state.grid.size());
  out.shortcut.assign(static_cast<std::size_t>(g_n), std::nullopt);
  for (int g = 0; g < g_n; ++g) {
    std::vector<int> terminals;
    walk_single(jt, state, 0, g, terminals);
    if (terminals.empty()) continue;
    std::set<int> nodes;
    for (int t : terminals) {
      state.I[static_cast<std::size_t>(state.local_index[static_cast<std::size_t>(t)])]
             [static_cast<std::size_t>(g)] = 1;
      for (int u = jt.parent[static_cast<std::size_t>(t)];; u = jt.parent[static_cast<std::size_t>(u)]) {
        nodes.insert(u);
        state.I[static_cast<std::size_t>(state.local_index[static_cast<std::size_t>(u)])]
               [static_cast<std::size_t>(g)] = 1;
        if (u == state.root) break;
      }
    }
    ShortcutPotential s = make_shortcut(jt, {nodes.begin(), nodes.end()});
    if (s.root != state.root) throw InternalError("reconstruct_single: root mismatch");
    s.benefit = state.P[0][static_cast<std::size_t>(g)];
    s.ratio = s.cost > 0 ? s.benefit / static_cast<double>(s.cost) : 0.0;
    std::sort(terminals.begin(), terminals.end());
    s.terminals = std::move(terminals);
    out.shortcut[static_cast<std::size_t>(g)] = std::move(s);
  }
  out.dp = std::move(state);
  return out;
}

std::vector<int> internal_roots(const JunctionTree& jt) {
  std::vector<int> roots;
  for (int v = 0; v < jt.num_cliques(); ++v) {
    if (!jt.children[static_cast<std::size_t>(v)].empty()) roots.push_back(v);
  }
  return roots;
}

std::map<int, SingleSolutions> solve_all_roots(const JunctionTree& jt, const QueryLog& log,
                                               std::int64_t budget, const CostGrid& grid,
                                               const BenefitContext* ctx) {
  BenefitContext local;
  if (!ctx) {
    local = make_benefit_context(jt, log);
    ctx = &local;
  }
  std::map<int, SingleSolutions> out;
  for (int root : internal_roots(jt)) {
    out.emplace(root, reconstruct_single(jt, lrdp(jt, root, budget, log, grid, ctx)));
  }
  return out;
}

namespace {

// Cut children of a shortcut subtree: outside endpoints of the cut,
// excluding the separator toward the pivot.
std::vector<int> descendants_below(const JunctionTree& jt, const ShortcutPotential& s) {
  std::vector<int> out;
  for (int sep_idx : s.cut) {
    const Separator& sp = jt.separators[static_cast<std::size_t>(sep_idx)];
    int outside = s.contains_clique(sp.u) ? sp.v : sp.u;
    if (outside == jt.parent[static_cast<std::size_t>(s.root)]) continue;
    out.push_back(outside);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DPStateMulti budp(const JunctionTree& jt, std::int64_t budget,
                  const std::map<int, SingleSolutions>& roots, const CostGrid& grid) {
  if (grid.empty() || grid.front() != 0 || grid.back() != budget ||
      !std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("budp: grid must ascend from 0 to the budget");
  }
  DPStateMulti dp;
  dp.grid = grid;
  const int n = jt.num_cliques();
  const int g_n = static_cast<int>(grid.size());
  auto zeros = [&] {
    return std::vector<std::vector<double>>(static_cast<std::size_t>(n),
                                            std::vector<double>(static_cast<std::size_t>(g_n), 0.0));
  };
  dp.H = zeros();
  dp.H1 = zeros();
  dp.H2 = zeros();
  dp.I.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(g_n), 0));
  dp.W1.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(g_n), 0));
  std::vector<std::vector<std::int64_t>> Hw(static_cast<std::size_t>(n),
                                            std::vector<std::int64_t>(static_cast<std::size_t>(g_n), 0));

  for (auto it = jt.dfs_order.rbegin(); it != jt.dfs_order.rend(); ++it) {
    int v = *it;
    const std::vector<int>& kids = jt.children[static_cast<std::size_t>(v)];
    const int k = static_cast<int>(kids.size());

    // Case (i): best combination of children packings.
    std::vector<double> comb_j(static_cast<std::size_t>(g_n), 0.0);
    std::vector<std::int64_t> comb_w(static_cast<std::size_t>(g_n), 0);
    std::vector<std::vector<int>> split1(static_cast<std::size_t>(k),
                                         std::vector<int>(static_cast<std::size_t>(g_n), 0));
    for (int j = 0; j < k; ++j) {
      int child = kids[static_cast<std::size_t>(j)];
      std::vector<double> next_j(static_cast<std::size_t>(g_n));
      std::vector<std::int64_t> next_w(static_cast<std::size_t>(g_n));
      for (int g = 0; g < g_n; ++g) {
        double best_j = -1.0;
        std::int64_t best_wv = 0;
        int best_a = 0;
        for (int a = 0; a <= g; ++a) {
          int rem = grid_floor_index(grid, grid[static_cast<std::size_t>(g)] -
                                               grid[static_cast<std::size_t>(a)]);
          double cj = comb_j[static_cast<std::size_t>(rem)] +
                      dp.H[static_cast<std::size_t>(child)][static_cast<std::size_t>(a)];
          std::int64_t cw = comb_w[static_cast<std::size_t>(rem)] +
                            Hw[static_cast<std::size_t>(child)][static_cast<std::size_t>(a)];
          if (cj > best_j || (cj == best_j && cw < best_wv)) {
            best_j = cj;
            best_wv = cw;
            best_a = a;
          }
        }
        next_j[static_cast<std::size_t>(g)] = best_j;
        next_w[static_cast<std::size_t>(g)] = best_wv;
        split1[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] = best_a;
      }
      comb_j = std::move(next_j);
      comb_w = std::move(next_w);
    }
    for (int g = 0; g < g_n; ++g) {
      dp.H1[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] =
          k > 0 ? comb_j[static_cast<std::size_t>(g)] : 0.0;
    }
    // Record case-(i) allocations per child.
    for (int g = 0; g < g_n; ++g) {
      int gg = g;
      for (int j = k - 1; j >= 0; --j) {
        int a = split1[static_cast<std::size_t>(j)][static_cast<std::size_t>(gg)];
        dp.W1[static_cast<std::size_t>(kids[static_cast<std::size_t>(j)])]
             [static_cast<std::size_t>(g)] = a;
        gg = grid_floor_index(grid, grid[static_cast<std::size_t>(gg)] -
                                        grid[static_cast<std::size_t>(a)]);
      }
    }

    // Case (ii): a shortcut rooted at v plus packings below its cut.
    auto root_it = roots.find(v);
    struct Shape {
      int c_idx;
      const ShortcutPotential* s;
      std::vector<int> d;                       // cut children
      std::vector<std::vector<double>> best_d;  // prefix knapsack values
      std::vector<std::vector<std::int64_t>> best_dw;
      std::vector<std::vector<int>> split_d;
    };
    std::vector<Shape> shapes;
    if (root_it != roots.end() && k > 0) {
      // Distinct terminal choices; the same node set can appear with
      // different terminal multisets and benefits.
      std::set<std::vector<int>> seen_shapes;
      for (int c = 0; c < g_n; ++c) {
        const auto& sol = root_it->second.shortcut[static_cast<std::size_t>(c)];
        if (!sol.has_value() || sol->benefit <= 0.0) continue;
        if (!seen_shapes.insert(sol->terminals).second) continue;
        Shape sh;
        sh.c_idx = c;
        sh.s = &sol.value();
        sh.d = descendants_below(jt, *sh.s);
        const int dn = static_cast<int>(sh.d.size());
        sh.split_d.assign(static_cast<std::size_t>(dn),
                          std::vector<int>(static_cast<std::size_t>(g_n), 0));
        std::vector<double> dj(static_cast<std::size_t>(g_n), 0.0);
        std::vector<std::int64_t> dw(static_cast<std::size_t>(g_n), 0);
        for (int j = 0; j < dn; ++j) {
          int d = sh.d[static_cast<std::size_t>(j)];
          std::vector<double> nj(static_cast<std::size_t>(g_n));
          std::vector<std::int64_t> nw(static_cast<std::size_t>(g_n));
          for (int g = 0; g < g_n; ++g) {
            double best_j = -1.0;
            std::int64_t best_wv = 0;
            int best_a = 0;
            for (int a = 0; a <= g; ++a) {
              int rem = grid_floor_index(grid, grid[static_cast<std::size_t>(g)] -
                                                   grid[static_cast<std::size_t>(a)]);
              double cj = dj[static_cast<std::size_t>(rem)] +
                          dp.H[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
              std::int64_t cw = dw[static_cast<std::size_t>(rem)] +
                                Hw[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
              if (cj > best_j || (cj == best_j && cw < best_wv)) {
                best_j = cj;
                best_wv = cw;
                best_a = a;
              }
            }
            nj[static_cast<std::size_t>(g)] = best_j;
            nw[static_cast<std::size_t>(g)] = best_wv;
            sh.split_d[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] = best_a;
          }
          dj = std::move(nj);
          dw = std::move(nw);
        }
        sh.best_d.push_back(std::move(dj));
        sh.best_dw.push_back(std::move(dw));
        shapes.push_back(std::move(sh));
      }
    }
    for (int g = 0; g < g_n; ++g) {
      double best_j = 0.0;
      std::int64_t best_wv = 0;
      int best_shape = -1;
      for (std::size_t si = 0; si < shapes.size(); ++si) {
        const Shape& sh = shapes[si];
        if (sh.c_idx > g) continue;
        int rem = grid_floor_index(grid, grid[static_cast<std::size_t>(g)] -
                                             grid[static_cast<std::size_t>(sh.c_idx)]);
        double cj = sh.s->benefit + sh.best_d[0][static_cast<std::size_t>(rem)];
        std::int64_t cw = dp.grid[static_cast<std::size_t>(sh.c_idx)] +
                          sh.best_dw[0][static_cast<std::size_t>(rem)];
        if (cj > best_j || (cj == best_j && best_shape != -1 && cw < best_wv)) {
          best_j = cj;
          best_wv = cw;
          best_shape = static_cast<int>(si);
        }
      }
      dp.H2[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] = best_shape >= 0 ? best_j : 0.0;
      if (best_shape >= 0) {
        const Shape& sh = shapes[static_cast<std::size_t>(best_shape)];
        dp.W2[{v, v, g}] = sh.c_idx;
        int rem = grid_floor_index(grid, grid[static_cast<std::size_t>(g)] -
                                             grid[static_cast<std::size_t>(sh.c_idx)]);
        int gg = rem;
        for (int j = static_cast<int>(sh.d.size()) - 1; j >= 0; --j) {
          int a = sh.split_d[static_cast<std::size_t>(j)][static_cast<std::size_t>(gg)];
          dp.W2[{v, sh.d[static_cast<std::size_t>(j)], g}] = a;
          gg = grid_floor_index(grid, grid[static_cast<std::size_t>(gg)] -
                                          grid[static_cast<std::size_t>(a)]);
        }
      }

      double h1 = dp.H1[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)];
      double h2 = dp.H2[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)];
      if (h2 > h1) {
        dp.I[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] = 1;
        dp.H[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] = h2;
        Hw[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] = best_wv;
      } else {
        dp.H[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] = h1;
        Hw[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)] =
            k > 0 ? comb_w[static_cast<std::size_t>(g)] : 0;
      }
    }
  }
  return dp;
}

namespace {

void walk_multi(const JunctionTree& jt, const DPStateMulti& dp,
                const std::map<int, SingleSolutions>& roots, int v, int g,
                std::vector<ShortcutPotential>& out) {
  if (dp.I[static_cast<std::size_t>(v)][static_cast<std::size_t>(g)]) {
    int c_idx = dp.W2.at({v, v, g});
    const ShortcutPotential& s = roots.at(v).shortcut[static_cast<std::size_t>(c_idx)].value();
    out.push_back(s);
    for (int d : descendants_below(jt, s)) {
      walk_multi(jt, dp, roots, d, dp.W2.at({v, d, g}), out);
    }
  } else {
    for (int child : jt.children[static_cast<std::size_t>(v)]) {
      walk_multi(jt, dp, roots, child, dp.W1[static_cast<std::size_t>(child)][static_cast<std::size_t>(g)],
                 out);
    }
  }
}

}  // namespace

Catalog reconstruct_multi(const JunctionTree& jt, const DPStateMulti& state,
                          const std::map<int, SingleSolutions>& roots, std::int64_t budget) {
  Catalog cat;
  cat.mode = Catalog::Mode::Disjoint;
  cat.target_budget = budget;
  std::vector<ShortcutPotential> selected;
  walk_multi(jt, state, roots, jt.pivot, static_cast<int>(state.grid.size()) - 1, selected);

  // Disjointness is structural; verify anyway.
  std::set<int> used;
  for (const ShortcutPotential& s : selected) {
    for (int v : s.nodes) {
      if (!used.insert(v).second) throw InternalError("reconstruct_multi: overlapping selection");
    }
  }
  int id = 0;
  for (ShortcutPotential& s : selected) {
    s.id = id++;
    cat.actual_budget += s.cost;
    cat.shortcuts.push_back(std::move(s));
  }
  return cat;
}

std::vector<ShortcutPotential> collect_candidates(const JunctionTree& jt,
                                                  const std::map<int, SingleSolutions>& roots) {
  (void)jt;
  std::vector<ShortcutPotential> out;
  std::set<std::vector<int>> seen;
  int id = 0;
  for (const auto& [root, sol] : roots) {
    for (const auto& opt : sol.shortcut) {
      if (!opt.has_value() || opt->benefit <= 0.0) continue;
      if (!seen.insert(opt->nodes).second) continue;
      ShortcutPotential s = *opt;
      s.id = id++;
      out.push_back(std::move(s));
    }
  }
  return out;
}

Catalog greedy_pack(std::vector<ShortcutPotential> candidates, std::int64_t budget) {
  // Identical cut sets are the same physical table; keep the best claim.
  std::map<std::vector<int>, std::size_t> by_cut;
  std::vector<char> keep(candidates.size(), 1);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto [it, inserted] = by_cut.try_emplace(candidates[i].cut, i);
    if (inserted) continue;
    const ShortcutPotential& prev = candidates[it->second];
    const ShortcutPotential& cur = candidates[i];
    bool cur_wins = cur.benefit > prev.benefit ||
                    (cur.benefit == prev.benefit &&
                     (cur.cost < prev.cost || (cur.cost == prev.cost && cur.id < prev.id)));
    if (cur_wins) {
      keep[it->second] = 0;
      it->second = i;
    } else {
      keep[i] = 0;
    }
  }
  std::vector<ShortcutPotential> pool;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i] && candidates[i].benefit > 0.0) pool.push_back(std::move(candidates[i]));
  }
  std::sort(pool.begin(), pool.end(), [](const ShortcutPotential& a, const ShortcutPotential& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.id < b.id;
  });

  Catalog cat;
  cat.mode = Catalog::Mode::Overlapping;
  cat.target_budget = budget;
  std::int64_t remaining = budget;
  for (ShortcutPotential& s : pool) {
    if (s.cost <= remaining) {
      remaining -= s.cost;
      cat.actual_budget += s.cost;
      cat.shortcuts.push_back(std::move(s));
    }
  }
  return cat;
}

Catalog build_catalog(const JunctionTree& jt, const QueryLog& log, const MaterializeOptions& options,
                      MaterializeReport* report) {
  auto t0 = std::chrono::steady_clock::now();
  MaterializeReport local_report;
  local_report.target_budget = options.budget;

  Catalog cat;
  cat.target_budget = options.budget;
  if (options.mode != MaterializeMode::None && options.budget > 0) {
    CostGrid grid = epsilon_grid(options.budget, options.epsilon);
    BenefitContext ctx = make_benefit_context(jt, log);
    std::map<int, SingleSolutions> roots = solve_all_roots(jt, log, options.budget, grid, &ctx);
    if (options.mode == MaterializeMode::Peanut) {
      DPStateMulti dp = budp(jt, options.budget, roots, grid);
      cat = reconstruct_multi(jt, dp, roots, options.budget);
    } else {
      cat = greedy_pack(collect_candidates(jt, roots), options.budget);
    }
  } else {
    cat.mode = options.mode == MaterializeMode::PeanutPlus ? Catalog::Mode::Overlapping
                                                           : Catalog::Mode::Disjoint;
  }

  // True-size audit: the DP accounts path costs additively, which can
  // undercount the joint table of a multi-branch cut. Drop the worst
  // ratios until the materialized space fits.
  std::int64_t total = 0;
  for (const ShortcutPotential& s : cat.shortcuts) total += s.cost;
  while (total > options.budget && !cat.shortcuts.empty()) {
    auto worst = std::min_element(cat.shortcuts.begin(), cat.shortcuts.end(),
                                  [](const ShortcutPotential& a, const ShortcutPotential& b) {
                                    if (a.ratio != b.ratio) return a.ratio < b.ratio;
                                    return a.id > b.id;
                                  });
    total -= worst->cost;
    ++local_report.dropped_for_budget;
    cat.shortcuts.erase(worst);
  }
  cat.actual_budget = total;

  for (ShortcutPotential& s : cat.shortcuts) {
    s.table = materialize_table(jt, s);
    local_report.total_benefit += s.benefit;
  }
  local_report.actual_budget = cat.actual_budget;
  local_report.shortcuts = static_cast<int>(cat.shortcuts.size());
  local_report.offline_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report) *report = local_report;
  return cat;
}

}  // namespace jtmat

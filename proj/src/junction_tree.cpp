#include "jtmat/junction_tree.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

bool UndirectedGraph::has_edge(int a, int b) const {
  const auto& n = adjacency[static_cast<std::size_t>(a)];
  return std::find(n.begin(), n.end(), b) != n.end();
}

void UndirectedGraph::add_edge(int a, int b) {
  if (a == b || has_edge(a, b)) return;
  adjacency[static_cast<std::size_t>(a)].push_back(b);
  adjacency[static_cast<std::size_t>(b)].push_back(a);
}

int UndirectedGraph::num_edges() const {
  int n = 0;
  for (const auto& a : adjacency) n += static_cast<int>(a.size());
  return n / 2;
}

UndirectedGraph moralize(const BayesianNetwork& bn) {
  UndirectedGraph g(bn.num_variables());
  for (int v = 0; v < bn.num_variables(); ++v) {
    const auto& ps = bn.parents[static_cast<std::size_t>(v)];
    for (int p : ps) g.add_edge(v, p);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) g.add_edge(ps[i], ps[j]);
    }
  }
  return g;
}

namespace {

int count_fill(const std::vector<std::set<int>>& adj, int v) {
  const std::set<int>& n = adj[static_cast<std::size_t>(v)];
  int fill = 0;
  for (auto it = n.begin(); it != n.end(); ++it) {
    auto jt = it;
    for (++jt; jt != n.end(); ++jt) {
      if (!adj[static_cast<std::size_t>(*it)].count(*jt)) ++fill;
    }
  }
  return fill;
}

}  // namespace

TriangulationResult triangulate(const UndirectedGraph& g) {
  const int n = g.size();
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    adj[static_cast<std::size_t>(v)] = {g.adjacency[static_cast<std::size_t>(v)].begin(),
                                        g.adjacency[static_cast<std::size_t>(v)].end()};
  }
  TriangulationResult result;
  result.chordal = g;
  std::vector<bool> eliminated(static_cast<std::size_t>(n), false);

  for (int step = 0; step < n; ++step) {
    int best = -1, best_fill = std::numeric_limits<int>::max(), best_clique = 0;
    for (int v = 0; v < n; ++v) {
      if (eliminated[static_cast<std::size_t>(v)]) continue;
      int fill = count_fill(adj, v);
      int clique = static_cast<int>(adj[static_cast<std::size_t>(v)].size()) + 1;
      if (fill < best_fill || (fill == best_fill && clique < best_clique)) {
        best = v;
        best_fill = fill;
        best_clique = clique;
      }
    }
    result.elimination_order.push_back(best);
    const std::set<int> neighbors = adj[static_cast<std::size_t>(best)];
    for (auto it = neighbors.begin(); it != neighbors.end(); ++it) {
      auto jt = it;
      for (++jt; jt != neighbors.end(); ++jt) {
        if (!adj[static_cast<std::size_t>(*it)].count(*jt)) {
          adj[static_cast<std::size_t>(*it)].insert(*jt);
          adj[static_cast<std::size_t>(*jt)].insert(*it);
          result.chordal.add_edge(*it, *jt);
          ++result.fill_edges;
        }
      }
    }
    eliminated[static_cast<std::size_t>(best)] = true;
    for (int u : neighbors) adj[static_cast<std::size_t>(u)].erase(best);
    adj[static_cast<std::size_t>(best)].clear();
  }
  return result;
}

bool is_chordal(const UndirectedGraph& g) {
  // Maximum-cardinality search followed by a perfect-elimination check.
  const int n = g.size();
  std::vector<int> weight(static_cast<std::size_t>(n), 0);
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::vector<int> order;
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!visited[static_cast<std::size_t>(v)] &&
          (best == -1 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)])) {
        best = v;
      }
    }
    visited[static_cast<std::size_t>(best)] = true;
    position[static_cast<std::size_t>(best)] = step;
    order.push_back(best);
    for (int u : g.adjacency[static_cast<std::size_t>(best)]) {
      if (!visited[static_cast<std::size_t>(u)]) ++weight[static_cast<std::size_t>(u)];
    }
  }
  // Reverse MCS order is a candidate perfect elimination order.
  for (int i = n - 1; i >= 0; --i) {
    int v = order[static_cast<std::size_t>(i)];
    // Earlier-ordered neighbors must form a clique through their latest member.
    int latest = -1;
    std::vector<int> earlier;
    for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
      if (position[static_cast<std::size_t>(u)] < position[static_cast<std::size_t>(v)]) {
        earlier.push_back(u);
        if (latest == -1 ||
            position[static_cast<std::size_t>(u)] > position[static_cast<std::size_t>(latest)]) {
          latest = u;
        }
      }
    }
    for (int u : earlier) {
      if (u != latest && !g.has_edge(u, latest)) return false;
    }
  }
  return true;
}

CardMap JunctionTree::cardinalities() const {
  CardMap cards(variables.size(), 0);
  for (const Variable& v : variables) cards[static_cast<std::size_t>(v.id)] = v.cardinality;
  return cards;
}

int JunctionTree::separator_between(int u, int v) const {
  for (const auto& [nb, sep] : adjacency[static_cast<std::size_t>(u)]) {
    if (nb == v) return sep;
  }
  return -1;
}

int JunctionTree::home_clique(int var_id) const {
  int best = -1;
  for (const CliqueNode& c : cliques) {
    if (!scope_contains(c.scope, var_id)) continue;
    if (best == -1 || c.scope.size() < cliques[static_cast<std::size_t>(best)].scope.size()) {
      best = c.id;
    }
  }
  if (best == -1) throw std::invalid_argument("unknown variable id " + std::to_string(var_id));
  return best;
}

std::vector<int> JunctionTree::cliques_containing(int var_id) const {
  std::vector<int> out;
  for (const CliqueNode& c : cliques) {
    if (scope_contains(c.scope, var_id)) out.push_back(c.id);
  }
  return out;
}

std::vector<int> JunctionTree::path(int from, int to) const {
  std::vector<int> prev(cliques.size(), -1);
  std::deque<int> queue{from};
  std::vector<bool> seen(cliques.size(), false);
  seen[static_cast<std::size_t>(from)] = true;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (v == to) break;
    for (const auto& [nb, sep] : adjacency[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(nb)]) {
        seen[static_cast<std::size_t>(nb)] = true;
        prev[static_cast<std::size_t>(nb)] = v;
        queue.push_back(nb);
      }
    }
  }
  std::vector<int> out;
  for (int v = to; v != -1; v = prev[static_cast<std::size_t>(v)]) out.push_back(v);
  std::reverse(out.begin(), out.end());
  if (out.empty() || out.front() != from) throw InternalError("path: cliques not connected");
  return out;
}

void JunctionTree::set_pivot(int clique_id) {
  const int n = num_cliques();
  pivot = clique_id;
  parent.assign(static_cast<std::size_t>(n), -1);
  parent_sep.assign(static_cast<std::size_t>(n), -1);
  children.assign(static_cast<std::size_t>(n), {});
  depth.assign(static_cast<std::size_t>(n), 0);
  dfs_labels.assign(static_cast<std::size_t>(n), -1);
  dfs_order.clear();
  dfs_order.reserve(static_cast<std::size_t>(n));

  // Iterative DFS, children pushed in descending id so they pop ascending.
  std::vector<int> stack{pivot};
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  seen[static_cast<std::size_t>(pivot)] = true;
  int label = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    dfs_labels[static_cast<std::size_t>(v)] = label++;
    dfs_order.push_back(v);
    std::vector<std::pair<int, int>> nbs = adjacency[static_cast<std::size_t>(v)];
    std::sort(nbs.begin(), nbs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [nb, sep] : nbs) {
      if (seen[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = true;
      parent[static_cast<std::size_t>(nb)] = v;
      parent_sep[static_cast<std::size_t>(nb)] = sep;
      depth[static_cast<std::size_t>(nb)] = depth[static_cast<std::size_t>(v)] + 1;
      children[static_cast<std::size_t>(v)].push_back(nb);
      stack.push_back(nb);
    }
    std::sort(children[static_cast<std::size_t>(v)].begin(),
              children[static_cast<std::size_t>(v)].end());
  }
  if (label != n) throw InternalError("set_pivot: clique tree is not connected");
}

Scope JunctionTree::subtree_scope(int v) const {
  Scope out = cliques[static_cast<std::size_t>(v)].scope;
  for (int c : children[static_cast<std::size_t>(v)]) {
    out = scope_union(out, subtree_scope(c));
  }
  return out;
}

int JunctionTree::treewidth() const {
  std::size_t m = 0;
  for (const CliqueNode& c : cliques) m = std::max(m, c.scope.size());
  return static_cast<int>(m) - 1;
}

int JunctionTree::diameter_nodes() const {
  // Two BFS sweeps.
  auto farthest = [&](int start) {
    std::vector<int> dist(cliques.size(), -1);
    dist[static_cast<std::size_t>(start)] = 0;
    std::deque<int> q{start};
    int best = start;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (dist[static_cast<std::size_t>(v)] > dist[static_cast<std::size_t>(best)]) best = v;
      for (const auto& [nb, sep] : adjacency[static_cast<std::size_t>(v)]) {
        if (dist[static_cast<std::size_t>(nb)] == -1) {
          dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(v)] + 1;
          q.push_back(nb);
        }
      }
    }
    return std::make_pair(best, dist[static_cast<std::size_t>(best)]);
  };
  auto [a, d0] = farthest(0);
  auto [b, d] = farthest(a);
  return d + 1;
}

std::int64_t JunctionTree::total_separator_size() const {
  std::int64_t n = 0;
  for (const Separator& s : separators) n += s.potential.size();
  return n;
}

JunctionTree build_clique_tree(const UndirectedGraph& chordal,
                               const std::vector<Variable>& variables) {
  if (!is_chordal(chordal)) throw InternalError("build_clique_tree: input graph is not chordal");

  // Maximal cliques from an elimination sweep over the chordal graph.
  TriangulationResult t = triangulate(chordal);
  if (t.fill_edges != 0) throw InternalError("build_clique_tree: chordal graph produced fill");

  std::vector<std::set<int>> adj(static_cast<std::size_t>(chordal.size()));
  for (int v = 0; v < chordal.size(); ++v) {
    adj[static_cast<std::size_t>(v)] = {chordal.adjacency[static_cast<std::size_t>(v)].begin(),
                                        chordal.adjacency[static_cast<std::size_t>(v)].end()};
  }
  std::vector<Scope> cliques;
  std::vector<bool> eliminated(static_cast<std::size_t>(chordal.size()), false);
  for (int v : t.elimination_order) {
    std::vector<int> members{v};
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (!eliminated[static_cast<std::size_t>(u)]) members.push_back(u);
    }
    Scope c = make_scope(members);
    bool maximal = true;
    for (const Scope& other : cliques) {
      if (scope_contains(other, c)) {
        maximal = false;
        break;
      }
    }
    // A clique found later can never strictly contain an earlier one in a
    // perfect elimination sweep, so a forward check suffices.
    if (maximal) cliques.push_back(std::move(c));
    eliminated[static_cast<std::size_t>(v)] = true;
  }

  JunctionTree jt;
  jt.variables = variables;
  CardMap cards(variables.size(), 0);
  for (const Variable& v : variables) cards[static_cast<std::size_t>(v.id)] = v.cardinality;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    CliqueNode node;
    node.id = static_cast<int>(i);
    node.scope = cliques[i];
    node.size = table_size(node.scope, cards);
    jt.cliques.push_back(std::move(node));
  }
  jt.adjacency.assign(cliques.size(), {});

  // Maximum spanning tree over pairwise intersections (Kruskal, weight
  // descending, ties by lexicographic endpoint ids). Zero-weight edges are
  // admitted last so disconnected components still join into one tree.
  struct Edge {
    int w, u, v;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (std::size_t j = i + 1; j < cliques.size(); ++j) {
      int w = static_cast<int>(scope_intersect(cliques[i], cliques[j]).size());
      edges.push_back({w, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  std::vector<int> comp(cliques.size());
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (comp[static_cast<std::size_t>(x)] != x) {
      comp[static_cast<std::size_t>(x)] = comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(x)])];
      x = comp[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const Edge& e : edges) {
    int a = find(e.u), b = find(e.v);
    if (a == b) continue;
    comp[static_cast<std::size_t>(a)] = b;
    Separator sep;
    sep.u = std::min(e.u, e.v);
    sep.v = std::max(e.u, e.v);
    sep.scope = scope_intersect(cliques[static_cast<std::size_t>(e.u)],
                                cliques[static_cast<std::size_t>(e.v)]);
    std::vector<int> sep_cards(sep.scope.size());
    for (std::size_t k = 0; k < sep.scope.size(); ++k) {
      sep_cards[k] = cards[static_cast<std::size_t>(sep.scope[k])];
    }
    sep.potential = DiscreteFactor::ones(sep.scope, sep_cards);
    int idx = static_cast<int>(jt.separators.size());
    jt.adjacency[static_cast<std::size_t>(e.u)].push_back({e.v, idx});
    jt.adjacency[static_cast<std::size_t>(e.v)].push_back({e.u, idx});
    jt.separators.push_back(std::move(sep));
  }
  for (auto& nbs : jt.adjacency) {
    std::sort(nbs.begin(), nbs.end());
  }
  if (jt.separators.size() + 1 != jt.cliques.size()) {
    throw InternalError("build_clique_tree: spanning tree construction failed");
  }

  // Placeholder potentials so the structure is usable before initialization.
  for (CliqueNode& c : jt.cliques) {
    std::vector<int> ccards(c.scope.size());
    for (std::size_t k = 0; k < c.scope.size(); ++k) ccards[k] = cards[static_cast<std::size_t>(c.scope[k])];
    c.potential = DiscreteFactor::ones(c.scope, ccards);
  }

  jt.set_pivot(choose_pivot(jt));
  if (!running_intersection_holds(jt)) {
    throw InternalError("build_clique_tree: running-intersection property violated");
  }
  return jt;
}

bool running_intersection_holds(const JunctionTree& jt) {
  for (const Variable& var : jt.variables) {
    std::vector<int> holders = jt.cliques_containing(var.id);
    if (holders.empty()) return false;
    // The holders must induce a connected subtree.
    std::set<int> holder_set(holders.begin(), holders.end());
    std::set<int> seen{holders[0]};
    std::deque<int> q{holders[0]};
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (const auto& [nb, sep] : jt.adjacency[static_cast<std::size_t>(v)]) {
        if (holder_set.count(nb) && !seen.count(nb)) {
          seen.insert(nb);
          q.push_back(nb);
        }
      }
    }
    if (seen.size() != holder_set.size()) return false;
  }
  return true;
}

int choose_pivot(const JunctionTree& jt) {
  const int n = jt.num_cliques();
  int best = -1, best_ecc = std::numeric_limits<int>::max();
  for (int v = 0; v < n; ++v) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    dist[static_cast<std::size_t>(v)] = 0;
    std::deque<int> q{v};
    int ecc = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      ecc = std::max(ecc, dist[static_cast<std::size_t>(u)]);
      for (const auto& [nb, sep] : jt.adjacency[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(nb)] == -1) {
          dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(u)] + 1;
          q.push_back(nb);
        }
      }
    }
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = v;
    }
  }
  return best;
}

void initialize_potentials(const BayesianNetwork& bn, JunctionTree& jt) {
  CardMap cards = jt.cardinalities();
  std::vector<std::vector<int>> assigned(jt.cliques.size());
  for (int v = 0; v < bn.num_variables(); ++v) {
    const Scope& cpt_scope = bn.cpts[static_cast<std::size_t>(v)].scope();
    int best = -1;
    for (const CliqueNode& c : jt.cliques) {
      if (!scope_contains(c.scope, cpt_scope)) continue;
      if (best == -1 || c.scope.size() < jt.cliques[static_cast<std::size_t>(best)].scope.size()) {
        best = c.id;
      }
    }
    if (best == -1) {
      throw InternalError("initialize_potentials: CPT of variable " + std::to_string(v) +
                          " fits no clique");
    }
    assigned[static_cast<std::size_t>(best)].push_back(v);
  }
  for (CliqueNode& c : jt.cliques) {
    std::vector<int> ccards(c.scope.size());
    for (std::size_t k = 0; k < c.scope.size(); ++k) ccards[k] = cards[static_cast<std::size_t>(c.scope[k])];
    DiscreteFactor pot = DiscreteFactor::ones(c.scope, ccards);
    for (int v : assigned[static_cast<std::size_t>(c.id)]) {
      pot = product(pot, bn.cpts[static_cast<std::size_t>(v)]);
    }
    c.potential = std::move(pot);
  }
  for (Separator& s : jt.separators) {
    std::vector<int> scards(s.scope.size());
    for (std::size_t k = 0; k < s.scope.size(); ++k) scards[k] = cards[static_cast<std::size_t>(s.scope[k])];
    s.potential = DiscreteFactor::ones(s.scope, scards);
  }
  jt.calibrated = false;
}

namespace {

// Hugin absorption across one separator: target *= new_sep / old_sep.
void pass_message(JunctionTree& jt, int from, int to) {
  int sep_idx = jt.separator_between(from, to);
  Separator& sep = jt.separators[static_cast<std::size_t>(sep_idx)];
  DiscreteFactor message = marginalize(jt.cliques[static_cast<std::size_t>(from)].potential, sep.scope);
  DiscreteFactor update = divide(message, sep.potential);
  jt.cliques[static_cast<std::size_t>(to)].potential =
      product(jt.cliques[static_cast<std::size_t>(to)].potential, update);
  sep.potential = std::move(message);
}

}  // namespace

void calibrate(JunctionTree& jt) {
  // Collect toward the pivot in reverse dfs order, distribute back in dfs
  // order.
  for (auto it = jt.dfs_order.rbegin(); it != jt.dfs_order.rend(); ++it) {
    int v = *it;
    if (v != jt.pivot) pass_message(jt, v, jt.parent[static_cast<std::size_t>(v)]);
  }
  for (int v : jt.dfs_order) {
    if (v != jt.pivot) pass_message(jt, jt.parent[static_cast<std::size_t>(v)], v);
  }

  // Remove the global mass so each table is a proper distribution even when
  // the input CPT rows carried rounded entries.
  double z = jt.cliques[static_cast<std::size_t>(jt.pivot)].potential.sum();
  if (!(z > 0.0)) throw std::domain_error("calibrate: zero total mass");
  auto rescale = [z](DiscreteFactor& f) {
    std::vector<double> vals = f.values();
    for (double& v : vals) v /= z;
    f = DiscreteFactor(f.scope(), f.cards(), std::move(vals));
  };
  for (CliqueNode& c : jt.cliques) rescale(c.potential);
  for (Separator& s : jt.separators) rescale(s.potential);
  jt.calibrated = true;
}

DiscreteFactor marginal(const JunctionTree& jt, int var_id) {
  if (var_id < 0 || var_id >= static_cast<int>(jt.variables.size())) {
    throw std::invalid_argument("marginal: unknown variable id");
  }
  int home = jt.home_clique(var_id);
  return normalize(marginalize(jt.cliques[static_cast<std::size_t>(home)].potential, {var_id}));
}

JunctionTree build_junction_tree(const BayesianNetwork& bn) {
  UndirectedGraph moral = moralize(bn);
  TriangulationResult tri = triangulate(moral);
  JunctionTree jt = build_clique_tree(tri.chordal, bn.variables);
  initialize_potentials(bn, jt);
  calibrate(jt);
  return jt;
}

}  // namespace jtmat

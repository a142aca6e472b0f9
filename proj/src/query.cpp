#include "jtmat/query.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "jtmat/errors.hpp"
#include "jtmat/materialize.hpp"

namespace jtmat {

std::vector<std::vector<std::pair<int, int>>> SteinerTree::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[static_cast<std::size_t>(edges[e].a)].push_back({edges[e].b, static_cast<int>(e)});
    adj[static_cast<std::size_t>(edges[e].b)].push_back({edges[e].a, static_cast<int>(e)});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

int SteinerTree::diameter_nodes() const {
  auto adj = adjacency();
  auto farthest = [&](int start) {
    std::vector<int> dist(nodes.size(), -1);
    dist[static_cast<std::size_t>(start)] = 0;
    std::deque<int> q{start};
    int best = start;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (dist[static_cast<std::size_t>(v)] > dist[static_cast<std::size_t>(best)]) best = v;
      for (const auto& [nb, e] : adj[static_cast<std::size_t>(v)]) {
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

bool SteinerTree::covers(const Scope& variables) const {
  for (int var : variables) {
    bool found = false;
    for (const Node& n : nodes) {
      if (scope_contains(n.scope, var)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

void check_query(const JunctionTree& jt, const Query& q) {
  if (q.variables.empty()) throw std::invalid_argument("query has no variables");
  if (!is_canonical_scope(q.variables)) throw std::invalid_argument("query scope not canonical");
  for (int v : q.variables) {
    if (v < 0 || v >= static_cast<int>(jt.variables.size())) {
      throw std::invalid_argument("query references unknown variable id " + std::to_string(v));
    }
  }
}

}  // namespace

SteinerTree steiner_tree(const JunctionTree& jt, const Query& q) {
  check_query(jt, q);
  std::vector<std::pair<int, int>> homes;  // (var, home clique)
  std::set<int> home_set;
  for (int var : q.variables) {
    int h = jt.home_clique(var);
    homes.push_back({var, h});
    home_set.insert(h);
  }

  // Count home cliques in each rooted subtree; an edge (v, parent) belongs
  // to the Steiner tree iff it separates homes.
  const int n = jt.num_cliques();
  std::vector<int> cnt(static_cast<std::size_t>(n), 0);
  for (int h : home_set) cnt[static_cast<std::size_t>(h)] = 1;
  for (auto it = jt.dfs_order.rbegin(); it != jt.dfs_order.rend(); ++it) {
    int v = *it;
    if (v != jt.pivot) {
      cnt[static_cast<std::size_t>(jt.parent[static_cast<std::size_t>(v)])] +=
          cnt[static_cast<std::size_t>(v)];
    }
  }
  const int total = static_cast<int>(home_set.size());
  std::set<int> members(home_set);
  for (int v = 0; v < n; ++v) {
    if (v == jt.pivot) continue;
    if (cnt[static_cast<std::size_t>(v)] >= 1 && cnt[static_cast<std::size_t>(v)] < total) {
      members.insert(v);
      members.insert(jt.parent[static_cast<std::size_t>(v)]);
    }
  }

  SteinerTree st;
  std::vector<int> index_of(static_cast<std::size_t>(n), -1);
  for (int v : members) {  // std::set iterates ascending: node order by clique id
    index_of[static_cast<std::size_t>(v)] = st.num_nodes();
    SteinerTree::Node node;
    node.clique_id = v;
    node.scope = jt.cliques[static_cast<std::size_t>(v)].scope;
    node.potential = &jt.cliques[static_cast<std::size_t>(v)].potential;
    st.nodes.push_back(std::move(node));
  }
  for (int v : members) {
    int p = jt.parent[static_cast<std::size_t>(v)];
    if (v == jt.pivot || !members.count(p)) continue;
    SteinerTree::Edge e;
    e.a = index_of[static_cast<std::size_t>(p)];
    e.b = index_of[static_cast<std::size_t>(v)];
    e.separator_index = jt.parent_sep[static_cast<std::size_t>(v)];
    const Separator& sep = jt.separators[static_cast<std::size_t>(e.separator_index)];
    e.sep_scope = sep.scope;
    e.sep_potential = &sep.potential;
    st.edges.push_back(std::move(e));
  }
  // Pivot of the Steiner tree: member closest to the junction-tree pivot.
  int best = -1;
  for (int v : members) {
    if (best == -1 ||
        jt.depth[static_cast<std::size_t>(v)] < jt.depth[static_cast<std::size_t>(best)]) {
      best = v;
    }
  }
  st.pivot = index_of[static_cast<std::size_t>(best)];
  for (const auto& [var, h] : homes) st.terminals.push_back({var, index_of[static_cast<std::size_t>(h)]});
  return st;
}

namespace {

// Schedule: children lists rooted at the pivot, processed post-order with
// ascending node indices for determinism.
struct Schedule {
  std::vector<int> order;   // post-order, pivot last
  std::vector<int> parent;  // node index -> parent node index (-1 at pivot)
  std::vector<int> parent_edge;
};

Schedule make_schedule(const SteinerTree& st) {
  auto adj = st.adjacency();
  Schedule s;
  s.parent.assign(st.nodes.size(), -1);
  s.parent_edge.assign(st.nodes.size(), -1);
  std::vector<int> pre;
  std::vector<int> stack{st.pivot};
  std::vector<bool> seen(st.nodes.size(), false);
  seen[static_cast<std::size_t>(st.pivot)] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    pre.push_back(v);
    for (auto it = adj[static_cast<std::size_t>(v)].rbegin();
         it != adj[static_cast<std::size_t>(v)].rend(); ++it) {
      auto [nb, e] = *it;
      if (seen[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = true;
      s.parent[static_cast<std::size_t>(nb)] = v;
      s.parent_edge[static_cast<std::size_t>(nb)] = e;
      stack.push_back(nb);
    }
  }
  if (pre.size() != st.nodes.size()) {
    throw InternalError("steiner tree is not connected");
  }
  s.order.assign(pre.rbegin(), pre.rend());
  return s;
}

}  // namespace

QueryResult message_passing(const SteinerTree& st, const Query& q, const CardMap& cards) {
  Schedule sched = make_schedule(st);
  std::vector<DiscreteFactor> message(st.nodes.size());
  std::vector<std::vector<int>> incoming(st.nodes.size());
  for (int v : sched.order) {
    if (v == st.pivot) continue;
    incoming[static_cast<std::size_t>(sched.parent[static_cast<std::size_t>(v)])].push_back(v);
  }
  for (auto& in : incoming) std::sort(in.begin(), in.end());

  QueryResult result;
  for (int v : sched.order) {
    DiscreteFactor combined = *st.nodes[static_cast<std::size_t>(v)].potential;
    std::int64_t k = 0;
    for (int child : incoming[static_cast<std::size_t>(v)]) {
      combined = product(combined, message[static_cast<std::size_t>(child)]);
      ++k;
    }
    result.cost += (k + 1) * combined.size();
    if (v == st.pivot) {
      if (!scope_contains(combined.scope(), q.variables)) {
        throw InternalError("message passing lost a query variable");
      }
      result.answer = normalize(marginalize(combined, q.variables));
    } else {
      const SteinerTree::Edge& e =
          st.edges[static_cast<std::size_t>(sched.parent_edge[static_cast<std::size_t>(v)])];
      Scope keep = scope_intersect(combined.scope(), scope_union(e.sep_scope, q.variables));
      message[static_cast<std::size_t>(v)] =
          divide(marginalize(combined, keep), *e.sep_potential);
    }
  }
  (void)cards;
  return result;
}

std::int64_t query_cost(const SteinerTree& st, const Query& q, const CardMap& cards) {
  Schedule sched = make_schedule(st);
  std::vector<Scope> message(st.nodes.size());
  std::vector<std::vector<int>> incoming(st.nodes.size());
  for (int v : sched.order) {
    if (v == st.pivot) continue;
    incoming[static_cast<std::size_t>(sched.parent[static_cast<std::size_t>(v)])].push_back(v);
  }
  std::int64_t cost = 0;
  for (int v : sched.order) {
    Scope u = st.nodes[static_cast<std::size_t>(v)].scope;
    std::int64_t k = 0;
    for (int child : incoming[static_cast<std::size_t>(v)]) {
      u = scope_union(u, message[static_cast<std::size_t>(child)]);
      ++k;
    }
    cost += (k + 1) * table_size(u, cards);
    if (v != st.pivot) {
      const SteinerTree::Edge& e =
          st.edges[static_cast<std::size_t>(sched.parent_edge[static_cast<std::size_t>(v)])];
      message[static_cast<std::size_t>(v)] =
          scope_intersect(u, scope_union(e.sep_scope, q.variables));
    }
  }
  return cost;
}

namespace {

// Assigns each Steiner node to a group: its own singleton or the shortcut
// region that swallows it. Returns -1-based stand-in group ids.
struct Grouping {
  std::vector<int> shortcut_of;  // node idx -> index into `selected`, or -1
};

Grouping group_nodes(const SteinerTree& st,
                     const std::vector<const ShortcutPotential*>& selected) {
  Grouping g;
  g.shortcut_of.assign(st.nodes.size(), -1);
  for (std::size_t si = 0; si < selected.size(); ++si) {
    for (std::size_t i = 0; i < st.nodes.size(); ++i) {
      int cid = st.nodes[i].clique_id;
      if (cid >= 0 && selected[si]->contains_clique(cid)) {
        if (g.shortcut_of[i] != -1) {
          throw std::invalid_argument("selected shortcuts overlap");
        }
        g.shortcut_of[i] = static_cast<int>(si);
      }
    }
  }
  return g;
}

}  // namespace

SteinerTree reduce_with_shortcuts(const JunctionTree& jt, const SteinerTree& st, const Query& q,
                                  const std::vector<const ShortcutPotential*>& selected) {
  if (selected.empty()) return st;
  for (const ShortcutPotential* s : selected) {
    if (!s->table.has_value()) {
      throw std::invalid_argument("reduce_with_shortcuts: shortcut not materialized");
    }
    if (!usefulness(*s, q, jt)) {
      throw std::invalid_argument("reduce_with_shortcuts: shortcut not useful for the query");
    }
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    for (std::size_t j = i + 1; j < selected.size(); ++j) {
      std::vector<int> common;
      std::set_intersection(selected[i]->nodes.begin(), selected[i]->nodes.end(),
                            selected[j]->nodes.begin(), selected[j]->nodes.end(),
                            std::back_inserter(common));
      if (!common.empty()) throw std::invalid_argument("selected shortcuts overlap");
    }
  }
  (void)jt;

  Grouping g = group_nodes(st, selected);
  SteinerTree out;
  std::vector<int> node_map(st.nodes.size(), -1);
  std::vector<int> standin_index(selected.size(), -1);
  for (std::size_t i = 0; i < st.nodes.size(); ++i) {
    int si = g.shortcut_of[i];
    if (si == -1) {
      node_map[i] = out.num_nodes();
      out.nodes.push_back(st.nodes[i]);
    } else if (standin_index[static_cast<std::size_t>(si)] == -1) {
      standin_index[static_cast<std::size_t>(si)] = out.num_nodes();
      node_map[i] = out.num_nodes();
      SteinerTree::Node node;
      node.clique_id = -1;
      node.shortcut_id = selected[static_cast<std::size_t>(si)]->id;
      node.scope = selected[static_cast<std::size_t>(si)]->scope;
      node.potential = &selected[static_cast<std::size_t>(si)]->table.value();
      out.nodes.push_back(std::move(node));
    } else {
      node_map[i] = standin_index[static_cast<std::size_t>(si)];
    }
  }
  for (const SteinerTree::Edge& e : st.edges) {
    int a = node_map[static_cast<std::size_t>(e.a)];
    int b = node_map[static_cast<std::size_t>(e.b)];
    if (a == b) continue;  // edge internal to a contracted region
    SteinerTree::Edge ne = e;
    ne.a = a;
    ne.b = b;
    out.edges.push_back(std::move(ne));
  }
  out.pivot = node_map[static_cast<std::size_t>(st.pivot)];
  for (const auto& [var, node] : st.terminals) {
    out.terminals.push_back({var, node_map[static_cast<std::size_t>(node)]});
  }
  return out;
}

std::vector<const ShortcutPotential*> select_shortcuts_online(const JunctionTree& jt,
                                                              const SteinerTree& st, const Query& q,
                                                              const Catalog& catalog) {
  std::int64_t base = query_cost(st, q, jt.cardinalities());
  std::vector<const ShortcutPotential*> useful;
  for (const ShortcutPotential& s : catalog.shortcuts) {
    if (usefulness_for_tree(jt, st, base, q, s)) useful.push_back(&s);
  }
  if (useful.empty()) return useful;

  // Conflict graph: edge between overlapping shortcut subtrees.
  const int m = static_cast<int>(useful.size());
  std::vector<std::vector<char>> conflict(static_cast<std::size_t>(m),
                                          std::vector<char>(static_cast<std::size_t>(m), 0));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::vector<int> common;
      std::set_intersection(useful[static_cast<std::size_t>(i)]->nodes.begin(),
                            useful[static_cast<std::size_t>(i)]->nodes.end(),
                            useful[static_cast<std::size_t>(j)]->nodes.begin(),
                            useful[static_cast<std::size_t>(j)]->nodes.end(),
                            std::back_inserter(common));
      if (!common.empty()) {
        conflict[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
        conflict[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
      }
    }
  }

  // GWMIN: repeatedly take the vertex maximizing weight/(degree+1) in the
  // residual graph, then delete its closed neighborhood.
  std::vector<bool> alive(static_cast<std::size_t>(m), true);
  std::vector<const ShortcutPotential*> chosen;
  while (true) {
    int best = -1;
    double best_score = -1.0;
    for (int i = 0; i < m; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      int deg = 0;
      for (int j = 0; j < m; ++j) {
        if (j != i && alive[static_cast<std::size_t>(j)] &&
            conflict[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
          ++deg;
        }
      }
      double score = useful[static_cast<std::size_t>(i)]->ratio / (deg + 1);
      if (score > best_score ||
          (score == best_score && best != -1 &&
           useful[static_cast<std::size_t>(i)]->id < useful[static_cast<std::size_t>(best)]->id)) {
        best = i;
        best_score = score;
      }
    }
    if (best == -1) break;
    chosen.push_back(useful[static_cast<std::size_t>(best)]);
    alive[static_cast<std::size_t>(best)] = false;
    for (int j = 0; j < m; ++j) {
      if (conflict[static_cast<std::size_t>(best)][static_cast<std::size_t>(j)]) {
        alive[static_cast<std::size_t>(j)] = false;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const ShortcutPotential* a, const ShortcutPotential* b) { return a->id < b->id; });
  return chosen;
}

QueryResult answer_query(const JunctionTree& jt, const Query& q, const Catalog& catalog) {
  SteinerTree st = steiner_tree(jt, q);
  CardMap cards = jt.cardinalities();
  std::int64_t base = query_cost(st, q, cards);
  std::vector<const ShortcutPotential*> selected = select_shortcuts_online(jt, st, q, catalog);

  // Individually useful shortcuts can in rare cases stop composing (a
  // variable or the cost advantage may vanish when several regions
  // collapse at once); drop the weakest until the reduction is sound.
  SteinerTree reduced;
  while (!selected.empty()) {
    reduced = reduce_with_shortcuts(jt, st, q, selected);
    if (reduced.covers(q.variables) && query_cost(reduced, q, cards) <= base) break;
    auto weakest = std::min_element(selected.begin(), selected.end(),
                                    [](const ShortcutPotential* a, const ShortcutPotential* b) {
                                      if (a->ratio != b->ratio) return a->ratio < b->ratio;
                                      return a->id > b->id;
                                    });
    selected.erase(weakest);
  }

  QueryResult result = selected.empty() ? message_passing(st, q, cards)
                                        : message_passing(reduced, q, cards);
  for (const ShortcutPotential* s : selected) result.shortcuts_used.push_back(s->id);
  std::sort(result.shortcuts_used.begin(), result.shortcuts_used.end());
  return result;
}

}  // namespace jtmat

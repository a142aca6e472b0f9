#include "jtmat/shortcuts.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

bool ShortcutPotential::contains_clique(int clique_id) const {
  return std::binary_search(nodes.begin(), nodes.end(), clique_id);
}

CutInfo enumerate_cut(const JunctionTree& jt, const std::vector<int>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("enumerate_cut: empty node set");
  std::set<int> inside(nodes.begin(), nodes.end());
  for (int v : nodes) {
    if (v < 0 || v >= jt.num_cliques()) {
      throw std::invalid_argument("enumerate_cut: unknown clique id");
    }
  }
  // Connectivity within the induced subgraph.
  std::set<int> seen{nodes[0]};
  std::deque<int> q{nodes[0]};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const auto& [nb, sep] : jt.adjacency[static_cast<std::size_t>(v)]) {
      if (inside.count(nb) && !seen.count(nb)) {
        seen.insert(nb);
        q.push_back(nb);
      }
    }
  }
  if (seen.size() != inside.size()) {
    throw std::invalid_argument("enumerate_cut: node set does not induce a connected subtree");
  }

  CutInfo out;
  for (std::size_t i = 0; i < jt.separators.size(); ++i) {
    const Separator& s = jt.separators[i];
    bool u_in = inside.count(s.u) > 0;
    bool v_in = inside.count(s.v) > 0;
    if (u_in != v_in) {
      out.cut.push_back(static_cast<int>(i));
      out.scope = scope_union(out.scope, s.scope);
    }
  }
  out.cost = table_size(out.scope, jt.cardinalities());
  return out;
}

ShortcutPotential make_shortcut(const JunctionTree& jt, std::vector<int> nodes, int id) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  CutInfo info = enumerate_cut(jt, nodes);
  ShortcutPotential s;
  s.id = id;
  s.nodes = std::move(nodes);
  s.cut = std::move(info.cut);
  s.scope = std::move(info.scope);
  s.cost = info.cost;
  // Root: the member closest to the pivot.
  s.root = s.nodes[0];
  for (int v : s.nodes) {
    if (jt.depth[static_cast<std::size_t>(v)] < jt.depth[static_cast<std::size_t>(s.root)]) {
      s.root = v;
    }
  }
  return s;
}

DiscreteFactor materialize_table(const JunctionTree& jt, const ShortcutPotential& s) {
  if (!jt.calibrated) throw std::invalid_argument("materialize_table: tree is not calibrated");

  // Message passing restricted to T_S, rooted at the shortcut root, keeping
  // X_S variables throughout. Internal separators divide out so the result
  // is the plain joint of X_S.
  std::set<int> inside(s.nodes.begin(), s.nodes.end());
  std::vector<int> order;  // nodes in BFS order from root
  std::vector<int> up(static_cast<std::size_t>(jt.num_cliques()), -1);
  std::deque<int> q{s.root};
  std::set<int> seen{s.root};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    order.push_back(v);
    for (const auto& [nb, sep] : jt.adjacency[static_cast<std::size_t>(v)]) {
      if (inside.count(nb) && !seen.count(nb)) {
        seen.insert(nb);
        up[static_cast<std::size_t>(nb)] = v;
        q.push_back(nb);
      }
    }
  }

  std::vector<DiscreteFactor> pending(static_cast<std::size_t>(jt.num_cliques()));
  std::vector<bool> has_pending(static_cast<std::size_t>(jt.num_cliques()), false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    DiscreteFactor combined = jt.cliques[static_cast<std::size_t>(v)].potential;
    for (const auto& [nb, sep] : jt.adjacency[static_cast<std::size_t>(v)]) {
      if (up[static_cast<std::size_t>(nb)] == v && has_pending[static_cast<std::size_t>(nb)]) {
        combined = product(combined, pending[static_cast<std::size_t>(nb)]);
      }
    }
    if (v == s.root) {
      return normalize(marginalize(combined, scope_intersect(combined.scope(), s.scope)));
    }
    int parent = up[static_cast<std::size_t>(v)];
    int sep_idx = jt.separator_between(v, parent);
    const Separator& sep = jt.separators[static_cast<std::size_t>(sep_idx)];
    Scope keep = scope_intersect(combined.scope(), scope_union(sep.scope, s.scope));
    DiscreteFactor message = divide(marginalize(combined, keep), sep.potential);
    pending[static_cast<std::size_t>(v)] = std::move(message);
    has_pending[static_cast<std::size_t>(v)] = true;
  }
  throw InternalError("materialize_table: root not reached");
}

const ShortcutPotential* Catalog::find(int id) const {
  for (const ShortcutPotential& s : shortcuts) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

}  // namespace jtmat

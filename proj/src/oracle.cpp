#include "jtmat/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

DiscreteFactor oracle_joint(const BayesianNetwork& bn) {
  CardMap cards = bn.cardinalities();
  std::int64_t states = 1;
  for (const Variable& v : bn.variables) {
    states *= v.cardinality;
    if (states > (1 << 20)) {
      throw std::invalid_argument("oracle_joint: state space exceeds 2^20");
    }
  }
  DiscreteFactor joint = DiscreteFactor::scalar(1.0);
  for (const DiscreteFactor& cpt : bn.cpts) joint = product(joint, cpt);
  return joint;
}

namespace {

struct PathItem {
  double b = 0.0;
  std::int64_t w = 0;
};

// Independent recomputation of the path-shortcut value for each node below
// the root: nodes path(parent(v), root), cost and benefit from first
// principles.
std::map<int, PathItem> path_items(const JunctionTree& jt, int root, const BenefitContext& ctx) {
  std::map<int, PathItem> items;
  std::vector<int> stack(jt.children[static_cast<std::size_t>(root)].begin(),
                         jt.children[static_cast<std::size_t>(root)].end());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    std::vector<int> path_nodes;
    for (int u = jt.parent[static_cast<std::size_t>(v)];; u = jt.parent[static_cast<std::size_t>(u)]) {
      path_nodes.push_back(u);
      if (u == root) break;
    }
    ShortcutPotential s = make_shortcut(jt, path_nodes);
    items[v] = {benefit_log(ctx, s), s.cost};
    for (int c : jt.children[static_cast<std::size_t>(v)]) stack.push_back(c);
  }
  return items;
}

std::vector<int> subtree_nodes(const JunctionTree& jt, int root) {
  std::vector<int> nodes;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    nodes.push_back(v);
    for (int c : jt.children[static_cast<std::size_t>(v)]) stack.push_back(c);
  }
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

bool is_ancestor(const JunctionTree& jt, int a, int b) {
  // True iff a is a proper ancestor of b under the pivot rooting.
  for (int u = jt.parent[static_cast<std::size_t>(b)]; u != -1;
       u = jt.parent[static_cast<std::size_t>(u)]) {
    if (u == a) return true;
  }
  return false;
}

struct Antichain {
  double j = 0.0;
  std::int64_t w = 0;
  std::vector<int> terminals;  // sorted clique ids
};

// Every cut-terminal antichain in the subtree below `root` within budget.
std::vector<Antichain> enumerate_antichains(const JunctionTree& jt, int root, std::int64_t budget,
                                            const std::map<int, PathItem>& items) {
  std::vector<int> below;
  for (int v : subtree_nodes(jt, root)) {
    if (v != root) below.push_back(v);
  }
  const int m = static_cast<int>(below.size());
  if (m > 20) throw std::invalid_argument("oracle: subtree too large for enumeration");
  std::vector<Antichain> out;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Antichain a;
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      const PathItem& item = items.at(below[static_cast<std::size_t>(i)]);
      a.j += item.b;
      a.w += item.w;
      if (a.w > budget) ok = false;
      a.terminals.push_back(below[static_cast<std::size_t>(i)]);
    }
    if (!ok) continue;
    for (std::size_t x = 0; x < a.terminals.size() && ok; ++x) {
      for (std::size_t y = 0; y < a.terminals.size() && ok; ++y) {
        if (x != y && is_ancestor(jt, a.terminals[x], a.terminals[y])) ok = false;
      }
    }
    if (ok) out.push_back(std::move(a));
  }
  return out;
}

std::vector<int> nodes_of_terminals(const JunctionTree& jt, int root,
                                    const std::vector<int>& terminals) {
  std::set<int> nodes;
  for (int t : terminals) {
    for (int u = jt.parent[static_cast<std::size_t>(t)];; u = jt.parent[static_cast<std::size_t>(u)]) {
      nodes.insert(u);
      if (u == root) break;
    }
  }
  return {nodes.begin(), nodes.end()};
}

}  // namespace

OracleSospResult oracle_sosp(const JunctionTree& jt, int root, std::int64_t budget,
                             const QueryLog& log) {
  if (jt.num_cliques() > 12) {
    throw std::invalid_argument("oracle_sosp: guarded to at most 12 cliques");
  }
  BenefitContext ctx = make_benefit_context(jt, log);
  std::map<int, PathItem> items = path_items(jt, root, ctx);
  OracleSospResult best;
  for (const Antichain& a : enumerate_antichains(jt, root, budget, items)) {
    bool wins = a.j > best.benefit ||
                (a.j == best.benefit && !a.terminals.empty() && !best.terminals.empty() &&
                 a.w < best.cost);
    if (wins) {
      best.benefit = a.j;
      best.cost = a.w;
      best.terminals = a.terminals;
    }
  }
  if (!best.terminals.empty()) best.nodes = nodes_of_terminals(jt, root, best.terminals);
  return best;
}

OracleMospResult oracle_mosp(const JunctionTree& jt, std::int64_t budget, const QueryLog& log) {
  if (jt.num_cliques() > 10) {
    throw std::invalid_argument("oracle_mosp: guarded to at most 10 cliques");
  }
  BenefitContext ctx = make_benefit_context(jt, log);

  // Canonical components: per internal root, the benefit-maximal antichain
  // at every affordable cost level (ties: lower cost, then lexicographically
  // smallest terminal set).
  struct Component {
    int root;
    double j;
    std::int64_t w;
    std::uint32_t node_mask;
  };
  std::vector<Component> components;
  for (int root : internal_roots(jt)) {
    std::map<int, PathItem> items = path_items(jt, root, ctx);
    std::vector<Antichain> all = enumerate_antichains(jt, root, budget, items);
    // Distinct cost levels at this root.
    std::set<std::int64_t> levels;
    for (const Antichain& a : all) levels.insert(a.w);
    std::set<std::vector<int>> seen_terminals;
    for (std::int64_t level : levels) {
      const Antichain* chosen = nullptr;
      for (const Antichain& a : all) {
        if (a.w > level || a.terminals.empty()) continue;
        if (!chosen || a.j > chosen->j || (a.j == chosen->j && a.w < chosen->w) ||
            (a.j == chosen->j && a.w == chosen->w && a.terminals < chosen->terminals)) {
          chosen = &a;
        }
      }
      if (!chosen || chosen->j <= 0.0) continue;
      if (!seen_terminals.insert(chosen->terminals).second) continue;
      std::uint32_t mask = 0;
      for (int v : nodes_of_terminals(jt, root, chosen->terminals)) {
        mask |= (1u << v);
      }
      components.push_back({root, chosen->j, chosen->w, mask});
    }
  }
  std::sort(components.begin(), components.end(), [](const Component& a, const Component& b) {
    if (a.root != b.root) return a.root < b.root;
    if (a.w != b.w) return a.w < b.w;
    return a.j > b.j;
  });

  // Exhaustive family search over node-disjoint components.
  OracleMospResult best;
  std::vector<std::pair<int, std::int64_t>> current;
  std::function<void(std::size_t, std::uint32_t, std::int64_t, double)> recurse =
      [&](std::size_t idx, std::uint32_t used, std::int64_t spent, double value) {
        if (value > best.benefit) {
          best.benefit = value;
          best.components = current;
        }
        for (std::size_t i = idx; i < components.size(); ++i) {
          const Component& c = components[i];
          if ((c.node_mask & used) != 0) continue;
          if (spent + c.w > budget) continue;
          current.push_back({c.root, c.w});
          recurse(i + 1, used | c.node_mask, spent + c.w, value + c.j);
          current.pop_back();
        }
      };
  recurse(0, 0, 0, 0.0);
  return best;
}

}  // namespace jtmat

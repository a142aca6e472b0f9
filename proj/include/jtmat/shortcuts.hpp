#ifndef JTMAT_SHORTCUTS_HPP
#define JTMAT_SHORTCUTS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "jtmat/junction_tree.hpp"

namespace jtmat {

// A shortcut potential: the joint distribution of the variables in the
// separators that cut a connected subtree off the junction tree. Replacing
// the subtree with this table lets queries skip its message passing.
struct ShortcutPotential {
  int id = -1;
  int root = -1;              // node of `nodes` closest to the tree pivot
  std::vector<int> nodes;     // V(S): sorted clique ids, connected subtree
  std::vector<int> cut;       // indices into jt.separators with one endpoint inside
  Scope scope;                // X_S: union of cut separator scopes
  std::int64_t cost = 0;      // table_size(scope)
  std::optional<DiscreteFactor> table;  // filled by materialize_table
  double benefit = 0.0;       // B(S, Q) against the optimizing log
  double ratio = 0.0;         // benefit / cost
  // Cut terminals the optimizer chose (empty for hand-built shortcuts).
  // In-memory bookkeeping only; not serialized.
  std::vector<int> terminals;

  bool contains_clique(int clique_id) const;
};

struct CutInfo {
  std::vector<int> cut;  // separator indices
  Scope scope;
  std::int64_t cost = 0;
};

// Cut separators, scope and cost of the subtree induced by `nodes`.
// The node set must induce a connected subtree.
CutInfo enumerate_cut(const JunctionTree& jt, const std::vector<int>& nodes);

// Builds a ShortcutPotential (without table) for a node set.
ShortcutPotential make_shortcut(const JunctionTree& jt, std::vector<int> nodes, int id = -1);

// Joint distribution over X_S, computed by message passing restricted to
// the shortcut subtree. The tree must be calibrated.
DiscreteFactor materialize_table(const JunctionTree& jt, const ShortcutPotential& s);

// The materialized set produced offline and consumed by the online engine.
struct Catalog {
  enum class Mode { Disjoint, Overlapping };
  Mode mode = Mode::Disjoint;
  std::vector<ShortcutPotential> shortcuts;
  std::int64_t target_budget = 0;
  std::int64_t actual_budget = 0;  // sum of materialized costs

  const ShortcutPotential* find(int id) const;
};

}  // namespace jtmat

#endif  // JTMAT_SHORTCUTS_HPP

#ifndef JTMAT_QUERY_HPP
#define JTMAT_QUERY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jtmat/shortcuts.hpp"

namespace jtmat {

// A joint-probability inference query over a subset of variables.
struct Query {
  Scope variables;
  std::int64_t frequency = 1;
};

// Subtree of the junction tree connecting the query variables' home
// cliques. Nodes may be shortcut stand-ins after reduction; edges keep the
// original separator data. Potential/separator pointers refer into the
// junction tree and catalog that produced the tree.
struct SteinerTree {
  struct Node {
    int clique_id = -1;    // -1 for shortcut stand-ins
    int shortcut_id = -1;  // catalog id for stand-ins
    Scope scope;
    const DiscreteFactor* potential = nullptr;
  };
  struct Edge {
    int a = -1, b = -1;    // node indices
    int separator_index = -1;
    Scope sep_scope;
    const DiscreteFactor* sep_potential = nullptr;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int pivot = -1;  // node index of r_q
  std::vector<std::pair<int, int>> terminals;  // (variable id, node index)

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;  // node -> (nb, edge idx)
  // Number of nodes on the longest path.
  int diameter_nodes() const;
  bool covers(const Scope& variables) const;
};

struct QueryResult {
  DiscreteFactor answer;            // normalized, scope = query scope
  std::int64_t cost = 0;            // operation count
  std::vector<int> shortcuts_used;  // catalog ids, ascending
};

// Minimal subtree connecting the home cliques of the query variables
// (smallest containing scope, ties by lowest clique id). The Steiner pivot
// is the node closest to the junction-tree pivot.
SteinerTree steiner_tree(const JunctionTree& jt, const Query& q);

// Leaves-to-pivot message passing with early summing-out: each message
// keeps only separator-and-query variables. Messages divide out separator
// potentials so the final product is the plain joint. Also accumulates the
// operation-count cost.
QueryResult message_passing(const SteinerTree& st, const Query& q, const CardMap& cards);

// Operation count of the message-passing schedule without touching any
// table: a node with k incoming messages over combined scope U costs
// (k+1) * table_size(U).
std::int64_t query_cost(const SteinerTree& st, const Query& q, const CardMap& cards);

// Collapses each selected shortcut's intersection with the tree into a
// single stand-in node. Selected shortcuts must be pairwise node-disjoint,
// materialized, and each useful for q.
SteinerTree reduce_with_shortcuts(const JunctionTree& jt, const SteinerTree& st, const Query& q,
                                  const std::vector<const ShortcutPotential*>& selected);

// Shortcuts useful for q forming an independent set of the overlap
// conflict graph, chosen greedily by weight/(degree+1) with weight =
// benefit/cost ratio (GWMIN), ties by lower shortcut id. A disjoint
// catalog yields every useful shortcut.
std::vector<const ShortcutPotential*> select_shortcuts_online(const JunctionTree& jt,
                                                              const SteinerTree& st, const Query& q,
                                                              const Catalog& catalog);

// Full online pipeline: steiner_tree, shortcut selection, reduction,
// message passing. Guarantees cost no worse than the shortcut-free
// schedule by dropping shortcuts that do not compose profitably.
QueryResult answer_query(const JunctionTree& jt, const Query& q, const Catalog& catalog);

}  // namespace jtmat

#endif  // JTMAT_QUERY_HPP

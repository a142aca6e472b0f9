#ifndef JTMAT_JUNCTION_TREE_HPP
#define JTMAT_JUNCTION_TREE_HPP

#include <cstdint>
#include <vector>

#include "jtmat/factor.hpp"
#include "jtmat/network.hpp"

namespace jtmat {

// Undirected graph over variable ids, adjacency-set based.
struct UndirectedGraph {
  explicit UndirectedGraph(int n = 0) : adjacency(static_cast<std::size_t>(n)) {}
  std::vector<std::vector<char>> matrix;  // unused until finalized
  std::vector<std::vector<int>> adjacency;

  int size() const { return static_cast<int>(adjacency.size()); }
  bool has_edge(int a, int b) const;
  void add_edge(int a, int b);
  int num_edges() const;
};

struct TriangulationResult {
  UndirectedGraph chordal;
  std::vector<int> elimination_order;
  int fill_edges = 0;
};

struct CliqueNode {
  int id = -1;
  Scope scope;
  DiscreteFactor potential;
  std::int64_t size = 0;  // table_size(scope)
};

struct Separator {
  int u = -1, v = -1;  // clique ids, u < v
  Scope scope;         // intersection of endpoint scopes
  DiscreteFactor potential;
};

// Calibrated clique tree. After calibrate(), every clique potential equals
// the joint marginal of its scope and both clique-side marginals onto each
// separator agree with the separator potential. The pivot roots the tree;
// dfs_labels give the depth-first left-to-right numbering (pivot = 0,
// children visited in ascending clique-id order).
struct JunctionTree {
  std::vector<Variable> variables;
  std::vector<CliqueNode> cliques;
  std::vector<Separator> separators;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // clique -> (neighbor, separator idx)
  int pivot = -1;
  std::vector<int> dfs_labels;  // clique id -> label
  bool calibrated = false;

  // Rooted-at-pivot structure, rebuilt by set_pivot().
  std::vector<int> parent;          // clique id -> parent clique id (-1 at pivot)
  std::vector<int> parent_sep;      // clique id -> separator idx toward parent (-1 at pivot)
  std::vector<std::vector<int>> children;  // ascending clique-id order
  std::vector<int> depth;
  std::vector<int> dfs_order;       // clique ids in dfs-label order

  int num_cliques() const { return static_cast<int>(cliques.size()); }
  CardMap cardinalities() const;

  int separator_between(int u, int v) const;  // separator idx or -1

  // Smallest-scope clique containing the variable, ties by lowest clique id.
  int home_clique(int var_id) const;
  std::vector<int> cliques_containing(int var_id) const;

  // Path between two cliques (inclusive).
  std::vector<int> path(int from, int to) const;

  // Re-roots the tree, recomputing dfs labels, parents, children and depths.
  void set_pivot(int clique_id);

  // Union of the scopes of all cliques in the subtree rooted at v (current
  // pivot rooting).
  Scope subtree_scope(int v) const;

  // Max clique size - 1.
  int treewidth() const;
  // Number of clique nodes on the longest path.
  int diameter_nodes() const;
  // Total separator table size.
  std::int64_t total_separator_size() const;
};

// Undirected skeleton: one edge per directed edge plus married co-parents.
UndirectedGraph moralize(const BayesianNetwork& bn);

// Min-fill triangulation with deterministic tie-breaking (fewest fill
// edges, then smallest resulting clique, then lowest variable id).
TriangulationResult triangulate(const UndirectedGraph& g);

// True iff the graph admits a perfect elimination order (checked via
// maximum-cardinality search).
bool is_chordal(const UndirectedGraph& g);

// Maximal cliques of the chordal graph assembled into a maximum-weight
// spanning tree (weight = separator cardinality, ties by lexicographic
// endpoint ids). Asserts the running-intersection property. Potentials are
// all-ones placeholders until initialize_potentials.
JunctionTree build_clique_tree(const UndirectedGraph& chordal, const std::vector<Variable>& variables);

// Deterministic pivot: the clique minimizing tree eccentricity, ties by
// lowest id.
int choose_pivot(const JunctionTree& jt);

// Each CPT is assigned to the smallest containing clique (ties by lowest
// clique id); clique potentials become products of their assigned CPTs,
// separators all-ones.
void initialize_potentials(const BayesianNetwork& bn, JunctionTree& jt);

// Two-pass Hugin calibration (collect toward pivot, distribute back).
void calibrate(JunctionTree& jt);

// Checks running intersection for every variable.
bool running_intersection_holds(const JunctionTree& jt);

// Normalized marginal of one variable from its home clique.
DiscreteFactor marginal(const JunctionTree& jt, int var_id);

// Full pipeline: moralize, triangulate, build, choose pivot, initialize,
// calibrate.
JunctionTree build_junction_tree(const BayesianNetwork& bn);

}  // namespace jtmat

#endif  // JTMAT_JUNCTION_TREE_HPP

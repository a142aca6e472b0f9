#ifndef JTMAT_MATERIALIZE_HPP
#define JTMAT_MATERIALIZE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "jtmat/query.hpp"
#include "jtmat/workload.hpp"

namespace jtmat {

// ---------------------------------------------------------------------------
// Usefulness and benefit
// ---------------------------------------------------------------------------

// Whether a query's Steiner tree can exploit the shortcut: one of the two
// structural separator conditions holds, the reduced tree still covers all
// query variables, and the reduced message-passing cost is strictly lower.
bool usefulness(const ShortcutPotential& s, const Query& q, const JunctionTree& jt);

// Same check against a prebuilt Steiner tree with known baseline cost.
bool usefulness_for_tree(const JunctionTree& jt, const SteinerTree& st, std::int64_t base_cost,
                         const Query& q, const ShortcutPotential& s);

// Precomputed per-tree and per-log state shared across benefit
// evaluations: subtree scope unions, per-query Steiner trees and baseline
// costs.
struct BenefitContext {
  const JunctionTree* jt = nullptr;
  CardMap cards;
  std::vector<Scope> subtree_scopes;  // X_{T_v} per clique, pivot rooting
  std::vector<Query> queries;
  std::vector<double> probabilities;
  std::vector<SteinerTree> steiner;
  std::vector<std::int64_t> base_cost;
};

BenefitContext make_benefit_context(const JunctionTree& jt, const QueryLog& log);

// Operation volume the shortcut avoids for one query: when useful, the sum
// over covered cliques of clique size times the cardinalities of query
// variables appearing in the subtree hanging below the clique.
double benefit_single(const ShortcutPotential& s, const Query& q, const JunctionTree& jt);
double benefit_single(const BenefitContext& ctx, const ShortcutPotential& s, std::size_t query_index);

// Probability-weighted benefit over a log.
double benefit_log(const ShortcutPotential& s, const QueryLog& log, const JunctionTree& jt);
double benefit_log(const BenefitContext& ctx, const ShortcutPotential& s);

// ---------------------------------------------------------------------------
// Cost grids
// ---------------------------------------------------------------------------

using CostGrid = std::vector<std::int64_t>;

// {0} + {floor(epsilon^i)} + {K}, ascending and deduplicated. epsilon = 1
// yields the full integer grid 0..K.
CostGrid epsilon_grid(std::int64_t budget, double epsilon);

// Largest index with grid[i] <= value.
int grid_floor_index(const CostGrid& grid, std::int64_t value);

// ---------------------------------------------------------------------------
// Single optimal shortcut potential (left-to-right DP)
// ---------------------------------------------------------------------------

// Benefit b_v and cost w_v of the path shortcut whose nodes are
// path(parent(v), r_S), for every v strictly below r_S.
struct PathShortcutStats {
  int root = -1;
  std::vector<double> benefit;      // by clique id
  std::vector<std::int64_t> cost;   // by clique id
  std::vector<char> in_subtree;     // v below r_S
};

PathShortcutStats path_stats(const JunctionTree& jt, int root, const QueryLog& log,
                             const BenefitContext* ctx = nullptr);

struct DPStateSingle {
  enum class Choice : char { Empty, Terminal, Combine };

  int root = -1;
  CostGrid grid;
  std::vector<int> nodes;        // subtree clique ids, dfs left-to-right; nodes[0] == root
  std::vector<int> local_index;  // clique id -> position in nodes, or -1
  PathShortcutStats stats;

  // P[local][g]: best benefit in that branch within budget grid[g].
  std::vector<std::vector<double>> P;
  // I[local][g]: node marked as cut terminal or on a cut path of the
  // budget-g optimum (filled during reconstruction).
  std::vector<std::vector<char>> I;

  // Reconstruction state.
  std::vector<std::vector<Choice>> choice;            // [local][g]
  std::vector<std::vector<std::int64_t>> best_w;      // [local][g] total cost of the optimum
  std::vector<std::vector<std::vector<int>>> split;   // [local][child pos][g] grid idx given to the child

  double value_at(int grid_index) const { return P[0][static_cast<std::size_t>(grid_index)]; }
};

// Alg.-style left-to-right DP for the single-shortcut problem rooted at
// `root`: forward moves set path-shortcut values in dfs order, backward
// moves fold finished branches into their parents with a grid-indexed
// knapsack over already-visited children.
DPStateSingle lrdp(const JunctionTree& jt, int root, std::int64_t budget, const QueryLog& log,
                   const CostGrid& grid, const BenefitContext* ctx = nullptr);

// Per-grid-cost reconstructed solutions. Entries without any affordable
// positive-benefit shortcut are empty. Shortcut benefits carry the DP
// objective value; costs are true table sizes from enumerate_cut.
struct SingleSolutions {
  DPStateSingle dp;
  std::vector<std::optional<ShortcutPotential>> shortcut;  // per grid index
};

SingleSolutions reconstruct_single(const JunctionTree& jt, DPStateSingle state);

// ---------------------------------------------------------------------------
// Multiple optimal shortcut potentials (bottom-up DP)
// ---------------------------------------------------------------------------

struct DPStateMulti {
  CostGrid grid;
  std::vector<std::vector<double>> H, H1, H2;  // [clique id][g]
  std::vector<std::vector<char>> I;            // case (ii) wins strictly
  // W1[child][g]: grid index allocated to `child` inside parent's case-(i)
  // optimum at budget g.
  std::vector<std::vector<int>> W1;
  // W2[{v, v, g}]: grid index c' of the shortcut rooted at v in the case-(ii)
  // optimum at (v, g); W2[{v, d, g}]: allocation to descendant d below it.
  std::map<std::array<int, 3>, int> W2;
};

// Packs node-disjoint per-root solutions: case (i) combines children
// packings, case (ii) roots a shortcut at v and recurses below its cut.
DPStateMulti budp(const JunctionTree& jt, std::int64_t budget,
                  const std::map<int, SingleSolutions>& roots, const CostGrid& grid);

// Walks I/W1/W2 from the pivot. Shortcut tables are not yet materialized;
// total claimed benefit equals H[pivot][last] exactly.
Catalog reconstruct_multi(const JunctionTree& jt, const DPStateMulti& state,
                          const std::map<int, SingleSolutions>& roots, std::int64_t budget);

// ---------------------------------------------------------------------------
// Greedy overlapping packing
// ---------------------------------------------------------------------------

// Deduplicates candidates by cut set, then fills the budget by descending
// benefit/cost ratio (ties: lower cost, then lower id). Candidates with
// zero benefit are never taken.
Catalog greedy_pack(std::vector<ShortcutPotential> candidates, std::int64_t budget);

// ---------------------------------------------------------------------------
// Offline pipelines
// ---------------------------------------------------------------------------

enum class MaterializeMode { None, Peanut, PeanutPlus };

struct MaterializeOptions {
  std::int64_t budget = 0;
  double epsilon = 1.0;
  MaterializeMode mode = MaterializeMode::Peanut;
};

struct MaterializeReport {
  std::int64_t target_budget = 0;
  std::int64_t actual_budget = 0;
  double total_benefit = 0.0;
  double offline_seconds = 0.0;
  int shortcuts = 0;
  int dropped_for_budget = 0;  // removed by the true-size audit
};

// Runs LRDP at every internal root, then BUDP (peanut) or ratio-greedy
// packing (peanut+), materializes the selected tables, and audits the true
// table sizes against the budget.
Catalog build_catalog(const JunctionTree& jt, const QueryLog& log, const MaterializeOptions& options,
                      MaterializeReport* report = nullptr);

// All distinct per-root reconstructed shortcuts, with deterministic ids.
std::vector<ShortcutPotential> collect_candidates(const JunctionTree& jt,
                                                  const std::map<int, SingleSolutions>& roots);

// Internal roots (nodes with children under the pivot rooting).
std::vector<int> internal_roots(const JunctionTree& jt);

// Per-root LRDP + reconstruction for every internal root.
std::map<int, SingleSolutions> solve_all_roots(const JunctionTree& jt, const QueryLog& log,
                                               std::int64_t budget, const CostGrid& grid,
                                               const BenefitContext* ctx = nullptr);

}  // namespace jtmat

#endif  // JTMAT_MATERIALIZE_HPP

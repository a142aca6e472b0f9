#ifndef JTMAT_ORACLE_HPP
#define JTMAT_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "jtmat/materialize.hpp"
#include "jtmat/network.hpp"

namespace jtmat {

// Explicit product of all CPTs: the full joint table. Guarded to state
// spaces of at most 2^20 entries.
DiscreteFactor oracle_joint(const BayesianNetwork& bn);

struct OracleSospResult {
  double benefit = 0.0;
  std::int64_t cost = 0;             // additive path cost of the winner
  std::vector<int> terminals;        // cut terminals (clique ids)
  std::vector<int> nodes;            // subtree V(S); empty when nothing affordable
};

// Exhaustive enumeration over all cut-terminal antichains of the subtree
// rooted at `root`, maximizing the summed path benefits under the additive
// budget. Brute force; guarded to small trees.
OracleSospResult oracle_sosp(const JunctionTree& jt, int root, std::int64_t budget,
                             const QueryLog& log);

struct OracleMospResult {
  double benefit = 0.0;
  std::vector<std::pair<int, std::int64_t>> components;  // (root, charged cost)
};

// Exhaustive packing enumeration over node-disjoint families of per-root
// optimal shortcuts (every root, every affordable budget level), maximizing
// total benefit under the shared budget. Brute force; guarded.
OracleMospResult oracle_mosp(const JunctionTree& jt, std::int64_t budget, const QueryLog& log);

}  // namespace jtmat

#endif  // JTMAT_ORACLE_HPP

#ifndef JTMAT_NETWORK_HPP
#define JTMAT_NETWORK_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "jtmat/factor.hpp"

namespace jtmat {

// A discrete Bayesian network. Variable ids are 0..n-1 in declaration
// order; each variable carries exactly one CPT over {variable} + parents
// in the canonical assignment layout.
struct BayesianNetwork {
  std::vector<Variable> variables;
  std::vector<std::vector<int>> parents;  // ordered parent ids, per variable
  std::vector<DiscreteFactor> cpts;       // scope = sorted({v} + parents[v])

  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_edges() const;
  int max_in_degree() const;

  CardMap cardinalities() const;

  // Id lookup by name; -1 if absent.
  int find_variable(const std::string& name) const;

  // Sum over variables of (card-1) * prod(parent cards).
  std::int64_t independent_parameters() const;
};

struct Violation {
  std::string kind;     // "acyclicity", "row-normalization", ...
  std::string detail;   // human-readable description naming the offender
};

// Checks every BayesianNetwork invariant; returns one record per breach.
// Violations are data, not errors.
std::vector<Violation> validate(const BayesianNetwork& bn);

// Topological order of the variable DAG; throws std::invalid_argument on a
// cycle.
std::vector<int> topological_order(const BayesianNetwork& bn);

}  // namespace jtmat

#endif  // JTMAT_NETWORK_HPP

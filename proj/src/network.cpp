#include "jtmat/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace jtmat {

int BayesianNetwork::num_edges() const {
  int n = 0;
  for (const auto& p : parents) n += static_cast<int>(p.size());
  return n;
}

int BayesianNetwork::max_in_degree() const {
  int m = 0;
  for (const auto& p : parents) m = std::max(m, static_cast<int>(p.size()));
  return m;
}

CardMap BayesianNetwork::cardinalities() const {
  CardMap cards(variables.size(), 0);
  for (const Variable& v : variables) cards[static_cast<std::size_t>(v.id)] = v.cardinality;
  return cards;
}

int BayesianNetwork::find_variable(const std::string& name) const {
  for (const Variable& v : variables) {
    if (v.name == name) return v.id;
  }
  return -1;
}

std::int64_t BayesianNetwork::independent_parameters() const {
  std::int64_t total = 0;
  for (const Variable& v : variables) {
    std::int64_t rows = 1;
    for (int p : parents[static_cast<std::size_t>(v.id)]) {
      rows *= variables[static_cast<std::size_t>(p)].cardinality;
    }
    total += rows * (v.cardinality - 1);
  }
  return total;
}

std::vector<int> topological_order(const BayesianNetwork& bn) {
  const int n = bn.num_variables();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (int p : bn.parents[static_cast<std::size_t>(v)]) {
      children[static_cast<std::size_t>(p)].push_back(v);
      ++indeg[static_cast<std::size_t>(v)];
    }
  }
  std::deque<int> ready;
  for (int v = 0; v < n; ++v) {
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("topological_order: parent graph has a cycle");
  }
  return order;
}

namespace {

// Row sums of a CPT grouped by parent assignment: marginalizing the child
// out must give an all-ones table.
void check_cpt_rows(const BayesianNetwork& bn, int v, std::vector<Violation>& out) {
  const DiscreteFactor& cpt = bn.cpts[static_cast<std::size_t>(v)];
  Scope parent_scope = cpt.scope();
  parent_scope.erase(std::remove(parent_scope.begin(), parent_scope.end(), v),
                     parent_scope.end());
  DiscreteFactor sums = marginalize(cpt, parent_scope);
  for (std::int64_t i = 0; i < sums.size(); ++i) {
    if (std::abs(sums.at(i) - 1.0) > 1e-9) {
      std::string row = "(";
      std::vector<int> a = sums.assignment_of(i);
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (j) row += ",";
        row += bn.variables[static_cast<std::size_t>(parent_scope[j])].name + "=" +
               std::to_string(a[j]);
      }
      row += ")";
      out.push_back({"row-normalization",
                     "CPT of " + bn.variables[static_cast<std::size_t>(v)].name + " row " + row +
                         " sums to " + std::to_string(sums.at(i))});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const BayesianNetwork& bn) {
  std::vector<Violation> out;
  const int n = bn.num_variables();

  for (int v = 0; v < n; ++v) {
    const Variable& var = bn.variables[static_cast<std::size_t>(v)];
    if (var.id != v) {
      out.push_back({"variable-ids", "variable at position " + std::to_string(v) +
                                         " has id " + std::to_string(var.id)});
    }
    if (var.cardinality < 1) {
      out.push_back({"cardinality", "variable " + var.name + " has cardinality " +
                                        std::to_string(var.cardinality)});
    }
  }
  if (bn.parents.size() != bn.variables.size() || bn.cpts.size() != bn.variables.size()) {
    out.push_back({"structure", "parent/CPT lists do not cover every variable"});
    return out;
  }

  try {
    topological_order(bn);
  } catch (const std::invalid_argument&) {
    out.push_back({"acyclicity", "parent graph contains a directed cycle"});
  }

  for (int v = 0; v < n; ++v) {
    Scope expect = make_scope([&] {
      std::vector<int> ids = bn.parents[static_cast<std::size_t>(v)];
      ids.push_back(v);
      return ids;
    }());
    const DiscreteFactor& cpt = bn.cpts[static_cast<std::size_t>(v)];
    if (cpt.scope() != expect) {
      out.push_back({"cpt-scope", "CPT of " + bn.variables[static_cast<std::size_t>(v)].name +
                                      " does not cover {variable} + parents"});
      continue;
    }
    check_cpt_rows(bn, v, out);
  }
  return out;
}

}  // namespace jtmat

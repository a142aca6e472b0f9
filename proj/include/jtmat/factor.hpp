#ifndef JTMAT_FACTOR_HPP
#define JTMAT_FACTOR_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace jtmat {

// A discrete random variable. Cardinality must be >= 1; ids are unique
// within a network and index into cardinality maps.
struct Variable {
  int id = -1;
  std::string name;
  int cardinality = 0;
};

// A set of variable ids in canonical (ascending) order without duplicates.
// Equal scopes compare equal with operator==.
using Scope = std::vector<int>;

// Cardinality lookup indexed by variable id; 0 marks an unknown id.
using CardMap = std::vector<int>;

Scope make_scope(std::vector<int> ids);
bool is_canonical_scope(const Scope& s);
Scope scope_union(const Scope& a, const Scope& b);
Scope scope_intersect(const Scope& a, const Scope& b);
Scope scope_difference(const Scope& a, const Scope& b);
bool scope_contains(const Scope& outer, const Scope& inner);
bool scope_contains(const Scope& s, int id);

// Number of entries of a table over `scope`, i.e. the product of the
// cardinalities of its variables. Empty scope yields 1.
std::int64_t table_size(const Scope& scope, const CardMap& cards);

// A dense table mapping assignments of a variable scope to non-negative
// reals. Values are laid out row-major over the canonical ascending-id
// scope order: the last scope variable varies fastest, the first slowest.
// Immutable after construction; all operations below are pure.
class DiscreteFactor {
 public:
  DiscreteFactor() = default;
  DiscreteFactor(Scope scope, std::vector<int> cards, std::vector<double> values);

  // All-ones table over the scope (multiplicative identity).
  static DiscreteFactor ones(Scope scope, std::vector<int> cards);
  // Scope-less table holding a single value.
  static DiscreteFactor scalar(double value);

  const Scope& scope() const { return scope_; }
  // Cardinalities parallel to scope().
  const std::vector<int>& cards() const { return cards_; }
  const std::vector<double>& values() const { return values_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  bool empty_scope() const { return scope_.empty(); }

  int card_of(int var_id) const;

  double sum() const;
  double max_abs_diff(const DiscreteFactor& other) const;

  // Linear index of a full assignment given as value per scope position.
  std::int64_t index_of(const std::vector<int>& assignment) const;
  // Inverse of index_of.
  std::vector<int> assignment_of(std::int64_t index) const;

  double at(std::int64_t index) const { return values_[index]; }

 private:
  Scope scope_;
  std::vector<int> cards_;
  std::vector<double> values_;
};

// Entrywise product on the union scope. Shared variables must agree on
// cardinality.
DiscreteFactor product(const DiscreteFactor& f, const DiscreteFactor& g);

// Sums out every variable not in `keep`. Requires keep to be a subset of
// f's scope.
DiscreteFactor marginalize(const DiscreteFactor& f, const Scope& keep);

// Entrywise division with g broadcast over f's scope. Convention 0/0 = 0;
// x/0 with x > 0 raises std::domain_error. Requires g.scope within f.scope.
DiscreteFactor divide(const DiscreteFactor& f, const DiscreteFactor& g);

// Scales entries to sum to 1. All-zero tables raise std::domain_error.
DiscreteFactor normalize(const DiscreteFactor& f);

}  // namespace jtmat

#endif  // JTMAT_FACTOR_HPP

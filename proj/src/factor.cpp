#include "jtmat/factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

Scope make_scope(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool is_canonical_scope(const Scope& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] >= s[i]) return false;
  }
  return true;
}

Scope scope_union(const Scope& a, const Scope& b) {
  Scope out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Scope scope_intersect(const Scope& a, const Scope& b) {
  Scope out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Scope scope_difference(const Scope& a, const Scope& b) {
  Scope out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool scope_contains(const Scope& outer, const Scope& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

bool scope_contains(const Scope& s, int id) {
  return std::binary_search(s.begin(), s.end(), id);
}

std::int64_t table_size(const Scope& scope, const CardMap& cards) {
  std::int64_t n = 1;
  for (int id : scope) {
    if (id < 0 || id >= static_cast<int>(cards.size()) || cards[id] <= 0) {
      throw std::invalid_argument("table_size: unknown variable id " + std::to_string(id));
    }
    n *= cards[id];
  }
  return n;
}

DiscreteFactor::DiscreteFactor(Scope scope, std::vector<int> cards,
                               std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
  if (!is_canonical_scope(scope_)) {
    throw std::invalid_argument("DiscreteFactor: scope not in canonical order");
  }
  if (cards_.size() != scope_.size()) {
    throw std::invalid_argument("DiscreteFactor: cardinality list does not match scope");
  }
  std::int64_t expect = 1;
  for (int c : cards_) {
    if (c < 1) throw std::invalid_argument("DiscreteFactor: cardinality must be >= 1");
    expect *= c;
  }
  if (expect != static_cast<std::int64_t>(values_.size())) {
    throw std::invalid_argument("DiscreteFactor: value count does not match scope size");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("DiscreteFactor: entries must be finite and non-negative");
    }
  }
}

DiscreteFactor DiscreteFactor::ones(Scope scope, std::vector<int> cards) {
  std::int64_t n = 1;
  for (int c : cards) n *= c;
  return DiscreteFactor(std::move(scope), std::move(cards),
                        std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

DiscreteFactor DiscreteFactor::scalar(double value) {
  return DiscreteFactor({}, {}, {value});
}

int DiscreteFactor::card_of(int var_id) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), var_id);
  if (it == scope_.end() || *it != var_id) {
    throw std::invalid_argument("DiscreteFactor: variable not in scope");
  }
  return cards_[static_cast<std::size_t>(it - scope_.begin())];
}

double DiscreteFactor::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double DiscreteFactor::max_abs_diff(const DiscreteFactor& other) const {
  if (scope_ != other.scope_ || values_.size() != other.values_.size()) {
    throw std::invalid_argument("max_abs_diff: factor shapes differ");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m = std::max(m, std::abs(values_[i] - other.values_[i]));
  }
  return m;
}

std::int64_t DiscreteFactor::index_of(const std::vector<int>& assignment) const {
  if (assignment.size() != scope_.size()) {
    throw std::invalid_argument("index_of: assignment arity mismatch");
  }
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= cards_[i]) {
      throw std::invalid_argument("index_of: assignment out of range");
    }
    idx = idx * cards_[i] + assignment[i];
  }
  return idx;
}

std::vector<int> DiscreteFactor::assignment_of(std::int64_t index) const {
  std::vector<int> a(scope_.size(), 0);
  for (std::size_t i = scope_.size(); i-- > 0;) {
    a[i] = static_cast<int>(index % cards_[i]);
    index /= cards_[i];
  }
  return a;
}

namespace {

// Stride of each result-scope variable inside an operand laid out row-major,
// or 0 when the operand does not carry that variable.
std::vector<std::int64_t> operand_strides(const Scope& result, const std::vector<int>& result_cards,
                                          const DiscreteFactor& f) {
  std::vector<std::int64_t> strides(result.size(), 0);
  const Scope& fs = f.scope();
  // Strides within f itself.
  std::vector<std::int64_t> own(fs.size(), 1);
  for (std::size_t i = fs.size(); i-- > 1;) {
    own[i - 1] = own[i] * f.cards()[i];
  }
  std::size_t j = 0;
  for (std::size_t i = 0; i < result.size(); ++i) {
    while (j < fs.size() && fs[j] < result[i]) ++j;
    if (j < fs.size() && fs[j] == result[i]) {
      if (f.cards()[j] != result_cards[i]) {
        throw std::invalid_argument("factor op: cardinality mismatch for shared variable " +
                                    std::to_string(result[i]));
      }
      strides[i] = own[j];
    }
  }
  return strides;
}

// Odometer walk over the result scope, tracking an offset into each operand.
template <typename Fn>
void for_each_joint(const Scope& scope, const std::vector<int>& cards,
                    const std::vector<std::int64_t>& stride_f,
                    const std::vector<std::int64_t>& stride_g, Fn&& fn) {
  const std::size_t k = scope.size();
  std::int64_t n = 1;
  for (int c : cards) n *= c;
  std::vector<int> digits(k, 0);
  std::int64_t off_f = 0, off_g = 0;
  for (std::int64_t idx = 0; idx < n; ++idx) {
    fn(idx, off_f, off_g);
    for (std::size_t i = k; i-- > 0;) {
      ++digits[i];
      off_f += stride_f[i];
      off_g += stride_g[i];
      if (digits[i] < cards[i]) break;
      off_f -= static_cast<std::int64_t>(digits[i]) * stride_f[i];
      off_g -= static_cast<std::int64_t>(digits[i]) * stride_g[i];
      digits[i] = 0;
    }
  }
}

std::vector<int> cards_for(const Scope& scope, const DiscreteFactor& f, const DiscreteFactor& g) {
  std::vector<int> cards(scope.size(), 0);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    const Scope& fs = f.scope();
    auto it = std::lower_bound(fs.begin(), fs.end(), scope[i]);
    if (it != fs.end() && *it == scope[i]) {
      cards[i] = f.cards()[static_cast<std::size_t>(it - fs.begin())];
    } else {
      cards[i] = g.card_of(scope[i]);
    }
  }
  return cards;
}

}  // namespace

DiscreteFactor product(const DiscreteFactor& f, const DiscreteFactor& g) {
  Scope scope = scope_union(f.scope(), g.scope());
  std::vector<int> cards = cards_for(scope, f, g);
  std::vector<std::int64_t> sf = operand_strides(scope, cards, f);
  std::vector<std::int64_t> sg = operand_strides(scope, cards, g);
  std::int64_t n = 1;
  for (int c : cards) n *= c;
  std::vector<double> out(static_cast<std::size_t>(n));
  const std::vector<double>& fv = f.values();
  const std::vector<double>& gv = g.values();
  for_each_joint(scope, cards, sf, sg, [&](std::int64_t idx, std::int64_t a, std::int64_t b) {
    out[static_cast<std::size_t>(idx)] = fv[static_cast<std::size_t>(a)] * gv[static_cast<std::size_t>(b)];
  });
  return DiscreteFactor(std::move(scope), std::move(cards), std::move(out));
}

DiscreteFactor marginalize(const DiscreteFactor& f, const Scope& keep) {
  if (!scope_contains(f.scope(), keep)) {
    throw std::invalid_argument("marginalize: keep scope is not a subset of the factor scope");
  }
  std::vector<int> keep_cards(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep_cards[i] = f.card_of(keep[i]);
  std::int64_t n = 1;
  for (int c : keep_cards) n *= c;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);

  // Walk the full table, accumulating into the kept-scope slot.
  DiscreteFactor target = DiscreteFactor::ones(keep, keep_cards);
  std::vector<std::int64_t> st = operand_strides(f.scope(), f.cards(), target);
  const std::vector<double>& fv = f.values();
  std::vector<std::int64_t> zero(f.scope().size(), 0);
  for_each_joint(f.scope(), f.cards(), st, zero, [&](std::int64_t idx, std::int64_t t, std::int64_t) {
    out[static_cast<std::size_t>(t)] += fv[static_cast<std::size_t>(idx)];
  });
  return DiscreteFactor(keep, std::move(keep_cards), std::move(out));
}

DiscreteFactor divide(const DiscreteFactor& f, const DiscreteFactor& g) {
  if (!scope_contains(f.scope(), g.scope())) {
    throw std::invalid_argument("divide: divisor scope is not a subset of the dividend scope");
  }
  std::vector<std::int64_t> sg = operand_strides(f.scope(), f.cards(), g);
  std::vector<double> out(f.values().size());
  const std::vector<double>& fv = f.values();
  const std::vector<double>& gv = g.values();
  std::vector<std::int64_t> zero(f.scope().size(), 0);
  for_each_joint(f.scope(), f.cards(), sg, zero, [&](std::int64_t idx, std::int64_t b, std::int64_t) {
    double num = fv[static_cast<std::size_t>(idx)];
    double den = gv[static_cast<std::size_t>(b)];
    if (den == 0.0) {
      if (num != 0.0) {
        throw std::domain_error("divide: positive entry divided by zero");
      }
      out[static_cast<std::size_t>(idx)] = 0.0;
    } else {
      out[static_cast<std::size_t>(idx)] = num / den;
    }
  });
  return DiscreteFactor(f.scope(), f.cards(), std::move(out));
}

DiscreteFactor normalize(const DiscreteFactor& f) {
  double s = f.sum();
  if (!(s > 0.0)) {
    throw std::domain_error("normalize: table sums to zero");
  }
  std::vector<double> out(f.values());
  for (double& v : out) v /= s;
  return DiscreteFactor(f.scope(), f.cards(), std::move(out));
}

}  // namespace jtmat

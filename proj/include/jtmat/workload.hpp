#ifndef JTMAT_WORKLOAD_HPP
#define JTMAT_WORKLOAD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jtmat/query.hpp"

namespace jtmat {

// A query workload with empirical probabilities. Duplicate queries are
// merged; probabilities are frequencies normalized to sum to 1.
struct QueryLog {
  std::vector<Query> entries;         // unique queries with merged frequencies
  std::vector<double> probabilities;  // parallel to entries
  std::int64_t total_frequency = 0;

  std::size_t size() const { return entries.size(); }
};

QueryLog estimate_probabilities(const std::vector<Query>& raw);

// N random queries with sizes uniform in size_range and variables drawn
// without replacement, weighted by 1 + tree distance from the variable's
// home clique to the pivot. Deterministic under seed.
std::vector<Query> generate_skewed(const JunctionTree& jt, int n,
                                   std::pair<int, int> size_range, std::uint64_t seed);

// Same with uniform variable weights.
std::vector<Query> generate_uniform(const JunctionTree& jt, int n,
                                    std::pair<int, int> size_range, std::uint64_t seed);

// First `train_count` queries (generation order) become the training log.
std::pair<std::vector<Query>, std::vector<Query>> split_train_test(
    const std::vector<Query>& queries, std::size_t train_count);

// One query per line: comma-separated variable names with an optional
// `@count` frequency suffix.
std::string format_query_file(const std::vector<Query>& queries,
                              const std::vector<Variable>& variables);
std::vector<Query> parse_query_file(const std::string& text,
                                    const std::vector<Variable>& variables);
void write_query_file(const std::string& path, const std::vector<Query>& queries,
                      const std::vector<Variable>& variables);
std::vector<Query> read_query_file(const std::string& path,
                                   const std::vector<Variable>& variables);

}  // namespace jtmat

#endif  // JTMAT_WORKLOAD_HPP

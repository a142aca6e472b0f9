#include "jtmat/workload.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

QueryLog estimate_probabilities(const std::vector<Query>& raw) {
  if (raw.empty()) throw std::invalid_argument("estimate_probabilities: empty log");
  std::map<Scope, std::int64_t> merged;
  std::vector<Scope> order;  // first-seen order
  for (const Query& q : raw) {
    if (q.variables.empty()) throw std::invalid_argument("estimate_probabilities: empty query");
    if (q.frequency < 1) throw std::invalid_argument("estimate_probabilities: frequency must be >= 1");
    auto [it, inserted] = merged.try_emplace(q.variables, 0);
    if (inserted) order.push_back(q.variables);
    it->second += q.frequency;
  }
  QueryLog log;
  for (const Scope& s : order) {
    log.entries.push_back({s, merged[s]});
    log.total_frequency += merged[s];
  }
  for (const Query& q : log.entries) {
    log.probabilities.push_back(static_cast<double>(q.frequency) /
                                static_cast<double>(log.total_frequency));
  }
  return log;
}

namespace {

// Implementation-stable uniform draws on top of the standard engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  int below(int n) { return std::min(static_cast<int>(unit() * n), n - 1); }

 private:
  std::mt19937_64 engine_;
};

std::vector<Query> generate_weighted(const JunctionTree& jt, int n, std::pair<int, int> size_range,
                                     std::uint64_t seed, const std::vector<double>& weights) {
  const int num_vars = static_cast<int>(jt.variables.size());
  if (n < 1) throw std::invalid_argument("workload generator: need at least one query");
  if (size_range.first < 1 || size_range.first > size_range.second ||
      size_range.second > num_vars) {
    throw std::invalid_argument("workload generator: size range exceeds variable count");
  }
  Rng rng(seed);
  std::vector<Query> out;
  out.reserve(static_cast<std::size_t>(n));
  std::vector<double> w(weights);
  for (int i = 0; i < n; ++i) {
    int size = size_range.first + rng.below(size_range.second - size_range.first + 1);
    std::copy(weights.begin(), weights.end(), w.begin());
    std::vector<int> vars;
    for (int s = 0; s < size; ++s) {
      double total = 0.0;
      for (double x : w) total += x;
      double u = rng.unit() * total;
      int pick = num_vars - 1;
      double acc = 0.0;
      for (int v = 0; v < num_vars; ++v) {
        acc += w[static_cast<std::size_t>(v)];
        if (u < acc) {
          pick = v;
          break;
        }
      }
      vars.push_back(pick);
      w[static_cast<std::size_t>(pick)] = 0.0;  // without replacement
    }
    out.push_back({make_scope(std::move(vars)), 1});
  }
  return out;
}

}  // namespace

std::vector<Query> generate_skewed(const JunctionTree& jt, int n, std::pair<int, int> size_range,
                                   std::uint64_t seed) {
  std::vector<double> weights;
  weights.reserve(jt.variables.size());
  for (const Variable& v : jt.variables) {
    int home = jt.home_clique(v.id);
    weights.push_back(1.0 + static_cast<double>(jt.depth[static_cast<std::size_t>(home)]));
  }
  return generate_weighted(jt, n, size_range, seed, weights);
}

std::vector<Query> generate_uniform(const JunctionTree& jt, int n, std::pair<int, int> size_range,
                                    std::uint64_t seed) {
  std::vector<double> weights(jt.variables.size(), 1.0);
  return generate_weighted(jt, n, size_range, seed, weights);
}

std::pair<std::vector<Query>, std::vector<Query>> split_train_test(
    const std::vector<Query>& queries, std::size_t train_count) {
  if (train_count > queries.size()) {
    throw std::invalid_argument("split_train_test: split exceeds log size");
  }
  std::vector<Query> train(queries.begin(), queries.begin() + static_cast<std::ptrdiff_t>(train_count));
  std::vector<Query> test(queries.begin() + static_cast<std::ptrdiff_t>(train_count), queries.end());
  return {std::move(train), std::move(test)};
}

std::string format_query_file(const std::vector<Query>& queries,
                              const std::vector<Variable>& variables) {
  std::ostringstream out;
  for (const Query& q : queries) {
    for (std::size_t i = 0; i < q.variables.size(); ++i) {
      if (i) out << ",";
      out << variables[static_cast<std::size_t>(q.variables[i])].name;
    }
    if (q.frequency != 1) out << "@" << q.frequency;
    out << "\n";
  }
  return out.str();
}

std::vector<Query> parse_query_file(const std::string& text,
                                    const std::vector<Variable>& variables) {
  std::map<std::string, int> by_name;
  for (const Variable& v : variables) by_name[v.name] = v.id;

  std::vector<Query> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    std::int64_t freq = 1;
    if (auto at = line.find('@'); at != std::string::npos) {
      body = line.substr(0, at);
      try {
        freq = std::stoll(line.substr(at + 1));
      } catch (const std::exception&) {
        throw ParseError("bad @count suffix", line_no);
      }
      if (freq < 1) throw ParseError("@count must be >= 1", line_no);
    }
    std::vector<int> vars;
    std::istringstream fields(body);
    std::string name;
    while (std::getline(fields, name, ',')) {
      // trim
      auto b = name.find_first_not_of(" \t\r");
      auto e = name.find_last_not_of(" \t\r");
      if (b == std::string::npos) continue;
      name = name.substr(b, e - b + 1);
      auto it = by_name.find(name);
      if (it == by_name.end()) throw ParseError("unknown variable '" + name + "'", line_no);
      vars.push_back(it->second);
    }
    if (vars.empty()) continue;  // blank line
    out.push_back({make_scope(std::move(vars)), freq});
  }
  return out;
}

void write_query_file(const std::string& path, const std::vector<Query>& queries,
                      const std::vector<Variable>& variables) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << format_query_file(queries, variables);
}

std::vector<Query> read_query_file(const std::string& path,
                                   const std::vector<Variable>& variables) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_query_file(ss.str(), variables);
}

}  // namespace jtmat

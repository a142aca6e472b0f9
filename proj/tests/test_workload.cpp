#include <doctest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "jtmat/errors.hpp"
#include "jtmat/workload.hpp"

using namespace jtmat;
using jtmat::testing::paper_example;

TEST_CASE("probability estimation normalizes and merges") {
  auto ex = paper_example();
  Query q1{make_scope({ex.b}), 1};

  QueryLog one = estimate_probabilities({q1});
  CHECK(one.probabilities == std::vector<double>{1.0});

  Query q2{make_scope({ex.c}), 3};
  QueryLog two = estimate_probabilities({q1, q2});
  CHECK(two.probabilities[0] == doctest::Approx(0.25));
  CHECK(two.probabilities[1] == doctest::Approx(0.75));

  Query dup_a{make_scope({ex.b, ex.c}), 2};
  Query dup_b{make_scope({ex.c, ex.b}), 3};
  QueryLog merged = estimate_probabilities({dup_a, dup_b});
  REQUIRE(merged.entries.size() == 1);
  CHECK(merged.entries[0].frequency == 5);
  CHECK(merged.probabilities[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(estimate_probabilities({}), std::invalid_argument);
  double total = 0.0;
  for (double p : two.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generators are deterministic under a seed") {
  auto ex = paper_example();
  auto a = generate_skewed(ex.jt, 50, {1, 3}, 99);
  auto b = generate_skewed(ex.jt, 50, {1, 3}, 99);
  CHECK(format_query_file(a, ex.jt.variables) == format_query_file(b, ex.jt.variables));
  auto c = generate_skewed(ex.jt, 50, {1, 3}, 100);
  CHECK(format_query_file(a, ex.jt.variables) != format_query_file(c, ex.jt.variables));

  auto u = generate_uniform(ex.jt, 1, {1, 5}, 7);
  auto u2 = generate_uniform(ex.jt, 1, {1, 5}, 7);
  REQUIRE(u.size() == 1);
  CHECK(u[0].variables == u2[0].variables);
}

TEST_CASE("generated queries are non-empty, in range, and reference real variables") {
  auto ex = paper_example();
  for (auto kind : {0, 1}) {
    auto qs = kind == 0 ? generate_skewed(ex.jt, 400, {1, 5}, 5)
                        : generate_uniform(ex.jt, 400, {1, 5}, 5);
    for (const Query& q : qs) {
      CHECK(!q.variables.empty());
      CHECK(q.variables.size() >= 1);
      CHECK(q.variables.size() <= 5);
      for (int v : q.variables) {
        CHECK(v >= 0);
        CHECK(v < static_cast<int>(ex.jt.variables.size()));
      }
    }
  }
  CHECK_THROWS_AS(generate_uniform(ex.jt, 10, {1, 100}, 1), std::invalid_argument);
}

TEST_CASE("uniform single-variable draws are uniform within 3 sigma") {
  auto ex = paper_example();
  const int n = 100000;
  auto qs = generate_uniform(ex.jt, n, {1, 1}, 12345);
  std::map<int, int> counts;
  for (const Query& q : qs) counts[q.variables[0]]++;
  const double p = 1.0 / static_cast<double>(ex.jt.variables.size());
  const double sigma = std::sqrt(n * p * (1 - p));
  for (const Variable& v : ex.jt.variables) {
    double diff = std::abs(counts[v.id] - n * p);
    CHECK(diff <= 3.0 * sigma);
  }
}

TEST_CASE("skewed single-variable draws follow the 1+distance weights within 3 sigma") {
  auto ex = paper_example();
  const int n = 100000;
  auto qs = generate_skewed(ex.jt, n, {1, 1}, 54321);
  std::map<int, int> counts;
  for (const Query& q : qs) counts[q.variables[0]]++;

  std::vector<double> weights;
  double total = 0.0;
  for (const Variable& v : ex.jt.variables) {
    int home = ex.jt.home_clique(v.id);
    weights.push_back(1.0 + ex.jt.depth[static_cast<std::size_t>(home)]);
    total += weights.back();
  }
  for (const Variable& v : ex.jt.variables) {
    double p = weights[static_cast<std::size_t>(v.id)] / total;
    double sigma = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(counts[v.id] - n * p) <= 3.0 * sigma);
  }

  // A one-clique tree degenerates to uniform weights.
  BayesianNetwork two = parse_bif(R"(
network two {
}
variable a { type discrete [ 2 ] { y, n }; }
variable b { type discrete [ 2 ] { y, n }; }
probability ( a ) { table 0.25, 0.75; }
probability ( b | a ) { (y) 0.5, 0.5; (n) 0.125, 0.875; }
)");
  JunctionTree jt2 = build_junction_tree(two);
  auto qs2 = generate_skewed(jt2, 2000, {1, 1}, 5);
  int a_count = 0;
  for (const Query& q : qs2) a_count += q.variables[0] == 0;
  CHECK(std::abs(a_count - 1000) < 3 * std::sqrt(2000 * 0.25));
}

TEST_CASE("query files roundtrip including frequencies") {
  auto ex = paper_example();
  std::vector<Query> qs{{make_scope({ex.b, ex.f}), 3}, {make_scope({ex.g}), 1}};
  std::string text = format_query_file(qs, ex.jt.variables);
  std::vector<Query> back = parse_query_file(text, ex.jt.variables);
  REQUIRE(back.size() == 2);
  CHECK(back[0].variables == qs[0].variables);
  CHECK(back[0].frequency == 3);
  CHECK(back[1].frequency == 1);

  CHECK_THROWS_AS(parse_query_file("unknown_var\n", ex.jt.variables), ParseError);
}

TEST_CASE("the split convention takes the first train_count queries") {
  auto ex = paper_example();
  auto qs = generate_skewed(ex.jt, 3000, {1, 5}, 17);
  auto [train, test] = split_train_test(qs, 2000);
  CHECK(train.size() == 2000);
  CHECK(test.size() == 1000);
  CHECK(train[0].variables == qs[0].variables);
  CHECK(test[0].variables == qs[2000].variables);

  // Byte-identical serialization under the same seed.
  auto qs2 = generate_skewed(ex.jt, 3000, {1, 5}, 17);
  CHECK(format_query_file(qs, ex.jt.variables) == format_query_file(qs2, ex.jt.variables));
}

#ifndef JTMAT_BENCH_HPP
#define JTMAT_BENCH_HPP

#include <string>
#include <vector>

#include "jtmat/materialize.hpp"
#include "jtmat/workload.hpp"

namespace jtmat {

// Resolved settings of one experiment run.
struct ExperimentConfig {
  std::string network_path;
  std::string workload_kind = "skewed";  // skewed | uniform
  int workload_size = 3000;
  std::uint64_t seed = 0;
  std::size_t train_count = 2000;
  std::int64_t budget = 0;       // absolute entries
  double budget_bt = 0.0;        // 0 = use absolute budget; else multiple of b_T
  double epsilon = 1.0;
  MaterializeMode mode = MaterializeMode::Peanut;
  std::string output_path;
};

struct SavingsRow {
  std::string query;
  std::int64_t baseline_cost = 0;
  std::int64_t materialized_cost = 0;
  double savings_pct = 0.0;
  std::vector<int> shortcuts_used;
  int steiner_diameter = 0;
};

struct SavingsReport {
  std::vector<SavingsRow> rows;
  double mean_savings_pct = 0.0;
  double median_savings_pct = 0.0;
  std::int64_t target_budget = 0;
  std::int64_t actual_budget = 0;
  double offline_seconds = 0.0;

  // Per Steiner-tree diameter: (diameter, count, mean savings pct).
  struct DiameterBucket {
    int diameter = 0;
    int count = 0;
    double mean_savings_pct = 0.0;
  };
  std::vector<DiameterBucket> by_diameter;
};

// Runs every query against the plain tree and the catalog-backed engine,
// checking answers agree within 1e-9.
SavingsReport run_bench(const JunctionTree& jt, const Catalog& catalog,
                        const std::vector<Query>& test_queries,
                        const MaterializeReport* offline = nullptr);

std::string savings_csv(const SavingsReport& report);

// Robustness mixing: for each lambda, evaluates the catalogs on a test log
// drawing a lambda share from `primary` and the rest from `other`.
struct RobustnessRow {
  double lambda = 0.0;
  std::string method;  // none | peanut | peanut+
  double mean_cost = 0.0;
  int queries = 0;
};

std::vector<RobustnessRow> run_robustness(const JunctionTree& jt, const Catalog& peanut,
                                          const Catalog& peanut_plus,
                                          const std::vector<Query>& primary,
                                          const std::vector<Query>& other,
                                          const std::vector<double>& lambdas);

std::string robustness_csv(const std::vector<RobustnessRow>& rows);

// Deterministic lambda mix: the first round(lambda*n) entries of `primary`
// followed by the first n - that of `other`.
std::vector<Query> mix_workloads(const std::vector<Query>& primary, const std::vector<Query>& other,
                                 double lambda, std::size_t n);

}  // namespace jtmat

#endif  // JTMAT_BENCH_HPP

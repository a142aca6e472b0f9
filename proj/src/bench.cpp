#include "jtmat/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "jtmat/errors.hpp"

namespace jtmat {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string query_names(const Query& q, const std::vector<Variable>& variables) {
  std::string out;
  for (std::size_t i = 0; i < q.variables.size(); ++i) {
    if (i) out += "|";
    out += variables[static_cast<std::size_t>(q.variables[i])].name;
  }
  return out;
}

}  // namespace

SavingsReport run_bench(const JunctionTree& jt, const Catalog& catalog,
                        const std::vector<Query>& test_queries, const MaterializeReport* offline) {
  SavingsReport report;
  report.target_budget = catalog.target_budget;
  report.actual_budget = catalog.actual_budget;
  if (offline) report.offline_seconds = offline->offline_seconds;

  Catalog empty;
  CardMap cards = jt.cardinalities();
  std::vector<double> savings;
  for (const Query& q : test_queries) {
    SteinerTree st = steiner_tree(jt, q);
    QueryResult base = message_passing(st, q, cards);
    QueryResult mat = answer_query(jt, q, catalog);
    if (base.answer.max_abs_diff(mat.answer) > 1e-9) {
      throw InternalError("materialized answer deviates from the baseline");
    }
    SavingsRow row;
    row.query = query_names(q, jt.variables);
    row.baseline_cost = base.cost;
    row.materialized_cost = mat.cost;
    row.savings_pct = 100.0 * static_cast<double>(base.cost - mat.cost) /
                      static_cast<double>(base.cost);
    row.shortcuts_used = mat.shortcuts_used;
    row.steiner_diameter = st.diameter_nodes();
    savings.push_back(row.savings_pct);
    report.rows.push_back(std::move(row));
  }
  if (!savings.empty()) {
    double sum = 0.0;
    for (double s : savings) sum += s;
    report.mean_savings_pct = sum / static_cast<double>(savings.size());
    std::vector<double> sorted = savings;
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    report.median_savings_pct = sorted.size() % 2 ? sorted[mid]
                                                  : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }
  std::map<int, std::pair<int, double>> buckets;
  for (const SavingsRow& row : report.rows) {
    auto& [count, total] = buckets[row.steiner_diameter];
    ++count;
    total += row.savings_pct;
  }
  for (const auto& [diameter, agg] : buckets) {
    report.by_diameter.push_back({diameter, agg.first, agg.second / agg.first});
  }
  return report;
}

std::string savings_csv(const SavingsReport& report) {
  std::ostringstream out;
  out << "query,baseline_cost,materialized_cost,savings_pct,shortcuts_used,steiner_diameter\n";
  for (const SavingsRow& row : report.rows) {
    out << row.query << "," << row.baseline_cost << "," << row.materialized_cost << ","
        << fmt(row.savings_pct) << ",";
    for (std::size_t i = 0; i < row.shortcuts_used.size(); ++i) {
      if (i) out << "|";
      out << row.shortcuts_used[i];
    }
    out << "," << row.steiner_diameter << "\n";
  }
  out << "\nmetric,value\n";
  out << "mean_savings_pct," << fmt(report.mean_savings_pct) << "\n";
  out << "median_savings_pct," << fmt(report.median_savings_pct) << "\n";
  out << "target_budget," << report.target_budget << "\n";
  out << "actual_budget," << report.actual_budget << "\n";
  out << "offline_seconds," << fmt(report.offline_seconds) << "\n";
  out << "\ndiameter,queries,mean_savings_pct\n";
  for (const auto& bucket : report.by_diameter) {
    out << bucket.diameter << "," << bucket.count << "," << fmt(bucket.mean_savings_pct) << "\n";
  }
  return out.str();
}

std::vector<Query> mix_workloads(const std::vector<Query>& primary, const std::vector<Query>& other,
                                 double lambda, std::size_t n) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("mix_workloads: lambda in [0,1]");
  std::size_t take = static_cast<std::size_t>(std::llround(lambda * static_cast<double>(n)));
  if (take > primary.size() || n - take > other.size()) {
    throw std::invalid_argument("mix_workloads: source workloads too small");
  }
  std::vector<Query> out(primary.begin(), primary.begin() + static_cast<std::ptrdiff_t>(take));
  out.insert(out.end(), other.begin(), other.begin() + static_cast<std::ptrdiff_t>(n - take));
  return out;
}

std::vector<RobustnessRow> run_robustness(const JunctionTree& jt, const Catalog& peanut,
                                          const Catalog& peanut_plus,
                                          const std::vector<Query>& primary,
                                          const std::vector<Query>& other,
                                          const std::vector<double>& lambdas) {
  std::vector<RobustnessRow> rows;
  CardMap cards = jt.cardinalities();
  Catalog none;
  std::size_t n = std::min(primary.size(), other.size());
  for (double lambda : lambdas) {
    std::vector<Query> mixed = mix_workloads(primary, other, lambda, n);
    struct MethodRef {
      const char* name;
      const Catalog* catalog;
    };
    for (const MethodRef& m :
         {MethodRef{"none", &none}, MethodRef{"peanut", &peanut}, MethodRef{"peanut+", &peanut_plus}}) {
      double total = 0.0;
      for (const Query& q : mixed) {
        total += static_cast<double>(answer_query(jt, q, *m.catalog).cost);
      }
      rows.push_back({lambda, m.name, total / static_cast<double>(mixed.size()),
                      static_cast<int>(mixed.size())});
    }
  }
  return rows;
}

std::string robustness_csv(const std::vector<RobustnessRow>& rows) {
  std::ostringstream out;
  out << "lambda,method,mean_cost,queries\n";
  for (const RobustnessRow& row : rows) {
    out << fmt(row.lambda) << "," << row.method << "," << fmt(row.mean_cost) << "," << row.queries
        << "\n";
  }
  return out.str();
}

}  // namespace jtmat

// jtmat: exact inference on discrete Bayesian networks via junction trees,
// with workload-aware materialization of shortcut potentials.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jtmat/bench.hpp"
#include "jtmat/bif.hpp"
#include "jtmat/errors.hpp"
#include "jtmat/native_io.hpp"
#include "jtmat/oracle.hpp"

namespace {

using namespace jtmat;

JunctionTree load_tree(const std::string& path) { return parse_tree(read_text_file(path)); }

std::int64_t resolve_budget(const JunctionTree& jt, std::int64_t budget, double budget_bt) {
  if (budget_bt > 0.0) {
    return static_cast<std::int64_t>(budget_bt * static_cast<double>(jt.total_separator_size()));
  }
  return budget;
}

MaterializeMode parse_mode(const std::string& mode) {
  if (mode == "peanut") return MaterializeMode::Peanut;
  if (mode == "peanut+") return MaterializeMode::PeanutPlus;
  if (mode == "none") return MaterializeMode::None;
  throw std::invalid_argument("unknown mode '" + mode + "' (expected peanut|peanut+|none)");
}

int cmd_build(const std::string& network_path, const std::string& out_path) {
  BayesianNetwork bn = read_network_auto(network_path);
  std::vector<Violation> violations = validate(bn);
  if (!violations.empty()) {
    for (const Violation& v : violations) {
      std::cerr << "violation [" << v.kind << "] " << v.detail << "\n";
    }
    return 2;
  }
  JunctionTree jt = build_junction_tree(bn);
  if (!out_path.empty()) write_text_file(out_path, serialize_tree(jt));
  std::cout << "variables " << bn.num_variables() << "\n"
            << "edges " << bn.num_edges() << "\n"
            << "cliques " << jt.num_cliques() << "\n"
            << "diameter " << jt.diameter_nodes() << "\n"
            << "treewidth " << jt.treewidth() << "\n"
            << "separator_size " << jt.total_separator_size() << "\n";
  return 0;
}

int cmd_gen_workload(const std::string& tree_path, const std::string& kind, int n,
                     std::uint64_t seed, int min_size, int max_size, const std::string& out_path) {
  JunctionTree jt = load_tree(tree_path);
  std::vector<Query> queries = kind == "skewed"
                                   ? generate_skewed(jt, n, {min_size, max_size}, seed)
                                   : generate_uniform(jt, n, {min_size, max_size}, seed);
  write_query_file(out_path, queries, jt.variables);
  std::cout << "queries " << queries.size() << "\n";
  return 0;
}

int cmd_materialize(const std::string& tree_path, const std::string& workload_path,
                    std::int64_t budget, double budget_bt, double epsilon, const std::string& mode,
                    const std::string& out_path) {
  JunctionTree jt = load_tree(tree_path);
  QueryLog log = estimate_probabilities(read_query_file(workload_path, jt.variables));
  MaterializeOptions options;
  options.budget = resolve_budget(jt, budget, budget_bt);
  options.epsilon = epsilon;
  options.mode = parse_mode(mode);
  MaterializeReport report;
  Catalog catalog = build_catalog(jt, log, options, &report);
  if (!out_path.empty()) write_text_file(out_path, serialize_catalog(catalog));
  std::cout << "target_budget " << report.target_budget << "\n"
            << "actual_budget " << report.actual_budget << "\n"
            << "shortcuts " << report.shortcuts << "\n"
            << "total_benefit " << report.total_benefit << "\n"
            << "offline_seconds " << report.offline_seconds << "\n";
  return 0;
}

int cmd_query(const std::string& tree_path, const std::string& catalog_path,
              const std::string& query_text) {
  JunctionTree jt = load_tree(tree_path);
  Catalog catalog;
  if (!catalog_path.empty()) catalog = parse_catalog(read_text_file(catalog_path));
  std::vector<Query> queries = parse_query_file(query_text + "\n", jt.variables);
  if (queries.size() != 1) throw std::invalid_argument("expected exactly one query");
  QueryResult result = answer_query(jt, queries[0], catalog);
  std::cout << "cost " << result.cost << "\n";
  std::cout << "shortcuts";
  for (int id : result.shortcuts_used) std::cout << " " << id;
  std::cout << "\n";
  for (std::int64_t i = 0; i < result.answer.size(); ++i) {
    std::vector<int> assign = result.answer.assignment_of(i);
    for (std::size_t j = 0; j < assign.size(); ++j) {
      if (j) std::cout << ",";
      std::cout << jt.variables[static_cast<std::size_t>(result.answer.scope()[j])].name << "="
                << assign[j];
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", result.answer.at(i));
    std::cout << " " << buf << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& tree_path, const std::string& catalog_path,
              const std::string& workload_path, const std::string& out_path) {
  JunctionTree jt = load_tree(tree_path);
  Catalog catalog;
  if (!catalog_path.empty()) catalog = parse_catalog(read_text_file(catalog_path));
  std::vector<Query> queries = read_query_file(workload_path, jt.variables);
  SavingsReport report = run_bench(jt, catalog, queries);
  std::string csv = savings_csv(report);
  if (!out_path.empty()) {
    write_text_file(out_path, csv);
  } else {
    std::cout << csv;
  }
  std::cerr << "mean_savings_pct " << report.mean_savings_pct << "\n";
  return 0;
}

int cmd_robustness(const std::string& tree_path, const std::string& peanut_path,
                   const std::string& plus_path, const std::string& workload_a,
                   const std::string& workload_b, const std::string& lambdas_text,
                   const std::string& out_path) {
  JunctionTree jt = load_tree(tree_path);
  Catalog peanut = parse_catalog(read_text_file(peanut_path));
  Catalog plus = parse_catalog(read_text_file(plus_path));
  std::vector<Query> a = read_query_file(workload_a, jt.variables);
  std::vector<Query> b = read_query_file(workload_b, jt.variables);
  std::vector<double> lambdas;
  std::istringstream ls(lambdas_text);
  std::string item;
  while (std::getline(ls, item, ',')) lambdas.push_back(std::stod(item));
  std::vector<RobustnessRow> rows = run_robustness(jt, peanut, plus, a, b, lambdas);
  std::string csv = robustness_csv(rows);
  if (!out_path.empty()) {
    write_text_file(out_path, csv);
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"junction-tree inference with workload-aware shortcut materialization"};
  app.require_subcommand(1);

  std::string network, tree, catalog, workload, workload_b, out, mode = "peanut", kind = "skewed";
  std::string query_text, peanut_path, plus_path, lambdas = "0,0.25,0.5,0.75,1";
  std::int64_t budget = 0;
  double budget_bt = 0.0, epsilon = 1.0;
  std::uint64_t seed = 0;
  int n = 1000, min_size = 1, max_size = 5;

  CLI::App* build = app.add_subcommand("build", "parse a network and emit a calibrated tree");
  build->add_option("--network", network)->required();
  build->add_option("--out", out);

  CLI::App* gen = app.add_subcommand("gen-workload", "generate a synthetic query workload");
  gen->add_option("--tree", tree)->required();
  gen->add_option("--kind", kind)->check(CLI::IsMember({"skewed", "uniform"}));
  gen->add_option("--n", n);
  gen->add_option("--seed", seed);
  gen->add_option("--min-size", min_size);
  gen->add_option("--max-size", max_size);
  gen->add_option("--out", out)->required();

  CLI::App* mat = app.add_subcommand("materialize", "select and materialize shortcut potentials");
  mat->add_option("--tree", tree)->required();
  mat->add_option("--workload", workload)->required();
  mat->add_option("--budget", budget);
  mat->add_option("--budget-bt", budget_bt);
  mat->add_option("--epsilon", epsilon);
  mat->add_option("--mode", mode)->check(CLI::IsMember({"peanut", "peanut+", "none"}));
  mat->add_option("--out", out);

  CLI::App* query = app.add_subcommand("query", "answer a single joint-probability query");
  query->add_option("--tree", tree)->required();
  query->add_option("--catalog", catalog);
  query->add_option("--query", query_text)->required();

  CLI::App* bench = app.add_subcommand("bench", "per-query cost savings report");
  bench->add_option("--tree", tree)->required();
  bench->add_option("--catalog", catalog);
  bench->add_option("--workload", workload)->required();
  bench->add_option("--out", out);

  CLI::App* robust = app.add_subcommand("robustness", "workload-mixing robustness sweep");
  robust->add_option("--tree", tree)->required();
  robust->add_option("--peanut", peanut_path)->required();
  robust->add_option("--peanut-plus", plus_path)->required();
  robust->add_option("--workload", workload)->required();
  robust->add_option("--workload-b", workload_b)->required();
  robust->add_option("--lambdas", lambdas);
  robust->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(network, out);
    if (gen->parsed()) return cmd_gen_workload(tree, kind, n, seed, min_size, max_size, out);
    if (mat->parsed()) return cmd_materialize(tree, workload, budget, budget_bt, epsilon, mode, out);
    if (query->parsed()) return cmd_query(tree, catalog, query_text);
    if (bench->parsed()) return cmd_bench(tree, catalog, workload, out);
    if (robust->parsed())
      return cmd_robustness(tree, peanut_path, plus_path, workload, workload_b, lambdas, out);
  } catch (const jtmat::InternalError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}

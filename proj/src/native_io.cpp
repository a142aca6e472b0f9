#include "jtmat/native_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jtmat/bif.hpp"
#include "jtmat/errors.hpp"

namespace jtmat {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Whitespace-token reader with line tracking.
class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ParseError("unexpected end of document", line_);
    if (w == "#") {
      std::string rest;
      std::getline(in_, rest);
      ++line_;
      return word();
    }
    return w;
  }

  void expect(const std::string& w) {
    std::string got = word();
    if (got != w) throw ParseError("expected '" + w + "', got '" + got + "'", line_);
  }

  long long integer() {
    std::string w = word();
    char* end = nullptr;
    long long v = std::strtoll(w.c_str(), &end, 10);
    if (end == w.c_str() || *end != '\0') throw ParseError("expected integer, got '" + w + "'", line_);
    return v;
  }

  double real() {
    std::string w = word();
    char* end = nullptr;
    double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') throw ParseError("expected number, got '" + w + "'", line_);
    return v;
  }

 private:
  std::istringstream in_;
  int line_ = 1;
};

void write_factor(std::ostringstream& out, const DiscreteFactor& f) {
  out << "scope " << f.scope().size();
  for (int id : f.scope()) out << " " << id;
  out << "\nvalues " << f.values().size();
  for (double v : f.values()) out << " " << fmt_double(v);
  out << "\n";
}

DiscreteFactor read_factor(Reader& r, const CardMap& cards) {
  r.expect("scope");
  long long k = r.integer();
  Scope scope;
  for (long long i = 0; i < k; ++i) scope.push_back(static_cast<int>(r.integer()));
  if (!is_canonical_scope(scope)) throw std::invalid_argument("factor scope not canonical");
  std::vector<int> fcards(scope.size());
  for (std::size_t i = 0; i < scope.size(); ++i) fcards[i] = cards[static_cast<std::size_t>(scope[i])];
  r.expect("values");
  long long n = r.integer();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) values.push_back(r.real());
  return DiscreteFactor(std::move(scope), std::move(fcards), std::move(values));
}

void write_variables(std::ostringstream& out, const std::vector<Variable>& variables) {
  out << "variables " << variables.size() << "\n";
  for (const Variable& v : variables) {
    out << v.id << " " << v.cardinality << " " << v.name << "\n";
  }
}

std::vector<Variable> read_variables(Reader& r) {
  r.expect("variables");
  long long n = r.integer();
  std::vector<Variable> out;
  for (long long i = 0; i < n; ++i) {
    Variable v;
    v.id = static_cast<int>(r.integer());
    v.cardinality = static_cast<int>(r.integer());
    v.name = r.word();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::string serialize_network(const BayesianNetwork& bn) {
  std::ostringstream out;
  out << "jtmat-net v1\n";
  write_variables(out, bn.variables);
  out << "edges\n";
  for (int v = 0; v < bn.num_variables(); ++v) {
    out << v << " " << bn.parents[static_cast<std::size_t>(v)].size();
    for (int p : bn.parents[static_cast<std::size_t>(v)]) out << " " << p;
    out << "\n";
  }
  out << "cpts\n";
  for (const DiscreteFactor& cpt : bn.cpts) write_factor(out, cpt);
  out << "end\n";
  return out.str();
}

BayesianNetwork parse_network(const std::string& text) {
  Reader r(text);
  r.expect("jtmat-net");
  r.expect("v1");
  BayesianNetwork bn;
  bn.variables = read_variables(r);
  CardMap cards = bn.cardinalities();
  r.expect("edges");
  bn.parents.resize(bn.variables.size());
  for (std::size_t v = 0; v < bn.variables.size(); ++v) {
    long long id = r.integer();
    long long k = r.integer();
    std::vector<int> parents;
    for (long long i = 0; i < k; ++i) parents.push_back(static_cast<int>(r.integer()));
    bn.parents[static_cast<std::size_t>(id)] = std::move(parents);
  }
  r.expect("cpts");
  for (std::size_t v = 0; v < bn.variables.size(); ++v) {
    bn.cpts.push_back(read_factor(r, cards));
  }
  r.expect("end");
  return bn;
}

std::string serialize_tree(const JunctionTree& jt) {
  std::ostringstream out;
  out << "jtmat-tree v1\n";
  write_variables(out, jt.variables);
  out << "cliques " << jt.cliques.size() << "\n";
  for (const CliqueNode& c : jt.cliques) {
    out << c.id << "\n";
    write_factor(out, c.potential);
  }
  out << "separators " << jt.separators.size() << "\n";
  for (const Separator& s : jt.separators) {
    out << s.u << " " << s.v << "\n";
    write_factor(out, s.potential);
  }
  out << "pivot " << jt.pivot << "\n";
  out << "dfslabels";
  for (int label : jt.dfs_labels) out << " " << label;
  out << "\n";
  out << "calibrated " << (jt.calibrated ? 1 : 0) << "\n";
  out << "end\n";
  return out.str();
}

JunctionTree parse_tree(const std::string& text) {
  Reader r(text);
  r.expect("jtmat-tree");
  r.expect("v1");
  JunctionTree jt;
  jt.variables = read_variables(r);
  CardMap cards = jt.cardinalities();
  r.expect("cliques");
  long long n = r.integer();
  for (long long i = 0; i < n; ++i) {
    CliqueNode c;
    c.id = static_cast<int>(r.integer());
    c.potential = read_factor(r, cards);
    c.scope = c.potential.scope();
    c.size = c.potential.size();
    jt.cliques.push_back(std::move(c));
  }
  r.expect("separators");
  long long m = r.integer();
  jt.adjacency.assign(jt.cliques.size(), {});
  for (long long i = 0; i < m; ++i) {
    Separator s;
    s.u = static_cast<int>(r.integer());
    s.v = static_cast<int>(r.integer());
    s.potential = read_factor(r, cards);
    s.scope = s.potential.scope();
    jt.adjacency[static_cast<std::size_t>(s.u)].push_back({s.v, static_cast<int>(i)});
    jt.adjacency[static_cast<std::size_t>(s.v)].push_back({s.u, static_cast<int>(i)});
    jt.separators.push_back(std::move(s));
  }
  for (auto& nbs : jt.adjacency) std::sort(nbs.begin(), nbs.end());
  r.expect("pivot");
  int pivot = static_cast<int>(r.integer());
  r.expect("dfslabels");
  std::vector<int> labels;
  for (std::size_t i = 0; i < jt.cliques.size(); ++i) labels.push_back(static_cast<int>(r.integer()));
  r.expect("calibrated");
  jt.calibrated = r.integer() != 0;
  r.expect("end");
  jt.set_pivot(pivot);
  if (jt.dfs_labels != labels) {
    throw ParseError("dfs labels do not match the pivot ordering", 1);
  }
  return jt;
}

std::string serialize_catalog(const Catalog& catalog) {
  std::ostringstream out;
  out << "jtmat-cat v1\n";
  out << "mode " << (catalog.mode == Catalog::Mode::Disjoint ? "disjoint" : "overlapping") << "\n";
  out << "target_budget " << catalog.target_budget << "\n";
  out << "actual_budget " << catalog.actual_budget << "\n";
  out << "shortcuts " << catalog.shortcuts.size() << "\n";
  for (const ShortcutPotential& s : catalog.shortcuts) {
    out << "shortcut " << s.id << " root " << s.root << "\n";
    out << "nodes " << s.nodes.size();
    for (int v : s.nodes) out << " " << v;
    out << "\n";
    out << "cut " << s.cut.size();
    for (int c : s.cut) out << " " << c;
    out << "\n";
    out << "cutscope " << s.scope.size();
    for (int v : s.scope) out << " " << v;
    out << "\n";
    out << "cost " << s.cost << "\n";
    out << "benefit " << fmt_double(s.benefit) << "\n";
    out << "ratio " << fmt_double(s.ratio) << "\n";
    if (s.table.has_value()) {
      // Catalog files are standalone, so table cardinalities are inlined.
      const DiscreteFactor& t = *s.table;
      out << "table\nscope " << t.scope().size();
      for (int id : t.scope()) out << " " << id;
      out << "\ncards " << t.scope().size();
      for (int c : t.cards()) out << " " << c;
      out << "\nvalues " << t.values().size();
      for (double v : t.values()) out << " " << fmt_double(v);
      out << "\n";
    } else {
      out << "notable\n";
    }
  }
  out << "end\n";
  return out.str();
}

Catalog parse_catalog(const std::string& text) {
  Reader r(text);
  r.expect("jtmat-cat");
  r.expect("v1");
  Catalog cat;
  r.expect("mode");
  std::string mode = r.word();
  if (mode == "disjoint") {
    cat.mode = Catalog::Mode::Disjoint;
  } else if (mode == "overlapping") {
    cat.mode = Catalog::Mode::Overlapping;
  } else {
    throw ParseError("unknown catalog mode '" + mode + "'", 1);
  }
  r.expect("target_budget");
  cat.target_budget = r.integer();
  r.expect("actual_budget");
  cat.actual_budget = r.integer();
  r.expect("shortcuts");
  long long n = r.integer();
  for (long long i = 0; i < n; ++i) {
    ShortcutPotential s;
    r.expect("shortcut");
    s.id = static_cast<int>(r.integer());
    r.expect("root");
    s.root = static_cast<int>(r.integer());
    r.expect("nodes");
    long long k = r.integer();
    for (long long j = 0; j < k; ++j) s.nodes.push_back(static_cast<int>(r.integer()));
    r.expect("cut");
    k = r.integer();
    for (long long j = 0; j < k; ++j) s.cut.push_back(static_cast<int>(r.integer()));
    r.expect("cutscope");
    k = r.integer();
    for (long long j = 0; j < k; ++j) s.scope.push_back(static_cast<int>(r.integer()));
    r.expect("cost");
    s.cost = r.integer();
    r.expect("benefit");
    s.benefit = r.real();
    r.expect("ratio");
    s.ratio = r.real();
    std::string marker = r.word();
    if (marker == "table") {
      r.expect("scope");
      long long sk = r.integer();
      Scope scope;
      for (long long j = 0; j < sk; ++j) scope.push_back(static_cast<int>(r.integer()));
      r.expect("cards");
      long long ck = r.integer();
      std::vector<int> cards;
      for (long long j = 0; j < ck; ++j) cards.push_back(static_cast<int>(r.integer()));
      r.expect("values");
      long long vn = r.integer();
      std::vector<double> values;
      for (long long j = 0; j < vn; ++j) values.push_back(r.real());
      s.table = DiscreteFactor(std::move(scope), std::move(cards), std::move(values));
    } else if (marker != "notable") {
      throw ParseError("expected 'table' or 'notable', got '" + marker + "'", 1);
    }
    cat.shortcuts.push_back(std::move(s));
  }
  r.expect("end");
  return cat;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

BayesianNetwork read_network_auto(const std::string& path) {
  std::string text = read_text_file(path);
  if (text.rfind("jtmat-net", 0) == 0) return parse_network(text);
  return parse_bif(text);
}

}  // namespace jtmat

#include "jtmat/bif.hpp"

#include <cctype>
#include <cstring>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "jtmat/errors.hpp"

namespace jtmat {

namespace {

struct Token {
  enum Kind { Word, Number, Punct, End } kind = End;
  std::string text;
  double number = 0.0;
  int line = 0;
  int column = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.kind = Token::End;
      return t;
    }
    char c = text_[pos_];
    if (std::strchr("{}()[],;|", c)) {
      t.kind = Token::Punct;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    // Numbers and words share an alphabet in BIF (state names may start
    // with digits); classify by a full strtod parse.
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           !std::strchr("{}()[],;|", text_[pos_])) {
      advance();
    }
    t.text = text_.substr(start, pos_ - start);
    const char* begin = t.text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin && *end == '\0') {
      t.kind = Token::Number;
      t.number = value;
    } else {
      t.kind = Token::Word;
    }
    return t;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

struct VarDecl {
  std::string name;
  std::vector<std::string> states;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { bump(); }

  BayesianNetwork parse() {
    while (cur_.kind != Token::End) {
      if (cur_.kind == Token::Word && cur_.text == "network") {
        parse_network_block();
      } else if (cur_.kind == Token::Word && cur_.text == "variable") {
        parse_variable_block();
      } else if (cur_.kind == Token::Word && cur_.text == "probability") {
        parse_probability_block();
      } else {
        fail("expected 'network', 'variable' or 'probability'");
      }
    }
    return finish();
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur_.line, cur_.column);
  }

  void bump() { cur_ = lexer_.next(); }

  void expect_punct(const std::string& p) {
    if (cur_.kind != Token::Punct || cur_.text != p) fail("expected '" + p + "'");
    bump();
  }

  std::string expect_name() {
    if (cur_.kind != Token::Word && cur_.kind != Token::Number) fail("expected a name");
    std::string s = cur_.text;
    bump();
    return s;
  }

  void skip_braced_block() {
    expect_punct("{");
    int depth = 1;
    while (depth > 0) {
      if (cur_.kind == Token::End) fail("unterminated block");
      if (cur_.kind == Token::Punct && cur_.text == "{") ++depth;
      if (cur_.kind == Token::Punct && cur_.text == "}") --depth;
      bump();
    }
  }

  void skip_statement() {
    while (!(cur_.kind == Token::Punct && cur_.text == ";")) {
      if (cur_.kind == Token::End) fail("unterminated statement");
      bump();
    }
    bump();
  }

  void parse_network_block() {
    bump();  // network
    expect_name();
    skip_braced_block();
  }

  void parse_variable_block() {
    bump();  // variable
    VarDecl decl;
    decl.name = expect_name();
    if (var_index_.count(decl.name)) fail("duplicate variable '" + decl.name + "'");
    expect_punct("{");
    while (!(cur_.kind == Token::Punct && cur_.text == "}")) {
      if (cur_.kind == Token::Word && cur_.text == "type") {
        bump();
        if (cur_.kind != Token::Word || cur_.text != "discrete") {
          fail("only discrete variables are supported");
        }
        bump();
        expect_punct("[");
        if (cur_.kind != Token::Number) fail("expected state count");
        int count = static_cast<int>(cur_.number);
        bump();
        expect_punct("]");
        expect_punct("{");
        while (!(cur_.kind == Token::Punct && cur_.text == "}")) {
          decl.states.push_back(expect_name());
          if (cur_.kind == Token::Punct && cur_.text == ",") bump();
        }
        bump();  // }
        expect_punct(";");
        if (static_cast<int>(decl.states.size()) != count) {
          fail("state count does not match state list for '" + decl.name + "'");
        }
      } else if (cur_.kind == Token::Word && cur_.text == "property") {
        skip_statement();
      } else {
        fail("unexpected token in variable block");
      }
    }
    bump();  // }
    if (decl.states.empty()) fail("variable '" + decl.name + "' has no discrete type");
    var_index_[decl.name] = static_cast<int>(decls_.size());
    decls_.push_back(std::move(decl));
  }

  int lookup_var(const std::string& name) {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) fail("unknown variable '" + name + "'");
    return it->second;
  }

  int lookup_state(int var, const std::string& state) {
    const VarDecl& d = decls_[static_cast<std::size_t>(var)];
    for (std::size_t i = 0; i < d.states.size(); ++i) {
      if (d.states[i] == state) return static_cast<int>(i);
    }
    fail("unknown state '" + state + "' of variable '" + d.name + "'");
  }

  std::vector<double> read_value_list() {
    std::vector<double> values;
    while (!(cur_.kind == Token::Punct && cur_.text == ";")) {
      if (cur_.kind == Token::Punct && cur_.text == ",") {
        bump();
        continue;
      }
      if (cur_.kind != Token::Number) fail("expected a probability value");
      values.push_back(cur_.number);
      bump();
    }
    bump();  // ;
    return values;
  }

  void parse_probability_block() {
    int block_line = cur_.line;
    bump();  // probability
    expect_punct("(");
    int child = lookup_var(expect_name());
    std::vector<int> parents;
    if (cur_.kind == Token::Punct && cur_.text == "|") {
      bump();
      while (!(cur_.kind == Token::Punct && cur_.text == ")")) {
        parents.push_back(lookup_var(expect_name()));
        if (cur_.kind == Token::Punct && cur_.text == ",") bump();
      }
    }
    expect_punct(")");
    if (cpt_rows_.count(child)) fail("duplicate probability block");

    std::int64_t combos = 1;
    for (int p : parents) combos *= decls_[static_cast<std::size_t>(p)].states.size();
    const int child_card = static_cast<int>(decls_[static_cast<std::size_t>(child)].states.size());

    std::vector<double> rows(static_cast<std::size_t>(combos * child_card), -1.0);
    expect_punct("{");
    while (!(cur_.kind == Token::Punct && cur_.text == "}")) {
      if (cur_.kind == Token::Word && cur_.text == "table") {
        bump();
        std::vector<double> values = read_value_list();
        if (static_cast<std::int64_t>(values.size()) != combos * child_card) {
          throw ParseError("table of wrong arity for variable '" +
                               decls_[static_cast<std::size_t>(child)].name + "'",
                           block_line);
        }
        // Parent combinations slowest (declared order), child fastest.
        rows = values;
      } else if (cur_.kind == Token::Punct && cur_.text == "(") {
        int row_line = cur_.line;
        bump();
        std::vector<int> states;
        while (!(cur_.kind == Token::Punct && cur_.text == ")")) {
          std::string s = expect_name();
          if (static_cast<std::size_t>(states.size()) >= parents.size()) {
            throw ParseError("probability row of wrong arity", row_line);
          }
          states.push_back(lookup_state(parents[states.size()], s));
          if (cur_.kind == Token::Punct && cur_.text == ",") bump();
        }
        bump();  // )
        if (states.size() != parents.size()) {
          throw ParseError("probability row of wrong arity", row_line);
        }
        std::vector<double> values = read_value_list();
        if (static_cast<int>(values.size()) != child_card) {
          throw ParseError("probability row of wrong arity", row_line);
        }
        std::int64_t combo = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
          combo = combo * decls_[static_cast<std::size_t>(parents[i])].states.size() + states[i];
        }
        for (int s = 0; s < child_card; ++s) {
          rows[static_cast<std::size_t>(combo * child_card + s)] = values[static_cast<std::size_t>(s)];
        }
      } else if (cur_.kind == Token::Word && cur_.text == "property") {
        skip_statement();
      } else {
        fail("unexpected token in probability block");
      }
    }
    bump();  // }
    for (double v : rows) {
      if (v < 0.0) {
        throw ParseError("probability block for '" +
                             decls_[static_cast<std::size_t>(child)].name +
                             "' does not cover every parent assignment",
                         block_line);
      }
    }
    cpt_rows_[child] = {parents, std::move(rows), block_line};
  }

  BayesianNetwork finish() {
    BayesianNetwork bn;
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      bn.variables.push_back(
          {static_cast<int>(i), decls_[i].name, static_cast<int>(decls_[i].states.size())});
    }
    bn.parents.resize(decls_.size());
    bn.cpts.resize(decls_.size());
    CardMap cards = bn.cardinalities();

    std::vector<std::string> offenders;
    for (std::size_t v = 0; v < decls_.size(); ++v) {
      auto it = cpt_rows_.find(static_cast<int>(v));
      if (it == cpt_rows_.end()) {
        throw ParseError("missing probability block for variable '" + decls_[v].name + "'", 1);
      }
      const std::vector<int>& parents = it->second.parents;
      std::vector<double>& rows = it->second.values;
      const int child_card = static_cast<int>(decls_[v].states.size());
      const std::int64_t combos = static_cast<std::int64_t>(rows.size()) / child_card;
      for (std::int64_t r = 0; r < combos; ++r) {
        double sum = 0.0;
        for (int s = 0; s < child_card; ++s) sum += rows[static_cast<std::size_t>(r * child_card + s)];
        if (std::abs(sum - 1.0) > 1e-6) {
          offenders.push_back(decls_[v].name + " row " + std::to_string(r) + " sums to " +
                              std::to_string(sum));
        } else {
          for (int s = 0; s < child_card; ++s) rows[static_cast<std::size_t>(r * child_card + s)] /= sum;
        }
      }
      bn.parents[v] = parents;

      // Map (parent combo, child state) rows into the canonical layout.
      Scope scope = make_scope([&] {
        std::vector<int> ids = parents;
        ids.push_back(static_cast<int>(v));
        return ids;
      }());
      std::vector<int> scope_cards(scope.size());
      for (std::size_t i = 0; i < scope.size(); ++i) scope_cards[i] = cards[static_cast<std::size_t>(scope[i])];
      std::vector<double> table(static_cast<std::size_t>(table_size(scope, cards)), 0.0);
      DiscreteFactor shape = DiscreteFactor::ones(scope, scope_cards);
      std::vector<int> assign(scope.size(), 0);
      std::vector<int> combo_states(parents.size(), 0);
      for (std::int64_t r = 0; r < combos; ++r) {
        std::int64_t rest = r;
        for (std::size_t i = parents.size(); i-- > 0;) {
          combo_states[i] = static_cast<int>(rest % cards[static_cast<std::size_t>(parents[i])]);
          rest /= cards[static_cast<std::size_t>(parents[i])];
        }
        for (int s = 0; s < child_card; ++s) {
          for (std::size_t i = 0; i < scope.size(); ++i) {
            if (scope[i] == static_cast<int>(v)) {
              assign[i] = s;
            } else {
              for (std::size_t p = 0; p < parents.size(); ++p) {
                if (parents[p] == scope[i]) assign[i] = combo_states[p];
              }
            }
          }
          table[static_cast<std::size_t>(shape.index_of(assign))] =
              rows[static_cast<std::size_t>(r * child_card + s)];
        }
      }
      bn.cpts[v] = DiscreteFactor(scope, scope_cards, std::move(table));
    }
    if (!offenders.empty()) {
      std::string msg = "CPT rows do not sum to 1:";
      for (const std::string& o : offenders) msg += " [" + o + "]";
      throw ParseError(msg, 1);
    }
    try {
      topological_order(bn);
    } catch (const std::invalid_argument&) {
      throw ParseError("parent graph contains a directed cycle", 1);
    }
    return bn;
  }

  struct CptRows {
    std::vector<int> parents;
    std::vector<double> values;
    int line;
  };

  Lexer lexer_;
  Token cur_;
  std::vector<VarDecl> decls_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<int, CptRows> cpt_rows_;
};

}  // namespace

BayesianNetwork parse_bif(const std::string& text) { return Parser(text).parse(); }

BayesianNetwork parse_bif_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bif(ss.str());
}

}  // namespace jtmat

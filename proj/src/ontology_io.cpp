#include "ctxg/ontology_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ctxg/errors.hpp"
#include "ctxg/text.hpp"

namespace ctxg::onto {

namespace {

// Single-line token scanner: identifiers, '(' and ')'.
class LineScanner {
 public:
  LineScanner(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  struct Token {
    enum class Kind { ident, lparen, rparen, end };
    Kind kind;
    std::string value;
    std::size_t column;
  };

  Token next() {
    skip_space();
    const std::size_t col = pos_ + 1;
    if (pos_ >= line_.size()) return {Token::Kind::end, "", col};
    const char c = line_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::Kind::lparen, "(", col};
    }
    if (c == ')') {
      ++pos_;
      return {Token::Kind::rparen, ")", col};
    }
    if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_') {
      std::size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) != 0 ||
              line_[pos_] == '_')) {
        ++pos_;
      }
      return {Token::Kind::ident,
              std::string(line_.substr(start, pos_ - start)), col};
    }
    fail(col, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(std::size_t column, const std::string& msg) const {
    throw ParseError(line_no_, column, msg);
  }

 private:
  void skip_space() {
    while (pos_ < line_.size() &&
           std::isspace(static_cast<unsigned char>(line_[pos_])) != 0) {
      ++pos_;
    }
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

class OntologyParser {
 public:
  Ontology parse(std::string_view input) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= input.size()) {
      std::size_t end = input.find('\n', start);
      std::string_view line = (end == std::string_view::npos)
                                  ? input.substr(start)
                                  : input.substr(start, end - start);
      ++line_no;
      handle_line(line, line_no);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    try {
      return std::move(builder_).build();
    } catch (const Error& e) {
      throw ParseError(line_no, 1, e.what());
    }
  }

 private:
  void handle_line(std::string_view raw, std::size_t line_no) {
    std::size_t hash = raw.find('#');
    std::string_view line = (hash == std::string_view::npos)
                                ? raw
                                : raw.substr(0, hash);
    if (text::trim(line).empty()) return;

    LineScanner sc(line, line_no);
    auto head = sc.next();
    if (head.kind != LineScanner::Token::Kind::ident) {
      sc.fail(head.column, "expected declaration or axiom keyword");
    }
    expect(sc, LineScanner::Token::Kind::lparen, "(");
    if (head.value == "Concept") {
      auto name = expect_ident(sc);
      check_identifier(sc, name);
      expect(sc, LineScanner::Token::Kind::rparen, ")");
      concepts_.insert(name.value);
      builder_.declare_concept(name.value);
    } else if (head.value == "Role") {
      auto name = expect_ident(sc);
      check_identifier(sc, name);
      expect(sc, LineScanner::Token::Kind::rparen, ")");
      roles_.insert(name.value);
      builder_.declare_role(name.value);
    } else if (head.value == "SubClassOf") {
      auto sub = expect_ident(sc);
      auto sup = expect_ident(sc);
      expect(sc, LineScanner::Token::Kind::rparen, ")");
      require_concept(sc, sub);
      require_concept(sc, sup);
      builder_.subclass(sub.value, sup.value);
    } else if (head.value == "EquivalentTo") {
      auto lhs = expect_ident(sc);
      require_concept(sc, lhs);
      ConceptExpr rhs = parse_expr(sc);
      expect(sc, LineScanner::Token::Kind::rparen, ")");
      builder_.equivalent(lhs.value, std::move(rhs));
    } else {
      sc.fail(head.column, "unknown keyword '" + head.value + "'");
    }
    auto tail = sc.next();
    if (tail.kind != LineScanner::Token::Kind::end) {
      sc.fail(tail.column, "trailing input after axiom");
    }
  }

  ConceptExpr parse_expr(LineScanner& sc) {
    auto tok = sc.next();
    if (tok.kind != LineScanner::Token::Kind::ident) {
      sc.fail(tok.column, "expected concept expression");
    }
    if (tok.value == "And") {
      expect(sc, LineScanner::Token::Kind::lparen, "(");
      std::vector<ConceptExpr> parts;
      // peek loop: expressions until ')'
      while (true) {
        auto save = sc;  // LineScanner is copyable; cheap lookahead
        auto probe = save.next();
        if (probe.kind == LineScanner::Token::Kind::rparen) {
          sc = save;
          break;
        }
        parts.push_back(parse_expr(sc));
      }
      if (parts.size() < 2) {
        sc.fail(1, "And(...) needs at least two conjuncts");
      }
      return ConceptExpr::conjunction(std::move(parts));
    }
    if (tok.value == "Some") {
      expect(sc, LineScanner::Token::Kind::lparen, "(");
      auto role = expect_ident(sc);
      auto filler = expect_ident(sc);
      expect(sc, LineScanner::Token::Kind::rparen, ")");
      require_role(sc, role);
      require_concept(sc, filler);
      return ConceptExpr::exists(role.value, filler.value);
    }
    require_concept(sc, tok);
    return ConceptExpr::atomic(tok.value);
  }

  LineScanner::Token expect_ident(LineScanner& sc) {
    auto tok = sc.next();
    if (tok.kind != LineScanner::Token::Kind::ident) {
      sc.fail(tok.column, "expected a name");
    }
    return tok;
  }

  void expect(LineScanner& sc, LineScanner::Token::Kind kind,
              const std::string& what) {
    auto tok = sc.next();
    if (tok.kind != kind) {
      sc.fail(tok.column, "expected '" + what + "'");
    }
  }

  void check_identifier(LineScanner& sc, const LineScanner::Token& tok) {
    if (!text::is_identifier(tok.value)) {
      sc.fail(tok.column, "invalid name '" + tok.value + "'");
    }
  }

  void require_concept(LineScanner& sc, const LineScanner::Token& tok) {
    if (concepts_.count(tok.value) == 0) {
      sc.fail(tok.column, "undeclared concept '" + tok.value + "'");
    }
  }

  void require_role(LineScanner& sc, const LineScanner::Token& tok) {
    if (roles_.count(tok.value) == 0) {
      sc.fail(tok.column, "undeclared role '" + tok.value + "'");
    }
  }

  Ontology::Builder builder_;
  std::set<std::string> concepts_;
  std::set<std::string> roles_;
};

}  // namespace

std::string serialize_ontology(const Ontology& o) {
  std::string out;
  for (const auto& c : o.concepts()) {
    out += "Concept(" + c + ")\n";
  }
  for (const auto& r : o.roles()) {
    out += "Role(" + r + ")\n";
  }
  for (const auto& a : o.axioms()) {
    out += to_text(a) + "\n";
  }
  return out;
}

Ontology parse_ontology(std::string_view input) {
  OntologyParser parser;
  return parser.parse(input);
}

Ontology load_ontology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ontology file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ontology(buf.str());
}

void save_ontology_file(const Ontology& o, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write ontology file: " + path);
  out << serialize_ontology(o);
}

}  // namespace ctxg::onto

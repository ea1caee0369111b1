#include "ctxg/context.hpp"

#include <fstream>
#include <sstream>

#include "ctxg/errors.hpp"
#include "ctxg/text.hpp"

namespace ctxg::repr {

ContextValue ContextValue::literal(std::string s) {
  if (text::trim(s).empty()) {
    throw ConfigError("context literal must be non-empty");
  }
  return {Kind::literal, std::move(s)};
}

ContextValue ContextValue::concept_ref(std::string name) {
  if (!text::is_identifier(name)) {
    throw ConfigError("invalid concept reference: '" + name + "'");
  }
  return {Kind::concept_ref, std::move(name)};
}

const std::map<std::string, std::string>& attribute_aliases() {
  static const std::map<std::string, std::string> aliases{
      {"location", "hasLocation"},  {"religion", "hasReligion"},
      {"region", "hasRegion"},      {"ethnicity", "hasEthnicGroup"},
      {"value", "hasValue"},        {"principle", "hasPrinciple"},
      {"norm", "hasNorm"},
  };
  return aliases;
}

const std::set<std::string>& registered_attributes() {
  static const std::set<std::string> attrs{"age_group", "age", "gender",
                                           "race"};
  return attrs;
}

bool is_registered_attribute(const std::string& name) {
  return attribute_aliases().count(name) > 0 ||
         registered_attributes().count(name) > 0;
}

const std::string& resolve_attribute(const std::string& name) {
  auto it = attribute_aliases().find(name);
  return it == attribute_aliases().end() ? name : it->second;
}

ValidationReport validate_context(const ContextElement& e,
                                  const onto::Ontology& o,
                                  const std::string& target) {
  if (!o.has_concept(target)) {
    throw UnknownConceptError("unknown concept: '" + target + "'");
  }
  ValidationReport report;
  report.element_id = e.id;

  std::set<std::string> present;
  for (const auto& [name, value] : e.predicates) {
    present.insert(resolve_attribute(name));
    if (!o.has_role(name) && !is_registered_attribute(name)) {
      report.unknown_predicates.push_back(name);
    }
  }
  for (const auto& [role, filler] : o.required_roles(target)) {
    (void)filler;
    if (present.count(role) == 0) {
      report.missing_roles.push_back(role);
    }
  }
  report.satisfied =
      report.missing_roles.empty() && report.unknown_predicates.empty();
  return report;
}

std::vector<Triple> to_triples(const ContextElement& e) {
  std::vector<Triple> out;
  out.reserve(e.predicates.size() + 1);
  out.push_back(Triple{e.id, std::string(kTypePredicate),
                       ContextValue::concept_ref(
                           std::string(onto::top_concept(e.kind)))});
  for (const auto& [name, value] : e.predicates) {
    out.push_back(Triple{e.id, name, value});
  }
  return out;
}

std::vector<ContextElement> from_triples(const std::vector<Triple>& triples) {
  std::vector<std::string> order;
  std::map<std::string, ContextElement> by_subject;
  std::set<std::string> typed;

  for (const auto& t : triples) {
    auto [it, inserted] = by_subject.try_emplace(t.subject);
    if (inserted) {
      it->second.id = t.subject;
      order.push_back(t.subject);
    }
    if (t.predicate == kTypePredicate) {
      if (typed.count(t.subject) > 0) {
        throw DuplicatePredicateError("subject '" + t.subject +
                                      "' has more than one rdf:type");
      }
      typed.insert(t.subject);
      if (t.object.kind != ContextValue::Kind::concept_ref) {
        throw MissingTypeError("subject '" + t.subject +
                               "' has a literal rdf:type");
      }
      bool known = false;
      for (auto kind :
           {onto::ContextKind::situational, onto::ContextKind::cultural,
            onto::ContextKind::ethical}) {
        if (t.object.text == onto::top_concept(kind)) {
          it->second.kind = kind;
          known = true;
          break;
        }
      }
      if (!known) {
        throw MissingTypeError("subject '" + t.subject +
                               "' has unknown type concept '" +
                               t.object.text + "'");
      }
    } else {
      auto [pit, fresh] =
          it->second.predicates.try_emplace(t.predicate, t.object);
      (void)pit;
      if (!fresh) {
        throw DuplicatePredicateError("subject '" + t.subject +
                                      "' repeats predicate '" + t.predicate +
                                      "'");
      }
    }
  }
  for (const auto& subject : order) {
    if (typed.count(subject) == 0) {
      throw MissingTypeError("subject '" + subject + "' has no rdf:type");
    }
  }

  std::vector<ContextElement> out;
  out.reserve(order.size());
  for (const auto& subject : order) {
    out.push_back(std::move(by_subject.at(subject)));
  }
  return out;
}

namespace {

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string serialize_triples(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += t.subject;
    out.push_back(' ');
    out += t.predicate;
    out.push_back(' ');
    if (t.object.kind == ContextValue::Kind::literal) {
      out.push_back('"');
      out += escape_literal(t.object.text);
      out.push_back('"');
    } else {
      out += t.object.text;
    }
    out += " .\n";
  }
  return out;
}

namespace {

class TripleLineParser {
 public:
  TripleLineParser(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  // Returns false for blank/comment lines.
  bool parse(Triple& out) {
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] == '#') return false;

    out.subject = bare_token("subject");
    skip_space();
    out.predicate = bare_token("predicate");
    skip_space();
    if (pos_ >= line_.size()) fail("missing object");
    if (line_[pos_] == '"') {
      out.object = ContextValue{ContextValue::Kind::literal, quoted()};
    } else {
      out.object =
          ContextValue{ContextValue::Kind::concept_ref, bare_token("object")};
    }
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != '.') {
      fail("missing final '.'");
    }
    ++pos_;
    skip_space();
    if (pos_ < line_.size() && line_[pos_] != '#') {
      fail("trailing input after '.'");
    }
    return true;
  }

 private:
  void skip_space() {
    while (pos_ < line_.size() &&
           std::isspace(static_cast<unsigned char>(line_[pos_])) != 0) {
      ++pos_;
    }
  }

  std::string bare_token(const std::string& what) {
    const std::size_t start = pos_;
    while (pos_ < line_.size()) {
      const unsigned char c = static_cast<unsigned char>(line_[pos_]);
      if (std::isalnum(c) != 0 || c == '_' || c == ':') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token(line_.substr(start, pos_ - start));
    if (token.empty() || !text::is_bare_token(token)) {
      pos_ = start;
      fail("expected " + what);
    }
    return token;
  }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < line_.size()) {
      const char c = line_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        ++pos_;
        if (pos_ >= line_.size()) fail("dangling escape");
        switch (line_[pos_]) {
          case '\\': out.push_back('\\'); break;
          case '"': out.push_back('"'); break;
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          default: fail("unknown escape");
        }
        ++pos_;
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
    fail("unterminated quote");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no_, pos_ + 1, msg);
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Triple> parse_triples(std::string_view input) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    const std::size_t end = input.find('\n', start);
    std::string_view line = (end == std::string_view::npos)
                                ? input.substr(start)
                                : input.substr(start, end - start);
    ++line_no;
    Triple t;
    if (TripleLineParser(line, line_no).parse(t)) {
      out.push_back(std::move(t));
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<Triple> load_triples_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open triples file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_triples(buf.str());
}

void save_triples_file(const std::vector<Triple>& triples,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write triples file: " + path);
  out << serialize_triples(triples);
}

}  // namespace ctxg::repr

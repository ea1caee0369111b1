#ifndef CTXG_CONTEXT_HPP
#define CTXG_CONTEXT_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctxg/ontology.hpp"

namespace ctxg::repr {

// A predicate value: a quoted literal or a bare reference to a concept.
struct ContextValue {
  enum class Kind { literal, concept_ref };

  static ContextValue literal(std::string s);       // non-empty after trim
  static ContextValue concept_ref(std::string name);

  Kind kind = Kind::literal;
  std::string text;

  auto operator<=>(const ContextValue&) const = default;
};

// One context element: an id, a family, and a predicate/value set.
struct ContextElement {
  std::string id;
  onto::ContextKind kind = onto::ContextKind::cultural;
  std::map<std::string, ContextValue> predicates;

  bool operator==(const ContextElement&) const = default;
};

struct Triple {
  std::string subject;
  std::string predicate;
  ContextValue object;

  auto operator<=>(const Triple&) const = default;
};

inline constexpr std::string_view kTypePredicate = "rdf:type";

struct ValidationReport {
  std::string element_id;
  bool satisfied = false;
  std::vector<std::string> missing_roles;
  std::vector<std::string> unknown_predicates;
};

// Dataset attribute names differ from ontology role names; the registry maps
// the former onto the latter and whitelists the attribute names that have no
// ontology counterpart.
const std::map<std::string, std::string>& attribute_aliases();
const std::set<std::string>& registered_attributes();
bool is_registered_attribute(const std::string& name);
// alias target if aliased, otherwise the name itself
const std::string& resolve_attribute(const std::string& name);

// Checks e against target's definition in o: every required role must be
// present (directly or through an alias) and every predicate name must be
// known. Throws UnknownConceptError when target is undeclared.
ValidationReport validate_context(const ContextElement& e,
                                  const onto::Ontology& o,
                                  const std::string& target);

// One typing triple (id, rdf:type, top concept of kind) followed by one
// triple per predicate in predicate-name order.
std::vector<Triple> to_triples(const ContextElement& e);

// Inverse of to_triples over concatenated elements; subjects keep first-seen
// order. Throws MissingTypeError / DuplicatePredicateError.
std::vector<ContextElement> from_triples(const std::vector<Triple>& triples);

// `<subject> <predicate> <object> .` per line; literals quoted with
// backslash escapes, concept refs bare.
std::string serialize_triples(const std::vector<Triple>& triples);

// Inverse of serialize_triples; tolerates extra whitespace, blank lines and
// `#` comments. Throws ParseError with line and column.
std::vector<Triple> parse_triples(std::string_view text);

std::vector<Triple> load_triples_file(const std::string& path);
void save_triples_file(const std::vector<Triple>& triples,
                       const std::string& path);

}  // namespace ctxg::repr

#endif  // CTXG_CONTEXT_HPP

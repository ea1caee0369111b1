#ifndef CTXG_ONTOLOGY_HPP
#define CTXG_ONTOLOGY_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ctxg::onto {

// The three built-in context families. Each owns one top-level concept that
// context elements are typed with.
enum class ContextKind { situational, cultural, ethical };

std::string_view to_string(ContextKind kind);
ContextKind parse_context_kind(std::string_view name);  // ConfigError
std::string_view top_concept(ContextKind kind);         // Situation/Culture/EthicalContext

// Concept expression: an atomic concept, a flattened conjunction, or a
// single-level existential restriction with an atomic filler.
class ConceptExpr {
 public:
  enum class Kind { atomic, conjunction, exists };

  static ConceptExpr atomic(std::string name);
  static ConceptExpr exists(std::string role, std::string filler);
  // Flattens nested conjunctions, drops duplicate conjuncts (first occurrence
  // wins), and collapses singletons.
  static ConceptExpr conjunction(std::vector<ConceptExpr> parts);

  Kind kind() const { return kind_; }
  const std::string& concept_name() const { return name_; }   // atomic
  const std::string& role() const { return name_; }           // exists
  const std::string& filler() const { return filler_; }       // exists
  const std::vector<ConceptExpr>& parts() const { return parts_; }

  // Functional syntax: `C`, `Some(r C)`, `And(e1 e2 ...)`.
  std::string to_text() const;

  bool operator==(const ConceptExpr& other) const;

 private:
  ConceptExpr() = default;

  Kind kind_ = Kind::atomic;
  std::string name_;    // concept (atomic) or role (exists)
  std::string filler_;  // exists only
  std::vector<ConceptExpr> parts_;
};

struct Subsumption {
  std::string sub;
  std::string sup;
  bool operator==(const Subsumption&) const = default;
};

struct Equivalence {
  std::string lhs;
  ConceptExpr rhs;
  bool operator==(const Equivalence&) const = default;
};

using Axiom = std::variant<Subsumption, Equivalence>;

// `SubClassOf(A B)` / `EquivalentTo(A expr)`.
std::string to_text(const Axiom& axiom);
bool axioms_equal(const Axiom& a, const Axiom& b);

// Immutable concept/role/axiom set with precomputed told edges. Axioms are
// kept in canonical order (sorted by their text form) so equal ontologies
// serialize identically and merge is idempotent.
class Ontology {
 public:
  class Builder;

  const std::set<std::string>& concepts() const { return concepts_; }
  const std::set<std::string>& roles() const { return roles_; }
  const std::vector<Axiom>& axioms() const { return axioms_; }

  bool has_concept(const std::string& name) const;
  bool has_role(const std::string& name) const;

  // The unique Equivalence axiom for `concept`, or nullptr.
  const Equivalence* definition(const std::string& name) const;

  // True iff sup is reachable from sub in the reflexive-transitive closure of
  // the told edges (Subsumption edges plus one edge per atomic conjunct of an
  // Equivalence). Throws UnknownConceptError for undeclared names.
  bool is_subsumed(const std::string& sub, const std::string& sup) const;

  // All (A, B), A != B, with is_subsumed(A, B); sorted lexically.
  std::vector<std::pair<std::string, std::string>> classify() const;

  // (role, filler) pairs of the Exists conjuncts of `concept`'s definition,
  // in declaration order; empty when there is no definition.
  std::vector<std::pair<std::string, std::string>> required_roles(
      const std::string& name) const;

  bool operator==(const Ontology& other) const;

 private:
  friend class Builder;
  Ontology() = default;

  std::set<std::string> concepts_;
  std::set<std::string> roles_;
  std::vector<Axiom> axioms_;
  // told subsumption edges, including equivalence-derived ones
  std::map<std::string, std::vector<std::string>> edges_;
  std::map<std::string, std::size_t> definition_index_;
};

class Ontology::Builder {
 public:
  Builder& declare_concept(std::string name);
  Builder& declare_role(std::string name);
  Builder& subclass(std::string sub, std::string sup);
  Builder& equivalent(std::string lhs, ConceptExpr rhs);

  // Validates identifiers, declaredness of every referenced name, the
  // one-definition rule, and acyclicity of the subsumption graph.
  // Throws ConflictError / UnknownConceptError / ConfigError.
  Ontology build() &&;

 private:
  std::set<std::string> concepts_;
  std::set<std::string> roles_;
  std::vector<Axiom> axioms_;
};

// The built-in situational / cultural / ethical ontologies.
Ontology builtin_ontology(ContextKind kind);

// Union of two ontologies; all three built-ins merged.
// Throws ConflictError when the same concept carries different definitions.
Ontology merge(const Ontology& a, const Ontology& b);
Ontology merged_builtin_ontology();

}  // namespace ctxg::onto

#endif  // CTXG_ONTOLOGY_HPP

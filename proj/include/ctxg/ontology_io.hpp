#ifndef CTXG_ONTOLOGY_IO_HPP
#define CTXG_ONTOLOGY_IO_HPP

#include <string>
#include <string_view>

#include "ctxg/ontology.hpp"

namespace ctxg::onto {

// Canonical line-oriented functional syntax:
//   Concept(Situation)
//   Role(hasLocation)
//   EquivalentTo(Situation And(Some(hasLocation Location) ...))
//   SubClassOf(Situation Context)
// Concepts first (sorted), then roles (sorted), then axioms in canonical
// order. parse(serialize(o)) == o byte-for-byte after re-serialization.
std::string serialize_ontology(const Ontology& o);

// `#` starts a comment; names must be declared before use.
// Throws ParseError with line/column on malformed input or undeclared names.
Ontology parse_ontology(std::string_view text);

Ontology load_ontology_file(const std::string& path);
void save_ontology_file(const Ontology& o, const std::string& path);

}  // namespace ctxg::onto

#endif  // CTXG_ONTOLOGY_IO_HPP

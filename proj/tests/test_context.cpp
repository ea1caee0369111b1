#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctxg/context.hpp"
#include "ctxg/errors.hpp"
#include "support/oracles.hpp"

using namespace ctxg;
using onto::ContextKind;
using repr::ContextElement;
using repr::ContextValue;
using repr::Triple;

namespace {

// The literal predicate/value set from the worked cultural-context example.
ContextElement example_element() {
  ContextElement e;
  e.id = "ctx1";
  e.kind = ContextKind::cultural;
  e.predicates.emplace("location", ContextValue::literal("US"));
  e.predicates.emplace("religion", ContextValue::literal("Christian"));
  e.predicates.emplace("age_group", ContextValue::literal("Youth"));
  return e;
}

}  // namespace

TEST_CASE("attribute aliases route dataset names onto ontology roles") {
  CHECK(repr::resolve_attribute("location") == "hasLocation");
  CHECK(repr::resolve_attribute("religion") == "hasReligion");
  CHECK(repr::resolve_attribute("ethnicity") == "hasEthnicGroup");
  CHECK(repr::resolve_attribute("age_group") == "age_group");
  CHECK(repr::is_registered_attribute("age_group"));
  CHECK(repr::is_registered_attribute("location"));
  CHECK_FALSE(repr::is_registered_attribute("shoe_size"));
}

TEST_CASE("validate_context accepts a complete situation") {
  const auto o = onto::builtin_ontology(ContextKind::situational);
  ContextElement e;
  e.id = "s1";
  e.kind = ContextKind::situational;
  e.predicates.emplace("hasLocation", ContextValue::literal("US"));
  e.predicates.emplace("hasTime",
                       ContextValue::literal("2023-10-03T00:00Z"));
  e.predicates.emplace("hasActivity", ContextValue::literal("Reading"));
  const auto report = repr::validate_context(e, o, "Situation");
  CHECK(report.satisfied);
  CHECK(report.missing_roles.empty());
  CHECK(report.unknown_predicates.empty());
}

TEST_CASE("validate_context lists missing roles in definition order") {
  const auto o = onto::builtin_ontology(ContextKind::situational);
  ContextElement e;
  e.id = "s2";
  e.kind = ContextKind::situational;
  e.predicates.emplace("hasLocation", ContextValue::literal("US"));
  const auto report = repr::validate_context(e, o, "Situation");
  CHECK_FALSE(report.satisfied);
  REQUIRE(report.missing_roles.size() == 2);
  CHECK(report.missing_roles[0] == "hasTime");
  CHECK(report.missing_roles[1] == "hasActivity");
}

TEST_CASE("validate_context: undefined target has no requirements") {
  const auto o = onto::builtin_ontology(ContextKind::situational);
  ContextElement e;
  e.id = "s3";
  e.kind = ContextKind::situational;
  const auto report = repr::validate_context(e, o, "Location");
  CHECK(report.satisfied);
  CHECK_THROWS_AS(repr::validate_context(e, o, "Banana"),
                  UnknownConceptError);
}

TEST_CASE("validate_context flags unknown predicates") {
  const auto o = onto::builtin_ontology(ContextKind::cultural);
  ContextElement e = example_element();
  e.predicates.emplace("shoe_size", ContextValue::literal("42"));
  const auto report = repr::validate_context(e, o, "Culture");
  CHECK_FALSE(report.satisfied);
  REQUIRE(report.unknown_predicates.size() == 1);
  CHECK(report.unknown_predicates[0] == "shoe_size");
}

TEST_CASE("the example element resolves fully through the alias registry") {
  const auto o = onto::builtin_ontology(ContextKind::cultural);
  const auto report =
      repr::validate_context(example_element(), o, "Culture");
  CHECK(report.unknown_predicates.empty());
  // religion covers hasReligion; the other three Culture roles are absent
  REQUIRE(report.missing_roles.size() == 3);
  CHECK(report.missing_roles[0] == "hasRegion");
  CHECK(report.missing_roles[1] == "hasEthnicGroup");
  CHECK(report.missing_roles[2] == "hasValue");
  // against the undefined top concept the element is satisfied outright
  CHECK(repr::validate_context(example_element(), o, "Context").satisfied);
}

TEST_CASE("to_triples emits the typing triple first, then sorted predicates") {
  const auto triples = repr::to_triples(example_element());
  REQUIRE(triples.size() == 4);
  CHECK(triples[0] ==
        Triple{"ctx1", "rdf:type", ContextValue::concept_ref("Culture")});
  CHECK(triples[1] ==
        Triple{"ctx1", "age_group", ContextValue::literal("Youth")});
  CHECK(triples[2] ==
        Triple{"ctx1", "location", ContextValue::literal("US")});
  CHECK(triples[3] ==
        Triple{"ctx1", "religion", ContextValue::literal("Christian")});
}

TEST_CASE("to_triples of an empty element is just the typing triple") {
  ContextElement e;
  e.id = "bare";
  e.kind = ContextKind::ethical;
  const auto triples = repr::to_triples(e);
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].predicate == "rdf:type");
  CHECK(triples[0].object.text == "EthicalContext");
}

TEST_CASE("triple count is predicate count plus one") {
  rng::Rng r(11);
  for (int i = 0; i < 100; ++i) {
    const ContextElement e = oracles::random_element(r, i);
    CHECK(repr::to_triples(e).size() == e.predicates.size() + 1);
  }
}

TEST_CASE("to_triples output is deterministic") {
  rng::Rng r(12);
  for (int i = 0; i < 50; ++i) {
    const ContextElement e = oracles::random_element(r, i);
    CHECK(repr::serialize_triples(repr::to_triples(e)) ==
          repr::serialize_triples(repr::to_triples(e)));
  }
}

TEST_CASE("from_triples inverts to_triples") {
  const ContextElement e = example_element();
  const auto back = repr::from_triples(repr::to_triples(e));
  REQUIRE(back.size() == 1);
  CHECK(back[0] == e);

  CHECK(repr::from_triples({}).empty());

  rng::Rng r(13);
  for (int i = 0; i < 50; ++i) {
    const ContextElement x = oracles::random_element(r, i);
    const auto round = repr::from_triples(repr::to_triples(x));
    REQUIRE(round.size() == 1);
    CHECK(round[0] == x);
  }
}

TEST_CASE("from_triples handles concatenated subjects in first-seen order") {
  ContextElement a = example_element();
  ContextElement b;
  b.id = "ctx2";
  b.kind = ContextKind::situational;
  b.predicates.emplace("hasLocation", ContextValue::literal("Canada"));

  std::vector<Triple> all = repr::to_triples(a);
  const auto more = repr::to_triples(b);
  all.insert(all.end(), more.begin(), more.end());

  const auto back = repr::from_triples(all);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
}

TEST_CASE("from_triples rejects missing and duplicate structure") {
  // no rdf:type
  CHECK_THROWS_AS(
      repr::from_triples({{"x", "location", ContextValue::literal("US")}}),
      MissingTypeError);
  // two rdf:type triples
  CHECK_THROWS_AS(
      repr::from_triples(
          {{"x", "rdf:type", ContextValue::concept_ref("Culture")},
           {"x", "rdf:type", ContextValue::concept_ref("Situation")}}),
      DuplicatePredicateError);
  // repeated predicate
  CHECK_THROWS_AS(
      repr::from_triples(
          {{"x", "rdf:type", ContextValue::concept_ref("Culture")},
           {"x", "location", ContextValue::literal("US")},
           {"x", "location", ContextValue::literal("CA")}}),
      DuplicatePredicateError);
  // literal type object
  CHECK_THROWS_AS(
      repr::from_triples({{"x", "rdf:type", ContextValue::literal("Culture")}}),
      MissingTypeError);
}

TEST_CASE("serialize_triples formats one line per triple") {
  CHECK(repr::serialize_triples(
            {{"ctx1", "location", ContextValue::literal("US")}}) ==
        "ctx1 location \"US\" .\n");
  CHECK(repr::serialize_triples({}).empty());
}

TEST_CASE("parse_triples reads single triples and tolerates whitespace") {
  const auto ts = repr::parse_triples("ctx1  religion   \"Christian\" .");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].subject == "ctx1");
  CHECK(ts[0].predicate == "religion");
  CHECK(ts[0].object == ContextValue::literal("Christian"));

  CHECK(repr::parse_triples("").empty());
  CHECK(repr::parse_triples("# just a comment\n\n").empty());
}

TEST_CASE("parse_triples reports malformed lines with positions") {
  try {
    repr::parse_triples("ctx1 location");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(repr::parse_triples("ctx1 location \"US\""), ParseError);
  CHECK_THROWS_AS(repr::parse_triples("ctx1 location \"US ."), ParseError);
  CHECK_THROWS_AS(repr::parse_triples("ctx1 location \"US\" . extra"),
                  ParseError);
  try {
    repr::parse_triples("ctx1 religion \"ok\" .\nctx2 oops\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("triple serialization roundtrips byte-exactly") {
  rng::Rng r(313);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Triple> ts;
    const std::size_t count = r.below(6);
    for (std::size_t k = 0; k < count; ++k) {
      ts.push_back(oracles::random_triple(r));
    }
    const std::string text = repr::serialize_triples(ts);
    const auto parsed = repr::parse_triples(text);
    CHECK(parsed == ts);
    CHECK(repr::serialize_triples(parsed) == text);
  }
}

TEST_CASE("serialization distinguishes literals from concept refs") {
  const std::string lit = repr::serialize_triples(
      {{"s", "p", ContextValue::literal("Culture")}});
  const std::string ref = repr::serialize_triples(
      {{"s", "p", ContextValue::concept_ref("Culture")}});
  CHECK(lit != ref);
  CHECK(repr::parse_triples(lit)[0].object.kind ==
        ContextValue::Kind::literal);
  CHECK(repr::parse_triples(ref)[0].object.kind ==
        ContextValue::Kind::concept_ref);
}

TEST_CASE("serialization is injective over distinct triple lists") {
  rng::Rng r(515);
  std::vector<std::vector<Triple>> cases;
  std::set<std::string> texts;
  for (int i = 0; i < 300; ++i) {
    std::vector<Triple> ts;
    const std::size_t count = r.below(4);
    for (std::size_t k = 0; k < count; ++k) {
      ts.push_back(oracles::random_triple(r));
    }
    if (std::find(cases.begin(), cases.end(), ts) != cases.end()) continue;
    cases.push_back(ts);
    CHECK(texts.insert(repr::serialize_triples(ts)).second);
  }
}

TEST_CASE("escaped characters survive the roundtrip") {
  const ContextValue tricky =
      ContextValue::literal("line\nbreak \"quoted\" tab\t back\\slash");
  const std::vector<Triple> ts{{"s", "p", tricky}};
  CHECK(repr::parse_triples(repr::serialize_triples(ts)) == ts);
}

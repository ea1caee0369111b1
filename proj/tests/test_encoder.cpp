#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ctxg/encoder.hpp"
#include "ctxg/errors.hpp"
#include "ctxg/synthetic.hpp"
#include "ctxg/text.hpp"
#include "support/oracles.hpp"

using namespace ctxg;
using data::Corpus;
using data::Record;
using enc::ContextLabelVocab;
using enc::Encoder;
using enc::GroundedInput;
using enc::Vocabulary;

namespace {

Record basic_record(const std::string& sentence, const std::string& hyp,
                    int label, const std::string& type) {
  Record r;
  r.sentence = sentence;
  r.hypothesis = hyp;
  r.bias_label = label;
  r.bias_type = type;
  r.attributes = {{"gender", "unknown"},
                  {"race", "unknown"},
                  {"religion", "Christian"},
                  {"age", "Youth"}};
  return r;
}

Corpus tiny_corpus() {
  Corpus c;
  c.records.push_back(basic_record("he is lazy", "an implied stereotype", 1,
                                   "stereotyping"));
  c.records.push_back(
      basic_record("the sky is blue", "a neutral claim", 0, "none"));
  return c;
}

Encoder make_encoder(const Corpus& c, std::size_t max_len = 64,
                     std::size_t min_freq = 1) {
  std::vector<repr::ContextElement> contexts;
  for (const auto& rec : c.records) {
    contexts.push_back(enc::derive_context(rec));
  }
  return Encoder(Vocabulary::build(c, contexts, min_freq),
                 ContextLabelVocab::build(contexts),
                 data::BiasTypeRegistry::defaults(), max_len);
}

std::size_t count_of(const std::vector<int>& ids, int needle) {
  return static_cast<std::size_t>(
      std::count(ids.begin(), ids.end(), needle));
}

}  // namespace

TEST_CASE("vocabulary of an empty corpus is just the specials") {
  const Vocabulary v = Vocabulary::build(Corpus{}, {}, 1);
  CHECK(v.size() == 4);
  CHECK(v.has_specials());
  CHECK(v.id_of("<pad>") == enc::kPad);
  CHECK(v.id_of("<sep>") == enc::kSep);
  CHECK(v.id_of("anything") == enc::kUnk);
}

TEST_CASE("min_freq filters rare tokens") {
  Corpus c;
  c.records.push_back(basic_record("a a b", "x", 0, "none"));
  const Vocabulary v = Vocabulary::build(c, {}, 2);
  CHECK(v.id_of("a") != enc::kUnk);
  CHECK(v.id_of("b") == enc::kUnk);
}

TEST_CASE("context tokens bypass the frequency floor") {
  Corpus c;
  c.records.push_back(basic_record("common common", "words", 0, "none"));
  std::vector<repr::ContextElement> contexts{
      enc::derive_context(c.records[0])};
  const Vocabulary v = Vocabulary::build(c, contexts, 5);
  CHECK(v.id_of("common") == enc::kUnk);   // below floor
  CHECK(v.id_of("hasreligion") != enc::kUnk);  // from the context triples
  CHECK(v.id_of("christian") != enc::kUnk);
}

TEST_CASE("vocabulary id assignment is deterministic") {
  const Corpus c = data::make_synthetic_corpus(50, 3);
  std::vector<repr::ContextElement> contexts;
  for (const auto& rec : c.records) contexts.push_back(enc::derive_context(rec));
  const Vocabulary a = Vocabulary::build(c, contexts, 1);
  const Vocabulary b = Vocabulary::build(c, contexts, 1);
  std::ostringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("vocabulary save/load roundtrip") {
  const Corpus c = data::make_synthetic_corpus(30, 4);
  const Vocabulary v = Vocabulary::build(c, {}, 1);
  std::ostringstream out;
  v.save(out);
  std::istringstream in(out.str());
  const Vocabulary back = Vocabulary::load(in);
  CHECK(back.size() == v.size());
  std::ostringstream out2;
  back.save(out2);
  CHECK(out2.str() == out.str());

  std::istringstream bad("zzz\t0\n");
  CHECK_THROWS_AS(Vocabulary::load(bad), VocabError);
}

TEST_CASE("derive_context routes attributes through the alias registry") {
  const Record r = basic_record("s", "h", 0, "none");
  const repr::ContextElement e = enc::derive_context(r);
  CHECK(e.kind == onto::ContextKind::cultural);
  REQUIRE(e.predicates.size() == 2);
  CHECK(e.predicates.at("hasReligion") ==
        repr::ContextValue::literal("Christian"));
  CHECK(e.predicates.at("age") == repr::ContextValue::literal("Youth"));
}

TEST_CASE("derive_context: all-unknown attributes give an empty element") {
  Record r = basic_record("s", "h", 0, "none");
  r.attributes = {{"gender", "unknown"},
                  {"race", "unknown"},
                  {"religion", "unknown"},
                  {"age", "unknown"}};
  CHECK(enc::derive_context(r).predicates.empty());
}

TEST_CASE("derive_context ids are stable content hashes") {
  const Record a = basic_record("first", "h1", 0, "none");
  const Record b = basic_record("second", "h2", 1, "toxicity");
  CHECK(enc::derive_context(a).id == enc::derive_context(b).id);

  Record c = basic_record("third", "h3", 0, "none");
  c.attributes["religion"] = "other";
  CHECK(enc::derive_context(a).id != enc::derive_context(c).id);
}

TEST_CASE("encode lays out CTX, context triples, SEP, sentence, SEP, hyp") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c);
  const repr::ContextElement ctx = enc::derive_context(c.records[0]);
  const GroundedInput g = encoder.encode(c.records[0], ctx);

  REQUIRE(g.ids.size() == 64);
  CHECK(g.ids[0] == enc::kCtx);
  CHECK(count_of(g.ids, enc::kSep) == 2);
  CHECK(g.main_label == 1);
  CHECK(g.type_label ==
        static_cast<int>(data::BiasTypeRegistry::defaults().index_of(
            "stereotyping")));

  // the segment between CTX and the first SEP is the tokenized triple text
  const auto first_sep =
      std::find(g.ids.begin() + 1, g.ids.end(), enc::kSep);
  const std::vector<int> context_ids(g.ids.begin() + 1, first_sep);
  const auto expected_tokens =
      text::tokenize(repr::serialize_triples(repr::to_triples(ctx)));
  REQUIRE(context_ids.size() == expected_tokens.size());
  for (std::size_t i = 0; i < expected_tokens.size(); ++i) {
    CHECK(context_ids[i] == encoder.vocab().id_of(expected_tokens[i]));
  }
  // aux bits flag the element's predicates
  CHECK(std::count(g.aux_target.begin(), g.aux_target.end(), 1) == 2);
}

TEST_CASE("empty context element encodes with an empty context segment") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c);
  repr::ContextElement empty;
  empty.id = "ctxempty";
  empty.kind = onto::ContextKind::cultural;
  const GroundedInput g = encoder.encode(c.records[1], empty);
  CHECK(g.ids[0] == enc::kCtx);
  CHECK(g.ids[1] == enc::kSep);
  CHECK(std::count(g.aux_target.begin(), g.aux_target.end(), 1) == 0);
}

TEST_CASE("encode_ablation equals encoding with an empty context") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c);
  repr::ContextElement empty;
  empty.id = "ctxwhatever";
  empty.kind = onto::ContextKind::cultural;
  for (const auto& rec : c.records) {
    const GroundedInput ablation = encoder.encode_ablation(rec);
    const GroundedInput with_empty = encoder.encode(rec, empty);
    CHECK(ablation.ids == with_empty.ids);
    CHECK(count_of(ablation.ids, enc::kSep) == 2);
    CHECK(std::count(ablation.aux_target.begin(), ablation.aux_target.end(),
                     1) == 0);
    CHECK(encoder.encode_ablation(rec) == ablation);
  }
}

TEST_CASE("encoding is total: fixed length, two separators, context intact") {
  rng::Rng r(77);
  const Corpus base = data::make_synthetic_corpus(40, 8);
  const Encoder encoder = make_encoder(base, 64);
  const std::vector<std::string> words{"alpha", "beta",  "gamma", "delta",
                                       "epsilon", "zeta", "eta",   "theta"};
  for (int i = 0; i < 500; ++i) {
    Record rec = base.records[r.below(base.records.size())];
    // random-length bodies, some far beyond max_len
    std::string sentence;
    const std::size_t sn = 1 + r.below(60);
    for (std::size_t k = 0; k < sn; ++k) sentence += words[r.below(8)] + " ";
    std::string hyp;
    const std::size_t hn = 1 + r.below(60);
    for (std::size_t k = 0; k < hn; ++k) hyp += words[r.below(8)] + " ";
    rec.sentence = sentence;
    rec.hypothesis = hyp;

    const repr::ContextElement ctx = enc::derive_context(rec);
    const GroundedInput g = encoder.encode(rec, ctx);
    REQUIRE(g.ids.size() == 64);
    CHECK(g.ids[0] == enc::kCtx);
    CHECK(count_of(g.ids, enc::kSep) == 2);

    // context segment survives truncation verbatim
    const auto expected =
        text::tokenize(repr::serialize_triples(repr::to_triples(ctx)));
    const auto first_sep = std::find(g.ids.begin() + 1, g.ids.end(), enc::kSep);
    CHECK(static_cast<std::size_t>(first_sep - g.ids.begin() - 1) ==
          expected.size());

    // PAD only as a suffix
    auto first_pad = std::find(g.ids.begin(), g.ids.end(), enc::kPad);
    for (auto it = first_pad; it != g.ids.end(); ++it) {
      CHECK(*it == enc::kPad);
    }
  }
}

TEST_CASE("truncation drops the hypothesis tail before the sentence tail") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c, 16);
  Record rec = c.records[1];
  rec.sentence = "one two three four five six seven eight nine ten";
  rec.hypothesis = "alpha beta gamma delta";
  const GroundedInput g = encoder.encode_ablation(rec);
  // layout: CTX SEP s1..s10 SEP h1..h3 -> sentence whole, hypothesis cut
  REQUIRE(g.ids.size() == 16);
  CHECK(g.ids[0] == enc::kCtx);
  CHECK(g.ids[1] == enc::kSep);
  CHECK(g.ids[12] == enc::kSep);
  CHECK(g.ids[13] == encoder.vocab().id_of("alpha"));
  CHECK(g.ids[15] == encoder.vocab().id_of("gamma"));
  CHECK(count_of(g.ids, enc::kPad) == 0);
}

TEST_CASE("a context that cannot fit raises RangeError") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c, 16);
  const repr::ContextElement ctx = enc::derive_context(c.records[0]);
  // the serialized triples of this context exceed 13 tokens
  CHECK_THROWS_AS(encoder.encode(c.records[0], ctx), RangeError);
}

TEST_CASE("encoder construction validates inputs") {
  const Corpus c = tiny_corpus();
  std::vector<repr::ContextElement> contexts;
  for (const auto& rec : c.records) contexts.push_back(enc::derive_context(rec));
  const Vocabulary v = Vocabulary::build(c, contexts, 1);
  const ContextLabelVocab labels = ContextLabelVocab::build(contexts);
  CHECK_THROWS_AS(
      Encoder(v, labels, data::BiasTypeRegistry::defaults(), 8), RangeError);
  CHECK_THROWS_AS(
      Encoder(Vocabulary{}, labels, data::BiasTypeRegistry::defaults(), 64),
      VocabError);
}

TEST_CASE("aux target popcount equals predicates present in the label vocab") {
  const Corpus c = data::make_synthetic_corpus(60, 12);
  const Encoder encoder = make_encoder(c);
  for (const auto& rec : c.records) {
    const repr::ContextElement ctx = enc::derive_context(rec);
    const GroundedInput g = encoder.encode(rec, ctx);
    std::size_t expected = 0;
    for (const auto& [pred, value] : ctx.predicates) {
      if (encoder.labels().index_of(pred, value.text).has_value()) ++expected;
    }
    CHECK(static_cast<std::size_t>(std::count(g.aux_target.begin(),
                                              g.aux_target.end(), 1)) ==
          expected);
    if (!ctx.predicates.empty()) {
      CHECK(expected > 0);  // train-set contexts are all in the vocab
    }
  }
}

TEST_CASE("context label vocab is sorted and stable") {
  const Corpus c = data::make_synthetic_corpus(80, 2);
  std::vector<repr::ContextElement> contexts;
  for (const auto& rec : c.records) contexts.push_back(enc::derive_context(rec));
  const ContextLabelVocab a = ContextLabelVocab::build(contexts);
  const ContextLabelVocab b = ContextLabelVocab::build(contexts);
  CHECK(a.entries() == b.entries());
  CHECK(std::is_sorted(a.entries().begin(), a.entries().end()));

  std::ostringstream out;
  a.save(out);
  std::istringstream in(out.str());
  CHECK(ContextLabelVocab::load(in).entries() == a.entries());
}

TEST_CASE("encoded batch dump is line-oriented integer CSV") {
  const Corpus c = tiny_corpus();
  const Encoder encoder = make_encoder(c, 16 + 32);
  const auto batch = encoder.encode_corpus_serial(c, true);
  std::ostringstream out;
  enc::write_encoded_csv(out, batch);
  const auto lines = text::split(text::trim(out.str()), '\n');
  CHECK(lines.size() == batch.size());
  for (const auto& line : lines) {
    CHECK(line.find_first_not_of("0123456789,-") == std::string::npos);
  }
}

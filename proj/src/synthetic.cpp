#include "ctxg/synthetic.hpp"

#include <array>
#include <string>
#include <vector>

#include "ctxg/rng.hpp"

namespace ctxg::data {

namespace {

const std::vector<std::string> kFiller{
    "report",  "meeting", "garden",  "window",  "coffee", "street",
    "morning", "project", "letter",  "market",  "river",  "summer",
    "music",   "dinner",  "journey", "library", "season", "harbor",
    "teacher", "bridge",  "story",   "castle",  "forest", "village"};

const std::vector<std::string> kVerbs{"describes", "mentions", "covers",
                                      "follows",   "shows",    "repeats"};

std::string make_sentence(rng::Rng& r, std::size_t words) {
  std::string out = "the " + r.pick(kFiller) + " " + r.pick(kVerbs);
  for (std::size_t i = 0; i < words; ++i) {
    out += " " + r.pick(kFiller);
  }
  return out;
}

}  // namespace

Corpus make_synthetic_corpus(std::size_t n, std::uint64_t seed) {
  const std::array<std::string, 2> genders{"female", "male"};
  const std::array<std::string, 2> races{"groupx", "groupy"};
  const std::array<std::string, 2> religions{"alpha", "beta"};
  const std::array<std::string, 2> ages{"adult", "youth"};

  rng::Rng r(rng::mix(seed, 0x73796e74ULL));
  Corpus corpus;
  corpus.source = "synthetic:" + std::to_string(n) + ":" +
                  std::to_string(seed);
  corpus.source_rows = n;
  corpus.records.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    Record rec;
    rec.attributes["gender"] = genders[r.below(2)];
    rec.attributes["race"] = races[r.below(2)];
    rec.attributes["religion"] = religions[r.below(2)];
    rec.attributes["age"] = ages[r.below(2)];

    // planted rule: religion alone decides the label, race decides the type
    const bool biased = rec.attributes["religion"] == "alpha";
    rec.bias_label = biased ? 1 : 0;
    if (biased) {
      rec.bias_type =
          rec.attributes["race"] == "groupx" ? "toxicity" : "stereotyping";
    } else {
      rec.bias_type = std::string(kNoBiasType);
    }

    rec.sentence = make_sentence(r, 3 + r.below(4));
    rec.hypothesis = make_sentence(r, 2 + r.below(3));
    // a unique anchor keeps duplicate collapsing away from the class balance
    rec.sentence += " item" + std::to_string(i);
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

}  // namespace ctxg::data

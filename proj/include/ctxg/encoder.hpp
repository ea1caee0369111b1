#ifndef CTXG_ENCODER_HPP
#define CTXG_ENCODER_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxg/context.hpp"
#include "ctxg/corpus.hpp"

namespace ctxg::enc {

inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kCtx = 2;
inline constexpr int kSep = 3;

// Token table with fixed specials at ids 0..3 and dense content ids above.
// Content ids are assigned by descending frequency, ties broken lexically.
class Vocabulary {
 public:
  Vocabulary() = default;  // empty, lacks specials; build() or load() instead

  static Vocabulary build(const data::Corpus& corpus,
                          const std::vector<repr::ContextElement>& contexts,
                          std::size_t min_freq);

  bool has_specials() const { return token_to_id_.size() >= 4; }
  std::size_t size() const { return id_to_token_.size(); }
  int id_of(const std::string& token) const;  // kUnk when absent
  const std::string& token_of(int id) const;  // RangeError

  void save(std::ostream& out) const;  // token<TAB>id, specials first
  void save_file(const std::string& path) const;
  static Vocabulary load(std::istream& in);  // VocabError on bad specials
  static Vocabulary load_file(const std::string& path);

 private:
  std::map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// The auxiliary-task label space: every distinct (predicate, value) pair in
// the context set, sorted lexically so indices are stable across runs.
class ContextLabelVocab {
 public:
  ContextLabelVocab() = default;

  static ContextLabelVocab build(
      const std::vector<repr::ContextElement>& contexts);

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::optional<std::size_t> index_of(const std::string& predicate,
                                      const std::string& value) const;

  void save(std::ostream& out) const;  // predicate<TAB>value
  void save_file(const std::string& path) const;
  static ContextLabelVocab load(std::istream& in);
  static ContextLabelVocab load_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // sorted
};

// One encoded training example. ids is exactly max_len long:
// [CTX] context-tokens [SEP] sentence [SEP] hypothesis [PAD]...
struct GroundedInput {
  std::vector<int> ids;
  std::vector<std::uint8_t> aux_target;
  int main_label = 0;
  int type_label = 0;

  bool operator==(const GroundedInput&) const = default;
};

// Maps a record's non-"unknown" sensitive attributes through the attribute
// alias registry into a cultural context element with a content-derived id.
repr::ContextElement derive_context(const data::Record& record);

class Encoder {
 public:
  // max_len must be >= 16 (RangeError); vocabulary must carry the specials
  // (VocabError).
  Encoder(Vocabulary vocab, ContextLabelVocab labels,
          data::BiasTypeRegistry registry, std::size_t max_len);

  const Vocabulary& vocab() const { return vocab_; }
  const ContextLabelVocab& labels() const { return labels_; }
  const data::BiasTypeRegistry& registry() const { return registry_; }
  std::size_t max_len() const { return max_len_; }

  // Grounded encoding: context triples prepended, truncation eats the
  // hypothesis tail first, then the sentence tail, never the context.
  GroundedInput encode(const data::Record& record,
                       const repr::ContextElement& context) const;

  // Non-contextual baseline: empty context segment, all-zero aux target.
  GroundedInput encode_ablation(const data::Record& record) const;

  // Whole-corpus encoding; contexts derived per record when grounded.
  // The parallel version partitions records across threads and writes
  // order-preserving output; it is bit-identical to the serial one.
  std::vector<GroundedInput> encode_corpus_serial(const data::Corpus& corpus,
                                                  bool grounded) const;
  std::vector<GroundedInput> encode_corpus(const data::Corpus& corpus,
                                           bool grounded, int threads) const;

 private:
  Vocabulary vocab_;
  ContextLabelVocab labels_;
  data::BiasTypeRegistry registry_;
  std::size_t max_len_;
};

// Debug dump: one CSV line per input: main,type,ids...,aux bits.
void write_encoded_csv(std::ostream& out,
                       const std::vector<GroundedInput>& batch);

}  // namespace ctxg::enc

#endif  // CTXG_ENCODER_HPP

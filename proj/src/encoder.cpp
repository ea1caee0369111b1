#include "ctxg/encoder.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ctxg/errors.hpp"
#include "ctxg/parallel.hpp"
#include "ctxg/rng.hpp"
#include "ctxg/text.hpp"

namespace ctxg::enc {

namespace {

const std::array<std::string, 4> kSpecialTokens{"<pad>", "<unk>", "<ctx>",
                                                "<sep>"};

}  // namespace

Vocabulary Vocabulary::build(const data::Corpus& corpus,
                             const std::vector<repr::ContextElement>& contexts,
                             std::size_t min_freq) {
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");

  std::map<std::string, std::size_t> freq;
  for (const auto& rec : corpus.records) {
    for (const auto& tok : text::tokenize(rec.sentence)) ++freq[tok];
    for (const auto& tok : text::tokenize(rec.hypothesis)) ++freq[tok];
  }
  std::set<std::string> context_tokens;
  for (const auto& e : contexts) {
    const std::string serialized = repr::serialize_triples(repr::to_triples(e));
    for (const auto& tok : text::tokenize(serialized)) {
      ++freq[tok];
      context_tokens.insert(tok);
    }
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, count] : freq) {
    if (count >= min_freq || context_tokens.count(tok) > 0) {
      kept.emplace_back(tok, count);
    }
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });

  Vocabulary v;
  for (const auto& s : kSpecialTokens) {
    v.token_to_id_.emplace(s, static_cast<int>(v.id_to_token_.size()));
    v.id_to_token_.push_back(s);
  }
  for (const auto& [tok, count] : kept) {
    (void)count;
    if (v.token_to_id_.count(tok) > 0) continue;
    v.token_to_id_.emplace(tok, static_cast<int>(v.id_to_token_.size()));
    v.id_to_token_.push_back(tok);
  }
  return v;
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw RangeError("token id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    out << id_to_token_[i] << '\t' << i << '\n';
  }
}

void Vocabulary::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary: " + path);
  save(out);
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw VocabError("vocabulary line " + std::to_string(line_no) +
                       ": missing tab");
    }
    const std::string token = line.substr(0, tab);
    const long long id = text::parse_int(line.substr(tab + 1), "token id");
    if (id != static_cast<long long>(v.id_to_token_.size())) {
      throw VocabError("vocabulary line " + std::to_string(line_no) +
                       ": ids must be dense and ascending");
    }
    v.token_to_id_.emplace(token, static_cast<int>(id));
    v.id_to_token_.push_back(token);
  }
  for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
    if (v.id_to_token_.size() <= i || v.id_to_token_[i] != kSpecialTokens[i]) {
      throw VocabError("vocabulary lacks special tokens");
    }
  }
  return v;
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary: " + path);
  return load(in);
}

ContextLabelVocab ContextLabelVocab::build(
    const std::vector<repr::ContextElement>& contexts) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : contexts) {
    for (const auto& [pred, value] : e.predicates) {
      seen.emplace(pred, value.text);
    }
  }
  ContextLabelVocab v;
  v.entries_.assign(seen.begin(), seen.end());
  return v;
}

std::optional<std::size_t> ContextLabelVocab::index_of(
    const std::string& predicate, const std::string& value) const {
  const auto key = std::make_pair(predicate, value);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key);
  if (it == entries_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - entries_.begin());
}

void ContextLabelVocab::save(std::ostream& out) const {
  for (const auto& [pred, value] : entries_) {
    out << pred << '\t' << value << '\n';
  }
}

void ContextLabelVocab::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write context labels: " + path);
  save(out);
}

ContextLabelVocab ContextLabelVocab::load(std::istream& in) {
  ContextLabelVocab v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw VocabError("context label line " + std::to_string(line_no) +
                       ": missing tab");
    }
    v.entries_.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (!std::is_sorted(v.entries_.begin(), v.entries_.end())) {
    throw VocabError("context label file must be sorted");
  }
  return v;
}

ContextLabelVocab ContextLabelVocab::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open context labels: " + path);
  return load(in);
}

repr::ContextElement derive_context(const data::Record& record) {
  repr::ContextElement e;
  e.kind = onto::ContextKind::cultural;
  for (const auto& [attr, value] : record.attributes) {
    const std::string trimmed = text::trim(value);
    if (trimmed.empty() || trimmed == "unknown") continue;
    e.predicates.emplace(repr::resolve_attribute(attr),
                         repr::ContextValue::literal(trimmed));
  }
  std::string canon;
  for (const auto& [pred, value] : e.predicates) {
    canon += pred;
    canon.push_back('=');
    canon += value.text;
    canon.push_back(';');
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a(canon)));
  e.id = std::string("ctx") + hex;
  return e;
}

Encoder::Encoder(Vocabulary vocab, ContextLabelVocab labels,
                 data::BiasTypeRegistry registry, std::size_t max_len)
    : vocab_(std::move(vocab)),
      labels_(std::move(labels)),
      registry_(std::move(registry)),
      max_len_(max_len) {
  if (max_len_ < 16) {
    throw RangeError("max_len must be >= 16, got " + std::to_string(max_len_));
  }
  if (!vocab_.has_specials()) {
    throw VocabError("vocabulary lacks special tokens");
  }
}

GroundedInput Encoder::encode(const data::Record& record,
                              const repr::ContextElement& context) const {
  if (!record.bias_label.has_value()) {
    throw ConfigError("cannot encode an unlabeled record (preprocess first)");
  }

  // An element with no predicates counts as "no context": its typing triple
  // alone carries no grounding signal, and the ablation encoding must equal
  // encoding with an empty element.
  std::vector<std::string> context_tokens;
  if (!context.predicates.empty()) {
    context_tokens =
        text::tokenize(repr::serialize_triples(repr::to_triples(context)));
  }
  const std::vector<std::string> sentence_tokens =
      text::tokenize(record.sentence);
  const std::vector<std::string> hypothesis_tokens =
      text::tokenize(record.hypothesis);

  const std::size_t fixed = 3 + context_tokens.size();  // CTX + 2x SEP + ctx
  if (fixed > max_len_) {
    throw RangeError("context segment (" +
                     std::to_string(context_tokens.size()) +
                     " tokens) does not fit in max_len " +
                     std::to_string(max_len_));
  }
  const std::size_t budget = max_len_ - fixed;
  const std::size_t keep_sent = std::min(sentence_tokens.size(), budget);
  const std::size_t keep_hyp =
      std::min(hypothesis_tokens.size(), budget - keep_sent);

  GroundedInput out;
  out.ids.reserve(max_len_);
  out.ids.push_back(kCtx);
  for (const auto& tok : context_tokens) out.ids.push_back(vocab_.id_of(tok));
  out.ids.push_back(kSep);
  for (std::size_t i = 0; i < keep_sent; ++i) {
    out.ids.push_back(vocab_.id_of(sentence_tokens[i]));
  }
  out.ids.push_back(kSep);
  for (std::size_t i = 0; i < keep_hyp; ++i) {
    out.ids.push_back(vocab_.id_of(hypothesis_tokens[i]));
  }
  out.ids.resize(max_len_, kPad);

  out.aux_target.assign(labels_.size(), 0);
  for (const auto& [pred, value] : context.predicates) {
    if (auto idx = labels_.index_of(pred, value.text)) {
      out.aux_target[*idx] = 1;
    }
  }
  out.main_label = *record.bias_label;
  out.type_label = static_cast<int>(registry_.index_of(record.bias_type));
  return out;
}

GroundedInput Encoder::encode_ablation(const data::Record& record) const {
  repr::ContextElement empty;
  empty.kind = onto::ContextKind::cultural;
  empty.id = "ctxnone";
  return encode(record, empty);
}

std::vector<GroundedInput> Encoder::encode_corpus_serial(
    const data::Corpus& corpus, bool grounded) const {
  std::vector<GroundedInput> out(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    out[i] = grounded
                 ? encode(corpus.records[i], derive_context(corpus.records[i]))
                 : encode_ablation(corpus.records[i]);
  }
  return out;
}

std::vector<GroundedInput> Encoder::encode_corpus(const data::Corpus& corpus,
                                                  bool grounded,
                                                  int threads) const {
  std::vector<GroundedInput> out(corpus.records.size());
  par::for_each_index(corpus.records.size(), threads, [&](std::size_t i) {
    out[i] = grounded
                 ? encode(corpus.records[i], derive_context(corpus.records[i]))
                 : encode_ablation(corpus.records[i]);
  });
  return out;
}

void write_encoded_csv(std::ostream& out,
                       const std::vector<GroundedInput>& batch) {
  for (const auto& item : batch) {
    out << item.main_label << ',' << item.type_label;
    for (int id : item.ids) out << ',' << id;
    for (auto bit : item.aux_target) out << ',' << static_cast<int>(bit);
    out << '\n';
  }
}

}  // namespace ctxg::enc

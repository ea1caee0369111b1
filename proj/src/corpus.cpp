#include "ctxg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctxg/csv.hpp"
#include "ctxg/errors.hpp"
#include "ctxg/rng.hpp"
#include "ctxg/text.hpp"

namespace ctxg::data {

BiasTypeRegistry::BiasTypeRegistry()
    : BiasTypeRegistry(std::vector<std::string>{}) {}

BiasTypeRegistry::BiasTypeRegistry(const std::vector<std::string>& extras) {
  std::set<std::string> names{"toxicity", "stereotyping", "offensive_language",
                              std::string(kNoBiasType)};
  for (const auto& e : extras) {
    if (!text::is_identifier(e)) {
      throw ConfigError("invalid bias type name: '" + e + "'");
    }
    names.insert(e);
  }
  names_.assign(names.begin(), names.end());
}

const BiasTypeRegistry& BiasTypeRegistry::defaults() {
  static const BiasTypeRegistry r;
  return r;
}

bool BiasTypeRegistry::contains(const std::string& name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

std::size_t BiasTypeRegistry::index_of(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) {
    throw RangeError("unknown bias type: '" + name + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

void SplitSpec::validate() const {
  for (double f : {train, val, test}) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError("split fractions must lie in (0,1)");
    }
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitSpec SplitSpec::parse(std::string_view fractions, std::uint64_t seed) {
  auto parts = text::split(fractions, ',');
  if (parts.size() != 3) {
    throw ConfigError("expected three comma-separated split fractions");
  }
  SplitSpec spec;
  spec.train = text::parse_double(parts[0], "train fraction");
  spec.val = text::parse_double(parts[1], "val fraction");
  spec.test = text::parse_double(parts[2], "test fraction");
  spec.seed = seed;
  spec.validate();
  return spec;
}

namespace {

const std::array<std::string, 8> kRequiredColumns{
    "sentence", "hypothesis", "bias_label", "bias_type",
    "gender",   "race",       "religion",   "age"};

}  // namespace

Corpus load_csv(std::istream& in, const std::string& source,
                const BiasTypeRegistry& registry) {
  csvio::Table table = csvio::read_csv(in);

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    col.emplace(text::trim(table.header[i]), i);
  }
  for (const auto& required : kRequiredColumns) {
    if (col.count(required) == 0) {
      throw SchemaError("missing required column '" + required + "'");
    }
  }

  Corpus corpus;
  corpus.source = source;
  corpus.source_rows = table.rows.size();
  corpus.records.reserve(table.rows.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 2;  // header is row 1
    Record rec;
    rec.sentence = row[col.at("sentence")];
    rec.hypothesis = row[col.at("hypothesis")];
    if (text::trim(rec.sentence).empty()) {
      throw RowError(row_no, "empty sentence");
    }
    if (text::trim(rec.hypothesis).empty()) {
      throw RowError(row_no, "empty hypothesis");
    }

    const std::string label = text::trim(row[col.at("bias_label")]);
    if (label.empty()) {
      rec.bias_label.reset();
    } else if (label == "0") {
      rec.bias_label = 0;
    } else if (label == "1") {
      rec.bias_label = 1;
    } else {
      throw RowError(row_no, "bias_label must be 0, 1 or empty, got '" +
                                 label + "'");
    }

    std::string type = text::trim(row[col.at("bias_type")]);
    if (type.empty()) type = std::string(kNoBiasType);
    if (!registry.contains(type)) {
      throw RowError(row_no, "unknown bias_type '" + type + "'");
    }
    if (rec.bias_label.has_value()) {
      const bool is_none = type == kNoBiasType;
      if (*rec.bias_label == 0 && !is_none) {
        throw RowError(row_no, "bias_label 0 requires bias_type none");
      }
      if (*rec.bias_label == 1 && is_none) {
        throw RowError(row_no, "bias_label 1 requires a bias_type");
      }
    }
    rec.bias_type = type;

    for (const auto& attr : kSensitiveAttributes) {
      rec.attributes[std::string(attr)] =
          text::trim(row[col.at(std::string(attr))]);
    }
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

Corpus load(const std::string& path, const BiasTypeRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path);
  return load_csv(in, path, registry);
}

void write_csv(const Corpus& corpus, std::ostream& out) {
  csvio::Table table;
  table.header = {"sentence", "hypothesis", "bias_label", "bias_type",
                  "gender",   "race",       "religion",   "age"};
  for (const auto& rec : corpus.records) {
    std::vector<std::string> row;
    row.push_back(rec.sentence);
    row.push_back(rec.hypothesis);
    row.push_back(rec.bias_label ? std::to_string(*rec.bias_label) : "");
    row.push_back(rec.bias_type);
    for (const auto& attr : kSensitiveAttributes) {
      auto it = rec.attributes.find(std::string(attr));
      row.push_back(it == rec.attributes.end() ? "" : it->second);
    }
    table.rows.push_back(std::move(row));
  }
  csvio::write_csv(out, table);
}

void write(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset: " + path);
  write_csv(corpus, out);
}

Corpus preprocess(const Corpus& corpus) {
  Corpus out;
  out.source = corpus.source;
  out.source_rows = corpus.source_rows;

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& rec : corpus.records) {
    if (!rec.bias_label.has_value()) continue;

    Record clean = rec;
    clean.sentence = text::normalize_whitespace(rec.sentence);
    clean.hypothesis = text::normalize_whitespace(rec.hypothesis);
    clean.bias_type = text::trim(rec.bias_type);
    for (const auto& attr : kSensitiveAttributes) {
      std::string key(attr);
      auto it = rec.attributes.find(key);
      std::string value =
          it == rec.attributes.end() ? "" : text::normalize_whitespace(
                                                 it->second);
      clean.attributes[key] = value.empty() ? "unknown" : value;
    }

    if (!seen.emplace(clean.sentence, clean.hypothesis).second) continue;
    out.records.push_back(std::move(clean));
  }
  return out;
}

std::tuple<Corpus, Corpus, Corpus> split(const Corpus& corpus,
                                         const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = corpus.records.size();
  if (n < 10) {
    throw TooSmallError("need at least 10 records to split, got " +
                        std::to_string(n));
  }

  // overall sizes: floor then hand the remainder to train, then val
  std::array<std::size_t, 3> target{
      static_cast<std::size_t>(std::floor(spec.train * static_cast<double>(n))),
      static_cast<std::size_t>(std::floor(spec.val * static_cast<double>(n))),
      static_cast<std::size_t>(std::floor(spec.test * static_cast<double>(n)))};
  std::size_t assigned = target[0] + target[1] + target[2];
  for (std::size_t s = 0; assigned < n; s = (s + 1) % 3) {
    ++target[s];
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng::Rng r(spec.seed);
  r.shuffle(order);

  // Stratify positives vs. the rest. Positives are apportioned to splits by
  // largest remainder over the quota target[s] * n_pos / n, which keeps every
  // split's positive count within one record of proportional.
  std::size_t n_pos = 0;
  for (const auto& rec : corpus.records) {
    if (rec.bias_label.value_or(0) == 1) ++n_pos;
  }
  std::array<std::size_t, 3> pos_quota{0, 0, 0};
  std::array<double, 3> frac_part{0, 0, 0};
  std::size_t pos_assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double quota = static_cast<double>(target[s]) *
                         static_cast<double>(n_pos) / static_cast<double>(n);
    pos_quota[s] = static_cast<std::size_t>(std::floor(quota));
    frac_part[s] = quota - std::floor(quota);
    pos_assigned += pos_quota[s];
  }
  while (pos_assigned < n_pos) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < 3; ++s) {
      if (frac_part[s] > frac_part[best]) best = s;
    }
    ++pos_quota[best];
    frac_part[best] = -1.0;
    ++pos_assigned;
  }
  std::array<std::size_t, 3> rest_quota{target[0] - pos_quota[0],
                                        target[1] - pos_quota[1],
                                        target[2] - pos_quota[2]};

  // walk the shuffled order, consuming each stratum's quotas train→val→test
  std::array<Corpus, 3> parts;
  for (auto& part : parts) {
    part.source = corpus.source;
  }
  std::size_t used_pos = 0;
  std::size_t used_rest = 0;
  for (std::size_t idx : order) {
    const Record& rec = corpus.records[idx];
    const bool positive = rec.bias_label.value_or(0) == 1;
    std::size_t& u = positive ? used_pos : used_rest;
    const auto& q = positive ? pos_quota : rest_quota;
    std::size_t s = 0;
    if (u < q[0]) s = 0;
    else if (u < q[0] + q[1]) s = 1;
    else s = 2;
    ++u;
    parts[s].records.push_back(rec);
  }
  for (auto& part : parts) {
    part.source_rows = part.records.size();
  }
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

std::map<std::string, std::size_t> bias_type_distribution(
    const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& rec : corpus.records) {
    if (rec.bias_label.value_or(0) == 1) {
      ++counts[rec.bias_type];
    }
  }
  return counts;
}

}  // namespace ctxg::data

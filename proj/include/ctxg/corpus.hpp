#ifndef CTXG_CORPUS_HPP
#define CTXG_CORPUS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ctxg::data {

inline constexpr std::array<std::string_view, 4> kSensitiveAttributes{
    "gender", "race", "religion", "age"};

inline constexpr std::string_view kNoBiasType = "none";

// Closed set of bias-type categories. "none" is always a member and is the
// mandatory type of unbiased records. Category order (sorted) doubles as the
// classification-head index order.
class BiasTypeRegistry {
 public:
  BiasTypeRegistry();  // toxicity, stereotyping, offensive_language, none
  explicit BiasTypeRegistry(const std::vector<std::string>& extras);

  static const BiasTypeRegistry& defaults();

  bool contains(const std::string& name) const;
  // Index into names(); throws RangeError for unknown names.
  std::size_t index_of(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;  // sorted
};

// One annotated sentence/hypothesis pair. bias_label stays empty for rows
// whose label cell was blank; preprocess() drops those.
struct Record {
  std::string sentence;
  std::string hypothesis;
  std::optional<int> bias_label;
  std::string bias_type{kNoBiasType};
  std::map<std::string, std::string> attributes;  // gender/race/religion/age

  bool operator==(const Record&) const = default;
};

struct Corpus {
  std::vector<Record> records;
  std::string source;
  std::size_t source_rows = 0;

  std::size_t size() const { return records.size(); }
};

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError
  static SplitSpec parse(std::string_view fractions, std::uint64_t seed);
};

// CSV columns (any order, extras ignored): sentence, hypothesis, bias_label,
// bias_type, gender, race, religion, age.
// Throws SchemaError for missing columns, RowError for bad cell values.
Corpus load(const std::string& path,
            const BiasTypeRegistry& registry = BiasTypeRegistry::defaults());
Corpus load_csv(std::istream& in, const std::string& source,
                const BiasTypeRegistry& registry =
                    BiasTypeRegistry::defaults());

void write(const Corpus& corpus, const std::string& path);
void write_csv(const Corpus& corpus, std::ostream& out);

// Drops label-less rows, imputes "unknown" attributes, normalizes
// whitespace, and collapses exact duplicate (sentence, hypothesis) pairs
// keeping the first occurrence. Idempotent.
Corpus preprocess(const Corpus& corpus);

// Seeded stratified split; sizes are floor(fraction * n) with the remainder
// going to train first, then val. Throws TooSmallError when n < 10.
std::tuple<Corpus, Corpus, Corpus> split(const Corpus& corpus,
                                         const SplitSpec& spec);

// Counts bias types over positive records; zero-count categories omitted.
std::map<std::string, std::size_t> bias_type_distribution(
    const Corpus& corpus);

}  // namespace ctxg::data

#endif  // CTXG_CORPUS_HPP

#ifndef CTXG_METRICS_HPP
#define CTXG_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxg/corpus.hpp"
#include "ctxg/encoder.hpp"
#include "ctxg/model.hpp"

namespace ctxg::metrics {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

struct PerTypeCounts {
  std::map<std::string, std::size_t> tp;  // category -> correct count
  std::size_t n = 0;                      // universe size
};

struct GroupOutcome {
  std::size_t predicted_positive = 0;
  std::size_t total = 0;
  std::size_t tp = 0;
  std::size_t actual_positive = 0;
};

// attribute value -> outcome tallies
using GroupOutcomes = std::map<std::string, GroupOutcome>;

// (TP + TN) / (TP + TN + FP + FN). Throws EmptyError on an empty tally.
double bda(const ConfusionCounts& c);

// sum of per-type correct counts over the universe size N.
double btca(const PerTypeCounts& p);

// Positive-rate ratio rate(g_ref) / rate(g); 1 is perfectly fair.
// Throws EmptyGroupError (empty group) / ZeroRateError (rate(g) == 0).
double dis(const GroupOutcome& g, const GroupOutcome& g_ref);

// |TPR(g) - TPR(g_ref)|; 0 is perfectly fair. Throws NoPositivesError.
double eod(const GroupOutcome& g, const GroupOutcome& g_ref);

// Arithmetic mean of ratings in {1..5}. Throws EmptyError / RangeError.
double likert_mean(const std::vector<int>& ratings);

enum class BtcaUniverse { positives, all };
std::string_view to_string(BtcaUniverse u);
BtcaUniverse parse_btca_universe(std::string_view name);

struct MetricsReport {
  double bda = 0.0;
  double btca = 0.0;
  std::map<std::string, double> dis;  // attribute -> ratio
  std::map<std::string, double> eod;  // attribute -> difference
  // attribute -> (reference group, compared group) used for dis/eod
  std::map<std::string, std::pair<std::string, std::string>> groups;
  std::optional<double> interpretability;
  BtcaUniverse btca_universe = BtcaUniverse::positives;
  double threshold = 0.5;

  std::string to_json() const;  // stable key order
  static MetricsReport from_json(const std::string& text);

  bool operator==(const MetricsReport&) const = default;
};

// One scored instance; the eval sidecar file is these rows verbatim, which
// lets any metric be recomputed from scratch.
struct PredictionRow {
  std::size_t index = 0;
  int label = 0;
  double prob = 0.0;
  int predicted = 0;
  std::string true_type;
  std::string predicted_type;
  std::map<std::string, std::string> attributes;

  bool operator==(const PredictionRow&) const = default;
};

struct EvalOptions {
  std::vector<std::string> attributes;
  double threshold = 0.5;
  BtcaUniverse universe = BtcaUniverse::positives;
  int threads = 1;
};

// Scores every record (grounded or ablation encoding) against the model.
// The parallel version is bit-identical to the serial reference.
std::vector<PredictionRow> predict_rows_serial(const nn::ModelParams& params,
                                               const data::Corpus& corpus,
                                               const enc::Encoder& encoder,
                                               bool grounded,
                                               double threshold);
std::vector<PredictionRow> predict_rows(const nn::ModelParams& params,
                                        const data::Corpus& corpus,
                                        const enc::Encoder& encoder,
                                        bool grounded, double threshold,
                                        int threads);

ConfusionCounts tally_confusion(const std::vector<PredictionRow>& rows);
PerTypeCounts tally_types(const std::vector<PredictionRow>& rows,
                          BtcaUniverse universe);
GroupOutcomes tally_groups(const std::vector<PredictionRow>& rows,
                           const std::string& attribute);

// Assembles a report from scored rows; per-attribute dis/eod compare the
// largest group (reference) against the largest remaining group. Metric
// errors propagate annotated with the attribute involved.
MetricsReport metrics_from_rows(const std::vector<PredictionRow>& rows,
                                const std::vector<std::string>& attributes,
                                BtcaUniverse universe, double threshold);

struct EvalResult {
  MetricsReport report;
  std::vector<PredictionRow> rows;
};

// predict + tally. Throws RangeError unless threshold is in (0,1).
EvalResult evaluate(const nn::ModelParams& params, const data::Corpus& corpus,
                    const enc::Encoder& encoder, bool grounded,
                    const EvalOptions& options);

void write_predictions_csv(std::ostream& out,
                           const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions_csv(std::istream& in);

// Table-shaped summary: model,bda,btca,dis_<attr>...,eod_<attr>...
void write_report_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, MetricsReport>>& reports,
    const std::vector<std::string>& attributes);

}  // namespace ctxg::metrics

#endif  // CTXG_METRICS_HPP

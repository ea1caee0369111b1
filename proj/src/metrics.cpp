#include "ctxg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ctxg/csv.hpp"
#include "ctxg/errors.hpp"
#include "ctxg/parallel.hpp"
#include "ctxg/text.hpp"

namespace ctxg::metrics {

double bda(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyError("empty confusion tally");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double btca(const PerTypeCounts& p) {
  if (p.n == 0) throw EmptyError("empty type tally");
  std::size_t correct = 0;
  for (const auto& [name, count] : p.tp) {
    (void)name;
    correct += count;
  }
  if (correct > p.n) {
    throw DimensionError("per-type correct counts exceed instance count");
  }
  return static_cast<double>(correct) / static_cast<double>(p.n);
}

double dis(const GroupOutcome& g, const GroupOutcome& g_ref) {
  if (g.total == 0 || g_ref.total == 0) {
    throw EmptyGroupError("group with zero instances");
  }
  const double rate_g =
      static_cast<double>(g.predicted_positive) / static_cast<double>(g.total);
  const double rate_ref = static_cast<double>(g_ref.predicted_positive) /
                          static_cast<double>(g_ref.total);
  if (rate_g == 0.0) {
    throw ZeroRateError("denominator group has zero positive rate");
  }
  return rate_ref / rate_g;
}

double eod(const GroupOutcome& g, const GroupOutcome& g_ref) {
  if (g.actual_positive == 0 || g_ref.actual_positive == 0) {
    throw NoPositivesError("group without positive instances");
  }
  const double tpr_g =
      static_cast<double>(g.tp) / static_cast<double>(g.actual_positive);
  const double tpr_ref =
      static_cast<double>(g_ref.tp) / static_cast<double>(g_ref.actual_positive);
  return std::abs(tpr_g - tpr_ref);
}

double likert_mean(const std::vector<int>& ratings) {
  if (ratings.empty()) throw EmptyError("no ratings");
  double sum = 0.0;
  for (int r : ratings) {
    if (r < 1 || r > 5) {
      throw RangeError("rating " + std::to_string(r) + " outside 1..5");
    }
    sum += static_cast<double>(r);
  }
  return sum / static_cast<double>(ratings.size());
}

std::string_view to_string(BtcaUniverse u) {
  return u == BtcaUniverse::positives ? "positives" : "all";
}

BtcaUniverse parse_btca_universe(std::string_view name) {
  if (name == "positives") return BtcaUniverse::positives;
  if (name == "all") return BtcaUniverse::all;
  throw ConfigError("btca universe must be 'positives' or 'all', got '" +
                    std::string(name) + "'");
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["bda"] = bda;
  j["btca"] = btca;
  j["dis"] = nlohmann::ordered_json::object();
  for (const auto& [attr, value] : dis) j["dis"][attr] = value;
  j["eod"] = nlohmann::ordered_json::object();
  for (const auto& [attr, value] : eod) j["eod"][attr] = value;
  j["groups"] = nlohmann::ordered_json::object();
  for (const auto& [attr, pair] : groups) {
    j["groups"][attr] = {{"reference", pair.first},
                         {"compared", pair.second}};
  }
  if (interpretability.has_value()) {
    j["interpretability"] = *interpretability;
  } else {
    j["interpretability"] = nullptr;
  }
  j["notes"] = {{"bda_denominator", "TP+TN+FP+FN"},
                {"btca_universe", std::string(to_string(btca_universe))},
                {"threshold", threshold}};
  return j.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json(const std::string& textual) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(textual);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad metrics JSON: ") + e.what());
  }
  MetricsReport r;
  try {
    r.bda = j.at("bda").get<double>();
    r.btca = j.at("btca").get<double>();
    for (const auto& [attr, value] : j.at("dis").items()) {
      r.dis[attr] = value.get<double>();
    }
    for (const auto& [attr, value] : j.at("eod").items()) {
      r.eod[attr] = value.get<double>();
    }
    for (const auto& [attr, value] : j.at("groups").items()) {
      r.groups[attr] = {value.at("reference").get<std::string>(),
                        value.at("compared").get<std::string>()};
    }
    if (!j.at("interpretability").is_null()) {
      r.interpretability = j.at("interpretability").get<double>();
    }
    r.btca_universe = parse_btca_universe(
        j.at("notes").at("btca_universe").get<std::string>());
    r.threshold = j.at("notes").at("threshold").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad metrics JSON: ") + e.what());
  }
  return r;
}

std::vector<PredictionRow> predict_rows_serial(const nn::ModelParams& params,
                                               const data::Corpus& corpus,
                                               const enc::Encoder& encoder,
                                               bool grounded,
                                               double threshold) {
  return predict_rows(params, corpus, encoder, grounded, threshold, 1);
}

std::vector<PredictionRow> predict_rows(const nn::ModelParams& params,
                                        const data::Corpus& corpus,
                                        const enc::Encoder& encoder,
                                        bool grounded, double threshold,
                                        int threads) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw RangeError("threshold must lie in (0,1)");
  }
  const auto& type_names = encoder.registry().names();
  std::vector<PredictionRow> rows(corpus.records.size());
  par::for_each_index(corpus.records.size(), threads, [&](std::size_t i) {
    const data::Record& rec = corpus.records[i];
    const enc::GroundedInput input =
        grounded ? encoder.encode(rec, enc::derive_context(rec))
                 : encoder.encode_ablation(rec);
    const nn::ForwardResult fr = nn::forward(params, input, false, 0);
    PredictionRow row;
    row.index = i;
    row.label = input.main_label;
    row.prob = fr.detect_prob;
    row.predicted = fr.detect_prob >= threshold ? 1 : 0;
    row.true_type = rec.bias_type;
    const auto argmax = static_cast<std::size_t>(
        std::max_element(fr.type_probs.begin(), fr.type_probs.end()) -
        fr.type_probs.begin());
    row.predicted_type = type_names[argmax];
    row.attributes = rec.attributes;
    rows[i] = std::move(row);
  });
  return rows;
}

ConfusionCounts tally_confusion(const std::vector<PredictionRow>& rows) {
  ConfusionCounts c;
  for (const auto& row : rows) {
    if (row.label == 1 && row.predicted == 1) ++c.tp;
    else if (row.label == 0 && row.predicted == 0) ++c.tn;
    else if (row.label == 0 && row.predicted == 1) ++c.fp;
    else ++c.fn;
  }
  return c;
}

PerTypeCounts tally_types(const std::vector<PredictionRow>& rows,
                          BtcaUniverse universe) {
  PerTypeCounts p;
  for (const auto& row : rows) {
    if (universe == BtcaUniverse::positives && row.label != 1) continue;
    ++p.n;
    if (row.true_type == row.predicted_type) {
      ++p.tp[row.true_type];
    }
  }
  return p;
}

GroupOutcomes tally_groups(const std::vector<PredictionRow>& rows,
                           const std::string& attribute) {
  GroupOutcomes groups;
  for (const auto& row : rows) {
    auto it = row.attributes.find(attribute);
    const std::string value =
        it == row.attributes.end() ? "unknown" : it->second;
    GroupOutcome& g = groups[value];
    ++g.total;
    if (row.predicted == 1) ++g.predicted_positive;
    if (row.label == 1) {
      ++g.actual_positive;
      if (row.predicted == 1) ++g.tp;
    }
  }
  return groups;
}

namespace {

// reference = largest group, compared = largest remaining; ties break
// toward the lexically smaller name.
std::pair<std::string, std::string> pick_groups(const GroupOutcomes& groups) {
  std::string reference;
  std::size_t best = 0;
  for (const auto& [name, g] : groups) {
    if (g.total > best) {
      best = g.total;
      reference = name;
    }
  }
  std::string compared;
  best = 0;
  for (const auto& [name, g] : groups) {
    if (name == reference) continue;
    if (g.total > best) {
      best = g.total;
      compared = name;
    }
  }
  return {reference, compared};
}

}  // namespace

MetricsReport metrics_from_rows(const std::vector<PredictionRow>& rows,
                                const std::vector<std::string>& attributes,
                                BtcaUniverse universe, double threshold) {
  MetricsReport report;
  report.btca_universe = universe;
  report.threshold = threshold;
  report.bda = bda(tally_confusion(rows));
  report.btca = btca(tally_types(rows, universe));

  for (const auto& attr : attributes) {
    const GroupOutcomes groups = tally_groups(rows, attr);
    const auto [reference, compared] = pick_groups(groups);
    if (reference.empty() || compared.empty()) {
      throw EmptyGroupError("attribute '" + attr +
                            "': needs at least two groups");
    }
    const GroupOutcome& g_ref = groups.at(reference);
    const GroupOutcome& g_cmp = groups.at(compared);
    try {
      report.dis[attr] = dis(g_cmp, g_ref);
      report.eod[attr] = eod(g_cmp, g_ref);
    } catch (const ZeroRateError& e) {
      throw ZeroRateError("attribute '" + attr + "', group '" + compared +
                          "': " + e.what());
    } catch (const NoPositivesError& e) {
      throw NoPositivesError("attribute '" + attr + "': " + e.what());
    } catch (const EmptyGroupError& e) {
      throw EmptyGroupError("attribute '" + attr + "': " + e.what());
    }
    report.groups[attr] = {reference, compared};
  }
  return report;
}

EvalResult evaluate(const nn::ModelParams& params, const data::Corpus& corpus,
                    const enc::Encoder& encoder, bool grounded,
                    const EvalOptions& options) {
  EvalResult result;
  result.rows = predict_rows(params, corpus, encoder, grounded,
                             options.threshold, options.threads);
  result.report = metrics_from_rows(result.rows, options.attributes,
                                    options.universe, options.threshold);
  return result;
}

void write_predictions_csv(std::ostream& out,
                           const std::vector<PredictionRow>& rows) {
  csvio::Table table;
  table.header = {"index",     "label",         "prob",
                  "predicted", "true_type",     "predicted_type",
                  "gender",    "race",          "religion",
                  "age"};
  for (const auto& row : rows) {
    std::vector<std::string> fields;
    fields.push_back(std::to_string(row.index));
    fields.push_back(std::to_string(row.label));
    fields.push_back(text::format_double(row.prob));
    fields.push_back(std::to_string(row.predicted));
    fields.push_back(row.true_type);
    fields.push_back(row.predicted_type);
    for (const auto& attr : data::kSensitiveAttributes) {
      auto it = row.attributes.find(std::string(attr));
      fields.push_back(it == row.attributes.end() ? "unknown" : it->second);
    }
    table.rows.push_back(std::move(fields));
  }
  csvio::write_csv(out, table);
}

std::vector<PredictionRow> read_predictions_csv(std::istream& in) {
  const csvio::Table table = csvio::read_csv(in);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    col.emplace(table.header[i], i);
  }
  for (const char* required :
       {"index", "label", "prob", "predicted", "true_type",
        "predicted_type"}) {
    if (col.count(required) == 0) {
      throw SchemaError(std::string("predictions file missing column '") +
                        required + "'");
    }
  }
  std::vector<PredictionRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& fields : table.rows) {
    PredictionRow row;
    row.index = static_cast<std::size_t>(
        text::parse_int(fields[col.at("index")], "index"));
    row.label =
        static_cast<int>(text::parse_int(fields[col.at("label")], "label"));
    row.prob = text::parse_double(fields[col.at("prob")], "prob");
    row.predicted = static_cast<int>(
        text::parse_int(fields[col.at("predicted")], "predicted"));
    row.true_type = fields[col.at("true_type")];
    row.predicted_type = fields[col.at("predicted_type")];
    for (const auto& attr : data::kSensitiveAttributes) {
      auto it = col.find(std::string(attr));
      if (it != col.end()) {
        row.attributes[std::string(attr)] = fields[it->second];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_report_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, MetricsReport>>& reports,
    const std::vector<std::string>& attributes) {
  csvio::Table table;
  table.header = {"model", "bda", "btca"};
  for (const auto& attr : attributes) table.header.push_back("dis_" + attr);
  for (const auto& attr : attributes) table.header.push_back("eod_" + attr);
  table.header.push_back("interpretability");
  for (const auto& [name, report] : reports) {
    std::vector<std::string> row{name, text::format_double(report.bda),
                                 text::format_double(report.btca)};
    for (const auto& attr : attributes) {
      auto it = report.dis.find(attr);
      row.push_back(it == report.dis.end() ? ""
                                           : text::format_double(it->second));
    }
    for (const auto& attr : attributes) {
      auto it = report.eod.find(attr);
      row.push_back(it == report.eod.end() ? ""
                                           : text::format_double(it->second));
    }
    row.push_back(report.interpretability.has_value()
                      ? text::format_double(*report.interpretability)
                      : "");
    table.rows.push_back(std::move(row));
  }
  csvio::write_csv(out, table);
}

}  // namespace ctxg::metrics

#ifndef CTXG_EXPERIMENT_HPP
#define CTXG_EXPERIMENT_HPP

#include <map>
#include <string>
#include <vector>

#include "ctxg/metrics.hpp"
#include "ctxg/trainer.hpp"

namespace ctxg::exp {

// Flat `key = value` run configuration. Every knob a training run needs is a
// config key, so a run is reproducible from its config snapshot alone
// (run_stamp included: timestamps come from the config, not the clock).
struct RunConfig {
  std::string data_dir;       // holds train.csv / val.csv / test.csv
  std::string out_dir = "out";
  bool grounded = true;
  bool compare = false;
  std::vector<std::string> attributes;
  double threshold = 0.5;
  metrics::BtcaUniverse btca_universe = metrics::BtcaUniverse::positives;
  train::TrainConfig trainer;
  std::string run_stamp;  // optional caller-provided timestamp label

  // canonical key=value snapshot; parse(snapshot()) reproduces the config
  std::string snapshot() const;
  static RunConfig parse(const std::string& text);  // ConfigError
  static RunConfig load_file(const std::string& path);
};

struct RunOutputs {
  std::string checkpoint_path;
  std::string history_path;
  metrics::MetricsReport report;
};

struct ExperimentRecord {
  RunConfig config;
  std::map<std::string, std::size_t> corpus_rows;  // split name -> count
  std::map<std::string, RunOutputs> runs;          // grounded/ablation

  std::string to_json() const;
};

// Runs training (and the ablation when compare is set) from prepared splits,
// writing checkpoints, history/lr CSVs, vocab/label files, eval reports,
// prediction sidecars, and the experiment record into out_dir.
ExperimentRecord run_training(const RunConfig& config);

}  // namespace ctxg::exp

#endif  // CTXG_EXPERIMENT_HPP

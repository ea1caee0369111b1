#include "ctxg/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctxg/errors.hpp"
#include "ctxg/text.hpp"

namespace ctxg::exp {

namespace fs = std::filesystem;

std::string RunConfig::snapshot() const {
  std::ostringstream out;
  out << "data_dir = " << data_dir << '\n';
  out << "out_dir = " << out_dir << '\n';
  out << "grounded = " << (grounded ? "true" : "false") << '\n';
  out << "compare = " << (compare ? "true" : "false") << '\n';
  out << "attributes = " << text::join(attributes, ",") << '\n';
  out << "threshold = " << text::format_double(threshold) << '\n';
  out << "btca_universe = " << metrics::to_string(btca_universe) << '\n';
  out << "epochs = " << trainer.epochs << '\n';
  out << "batch_size = " << trainer.batch_size << '\n';
  out << "lr_max = " << text::format_double(trainer.lr_max) << '\n';
  out << "lr_min = " << text::format_double(trainer.lr_min) << '\n';
  out << "warmup_fraction = " << text::format_double(trainer.warmup_fraction)
      << '\n';
  out << "restart_period = " << trainer.restart_period << '\n';
  out << "restart_mult = " << trainer.restart_mult << '\n';
  out << "lambda = " << text::format_double(trainer.lambda) << '\n';
  out << "dropout = " << text::format_double(trainer.dropout) << '\n';
  out << "seed = " << trainer.seed << '\n';
  out << "embed_dim = " << trainer.embed_dim << '\n';
  out << "hidden_dim = " << trainer.hidden_dim << '\n';
  out << "max_len = " << trainer.max_len << '\n';
  out << "min_freq = " << trainer.min_freq << '\n';
  out << "threads = " << trainer.threads << '\n';
  out << "run_stamp = " << run_stamp << '\n';
  return out.str();
}

RunConfig RunConfig::parse(const std::string& input) {
  RunConfig cfg;
  std::istringstream in(input);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = text::trim(trimmed.substr(0, eq));
    const std::string value = text::trim(trimmed.substr(eq + 1));

    auto as_bool = [&](const std::string& v) {
      if (v == "true" || v == "1") return true;
      if (v == "false" || v == "0") return false;
      throw ConfigError("config key '" + key + "': expected true/false");
    };

    if (key == "data_dir") cfg.data_dir = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "grounded") cfg.grounded = as_bool(value);
    else if (key == "compare") cfg.compare = as_bool(value);
    else if (key == "attributes") {
      cfg.attributes.clear();
      if (!value.empty()) {
        for (auto& part : text::split(value, ',')) {
          const std::string attr = text::trim(part);
          if (!attr.empty()) cfg.attributes.push_back(attr);
        }
      }
    } else if (key == "threshold") {
      cfg.threshold = text::parse_double(value, key);
    } else if (key == "btca_universe") {
      cfg.btca_universe = metrics::parse_btca_universe(value);
    } else if (key == "epochs") {
      cfg.trainer.epochs = static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "batch_size") {
      cfg.trainer.batch_size =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "lr_max") {
      cfg.trainer.lr_max = text::parse_double(value, key);
    } else if (key == "lr_min") {
      cfg.trainer.lr_min = text::parse_double(value, key);
    } else if (key == "warmup_fraction") {
      cfg.trainer.warmup_fraction = text::parse_double(value, key);
    } else if (key == "restart_period") {
      cfg.trainer.restart_period =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "restart_mult") {
      cfg.trainer.restart_mult =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "lambda") {
      cfg.trainer.lambda = text::parse_double(value, key);
    } else if (key == "dropout") {
      cfg.trainer.dropout = text::parse_double(value, key);
    } else if (key == "seed") {
      cfg.trainer.seed = static_cast<std::uint64_t>(text::parse_int(value, key));
    } else if (key == "embed_dim") {
      cfg.trainer.embed_dim =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "hidden_dim") {
      cfg.trainer.hidden_dim =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "max_len") {
      cfg.trainer.max_len = static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "min_freq") {
      cfg.trainer.min_freq =
          static_cast<std::size_t>(text::parse_int(value, key));
    } else if (key == "threads") {
      cfg.trainer.threads = static_cast<int>(text::parse_int(value, key));
    } else if (key == "run_stamp") {
      cfg.run_stamp = value;
    } else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ExperimentRecord::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["timestamp"] = config.run_stamp.empty()
                       ? nlohmann::ordered_json(nullptr)
                       : nlohmann::ordered_json(config.run_stamp);
  j["config"] = config.snapshot();
  j["corpus"] = nlohmann::ordered_json::object();
  for (const auto& [name, rows] : corpus_rows) j["corpus"][name] = rows;
  j["runs"] = nlohmann::ordered_json::object();
  for (const auto& [name, outputs] : runs) {
    j["runs"][name] = {
        {"checkpoint", outputs.checkpoint_path},
        {"history", outputs.history_path},
        {"metrics", nlohmann::ordered_json::parse(outputs.report.to_json())}};
  }
  return j.dump(2) + "\n";
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
}

RunOutputs run_one(const RunConfig& config, const std::string& name,
                   bool grounded, const data::Corpus& train_c,
                   const data::Corpus& val_c, const enc::Encoder& encoder) {
  const train::TrainResult result =
      train::train(train_c, val_c, encoder, config.trainer, grounded);

  RunOutputs outputs;
  const fs::path out_dir(config.out_dir);
  outputs.checkpoint_path = (out_dir / ("model_" + name + ".ckpt")).string();
  nn::CheckpointMeta meta;
  meta.grounded = grounded;
  meta.max_len = encoder.max_len();
  meta.type_names = encoder.registry().names();
  nn::save_checkpoint_file(result.params, meta, outputs.checkpoint_path);

  outputs.history_path = (out_dir / ("history_" + name + ".csv")).string();
  {
    std::ofstream out(outputs.history_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + outputs.history_path);
    train::write_history_csv(out, result.history);
  }
  {
    const std::string lr_path =
        (out_dir / ("lr_trace_" + name + ".csv")).string();
    std::ofstream out(lr_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + lr_path);
    train::write_lr_trace_csv(out, result.history);
  }

  metrics::EvalOptions options;
  options.attributes = config.attributes;
  options.threshold = config.threshold;
  options.universe = config.btca_universe;
  options.threads = config.trainer.threads;
  const metrics::EvalResult eval =
      metrics::evaluate(result.params, val_c, encoder, grounded, options);
  outputs.report = eval.report;

  write_text_file((out_dir / ("metrics_" + name + ".json")).string(),
                  eval.report.to_json());
  {
    const std::string pred_path =
        (out_dir / ("predictions_" + name + ".csv")).string();
    std::ofstream out(pred_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + pred_path);
    metrics::write_predictions_csv(out, eval.rows);
  }
  return outputs;
}

}  // namespace

ExperimentRecord run_training(const RunConfig& config) {
  config.trainer.validate();
  const fs::path data_dir(config.data_dir);
  const std::string train_path = (data_dir / "train.csv").string();
  const std::string val_path = (data_dir / "val.csv").string();
  if (!fs::exists(train_path) || !fs::exists(val_path)) {
    throw ConfigError("prepared splits not found under '" + config.data_dir +
                      "' (expected train.csv and val.csv)");
  }
  const data::Corpus train_c = data::preprocess(data::load(train_path));
  const data::Corpus val_c = data::preprocess(data::load(val_path));

  std::vector<repr::ContextElement> contexts;
  contexts.reserve(train_c.records.size());
  for (const auto& rec : train_c.records) {
    contexts.push_back(enc::derive_context(rec));
  }
  const enc::Vocabulary vocab =
      enc::Vocabulary::build(train_c, contexts, config.trainer.min_freq);
  const enc::ContextLabelVocab labels = enc::ContextLabelVocab::build(contexts);

  fs::create_directories(config.out_dir);
  const fs::path out_dir(config.out_dir);
  vocab.save_file((out_dir / "vocab.tsv").string());
  labels.save_file((out_dir / "context_labels.tsv").string());

  const enc::Encoder encoder(vocab, labels, data::BiasTypeRegistry::defaults(),
                             config.trainer.max_len);

  ExperimentRecord record;
  record.config = config;
  record.corpus_rows["train"] = train_c.records.size();
  record.corpus_rows["val"] = val_c.records.size();

  if (config.compare) {
    record.runs["grounded"] =
        run_one(config, "grounded", true, train_c, val_c, encoder);
    record.runs["ablation"] =
        run_one(config, "ablation", false, train_c, val_c, encoder);
  } else {
    const std::string name = config.grounded ? "grounded" : "ablation";
    record.runs[name] =
        run_one(config, name, config.grounded, train_c, val_c, encoder);
  }

  write_text_file((out_dir / "experiment.json").string(), record.to_json());
  return record;
}

}  // namespace ctxg::exp

#include "ctxg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ctxg/errors.hpp"
#include "ctxg/rng.hpp"
#include "ctxg/text.hpp"

namespace ctxg::train {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("warmup_fraction must lie in [0,1)");
  }
  if (lr_min < 0.0 || lr_max < lr_min) {
    throw ConfigError("need 0 <= lr_min <= lr_max");
  }
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0,1)");
  }
  if (restart_mult < 1) throw ConfigError("restart_mult must be >= 1");
  if (embed_dim < 1 || hidden_dim < 1) {
    throw ConfigError("model dimensions must be >= 1");
  }
  if (max_len < 16) throw ConfigError("max_len must be >= 16");
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");
}

double lr_at(std::size_t step, std::size_t total_steps,
             const TrainConfig& cfg) {
  if (total_steps == 0 || step >= total_steps) {
    throw RangeError("step " + std::to_string(step) +
                     " outside schedule of " + std::to_string(total_steps) +
                     " steps");
  }
  const auto warmup_steps = static_cast<std::size_t>(
      std::ceil(cfg.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup_steps) {
    if (warmup_steps == 1) return 0.0;
    return cfg.lr_max * static_cast<double>(step) /
           static_cast<double>(warmup_steps - 1);
  }

  std::size_t period = cfg.restart_period;
  if (period == 0) {
    const std::size_t epochs = std::max<std::size_t>(cfg.epochs, 1);
    period = std::max<std::size_t>(total_steps / epochs, 1);
  }
  // Each arc spans period+1 steps so both endpoints land on the trace:
  // lr_max at in-arc step 0, lr_min at in-arc step == period.
  std::size_t t = step - warmup_steps;
  while (t > period) {
    t -= period + 1;
    period *= cfg.restart_mult;
  }
  const double phase =
      static_cast<double>(t) / static_cast<double>(period);
  return cfg.lr_min +
         0.5 * (cfg.lr_max - cfg.lr_min) * (1.0 + std::cos(M_PI * phase));
}

namespace {

struct AdamState {
  nn::ModelParams m;
  nn::ModelParams v;
};

void adam_step(nn::ModelParams& params, const nn::ModelParams& grad,
               AdamState& state, double lr, std::size_t t) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  const double bc1 =
      1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 =
      1.0 - std::pow(beta2, static_cast<double>(t));

  auto p_tensors = params.tensors();
  auto g_tensors = grad.tensors();
  auto m_tensors = state.m.tensors();
  auto v_tensors = state.v.tensors();
  for (std::size_t ti = 0; ti < p_tensors.size(); ++ti) {
    std::vector<double>& pv = *p_tensors[ti].second;
    const std::vector<double>& gv = *g_tensors[ti].second;
    std::vector<double>& mv = *m_tensors[ti].second;
    std::vector<double>& vv = *v_tensors[ti].second;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double g = gv[i];
      mv[i] = beta1 * mv[i] + (1.0 - beta1) * g;
      vv[i] = beta2 * vv[i] + (1.0 - beta2) * g * g;
      const double mhat = mv[i] / bc1;
      const double vhat = vv[i] / bc2;
      pv[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

struct ValMetrics {
  double bda = 0.0;
  double btca = 0.0;
};

ValMetrics validation_metrics(const nn::ModelParams& params,
                              const std::vector<enc::GroundedInput>& val) {
  ValMetrics out;
  if (val.empty()) return out;
  std::size_t correct = 0;
  std::size_t positives = 0;
  std::size_t typed = 0;
  for (const auto& input : val) {
    const nn::ForwardResult fr = nn::forward(params, input, false, 0);
    const int pred = fr.detect_prob >= 0.5 ? 1 : 0;
    if (pred == input.main_label) ++correct;
    if (input.main_label == 1) {
      ++positives;
      const auto argmax = static_cast<int>(
          std::max_element(fr.type_probs.begin(), fr.type_probs.end()) -
          fr.type_probs.begin());
      if (argmax == input.type_label) ++typed;
    }
  }
  out.bda = static_cast<double>(correct) / static_cast<double>(val.size());
  out.btca = positives == 0
                 ? 0.0
                 : static_cast<double>(typed) / static_cast<double>(positives);
  return out;
}

}  // namespace

TrainResult train(const data::Corpus& train_corpus,
                  const data::Corpus& val_corpus, const enc::Encoder& encoder,
                  const TrainConfig& cfg, bool grounded) {
  cfg.validate();

  const std::vector<enc::GroundedInput> train_inputs =
      encoder.encode_corpus(train_corpus, grounded, cfg.threads);
  const std::vector<enc::GroundedInput> val_inputs =
      encoder.encode_corpus(val_corpus, grounded, cfg.threads);

  nn::ModelDims dims;
  dims.vocab = encoder.vocab().size();
  dims.embed = cfg.embed_dim;
  dims.hidden = cfg.hidden_dim;
  dims.types = encoder.registry().size();
  dims.aux = encoder.labels().size();

  // the ablation drops the auxiliary objective along with the context
  const double lambda = grounded ? cfg.lambda : 0.0;

  TrainResult result{nn::ModelParams::init(dims, cfg.dropout, cfg.seed), {}};
  if (cfg.epochs == 0 || train_inputs.empty()) return result;

  const std::size_t n = train_inputs.size();
  const std::size_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = cfg.epochs * steps_per_epoch;

  AdamState adam{nn::ModelParams::zeros(dims, cfg.dropout),
                 nn::ModelParams::zeros(dims, cfg.dropout)};
  result.history.lr_trace.reserve(total_steps);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<enc::GroundedInput> batch;
  batch.reserve(cfg.batch_size);

  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::Rng shuffle_rng(rng::mix(cfg.seed, 0x73687566ULL + epoch));
    shuffle_rng.shuffle(order);

    double sum_main = 0.0;
    double sum_aux = 0.0;
    double sum_type = 0.0;
    std::size_t positives_total = 0;

    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(train_inputs[order[i]]);
      }
      std::size_t batch_pos = 0;
      for (const auto& item : batch) {
        if (item.main_label == 1) ++batch_pos;
      }

      nn::ModelParams grad = nn::ModelParams::zeros(dims, cfg.dropout);
      const nn::BatchLoss loss = nn::batch_gradients(
          result.params, batch, lambda, true,
          rng::mix(rng::mix(cfg.seed, 0x64726f70ULL), global_step), grad,
          cfg.threads);

      const double lr = lr_at(global_step, total_steps, cfg);
      result.history.lr_trace.push_back(lr);
      adam_step(result.params, grad, adam, lr, global_step + 1);

      const auto bsz = static_cast<double>(batch.size());
      sum_main += loss.main * bsz;
      sum_aux += loss.aux * bsz;
      sum_type += loss.type * static_cast<double>(batch_pos);
      positives_total += batch_pos;
      ++global_step;
    }

    EpochStats stats;
    stats.train_main = sum_main / static_cast<double>(n);
    stats.train_aux = sum_aux / static_cast<double>(n);
    stats.train_type = positives_total == 0
                           ? 0.0
                           : sum_type / static_cast<double>(positives_total);
    stats.train_loss =
        stats.train_main + stats.train_type + lambda * stats.train_aux;

    const nn::BatchLoss val_loss =
        nn::batch_loss(result.params, val_inputs, lambda);
    stats.val_loss = val_loss.total;
    const ValMetrics vm = validation_metrics(result.params, val_inputs);
    stats.val_bda = vm.bda;
    stats.val_btca = vm.btca;
    result.history.epochs.push_back(stats);
  }
  return result;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "epoch,train_loss,train_main,train_type,train_aux,val_loss,val_bda,"
         "val_btca\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const EpochStats& s = history.epochs[e];
    out << e << ',' << text::format_double(s.train_loss) << ','
        << text::format_double(s.train_main) << ','
        << text::format_double(s.train_type) << ','
        << text::format_double(s.train_aux) << ','
        << text::format_double(s.val_loss) << ','
        << text::format_double(s.val_bda) << ','
        << text::format_double(s.val_btca) << '\n';
  }
}

void write_lr_trace_csv(std::ostream& out, const TrainHistory& history) {
  out << "step,lr\n";
  for (std::size_t i = 0; i < history.lr_trace.size(); ++i) {
    out << i << ',' << text::format_double(history.lr_trace[i]) << '\n';
  }
}

}  // namespace ctxg::train

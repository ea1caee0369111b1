#ifndef CTXG_TRAINER_HPP
#define CTXG_TRAINER_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctxg/corpus.hpp"
#include "ctxg/encoder.hpp"
#include "ctxg/model.hpp"

namespace ctxg::train {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  // Desk-scale schedule bounds; --paper-lr swaps in the documented 2e-5.
  double lr_max = 1e-2;
  double lr_min = 1e-4;
  double warmup_fraction = 0.10;
  std::size_t restart_period = 0;  // T_0 in steps; 0 = one epoch
  std::size_t restart_mult = 2;
  double lambda = 0.5;
  double dropout = 0.1;
  std::uint64_t seed = 1;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t max_len = 64;
  std::size_t min_freq = 1;
  int threads = 1;

  void validate() const;  // ConfigError
};

// Warmup ramp then cosine annealing with warm restarts. During the first
// ceil(warmup_fraction * total) steps the rate climbs linearly from 0 to
// lr_max; afterwards each arc starts at lr_max, reaches lr_min when the
// in-arc step count hits the period, and restarts with the period multiplied
// by restart_mult. Throws RangeError for step outside [0, total).
double lr_at(std::size_t step, std::size_t total_steps,
             const TrainConfig& cfg);

struct EpochStats {
  double train_loss = 0.0;
  double train_main = 0.0;
  double train_type = 0.0;
  double train_aux = 0.0;
  double val_loss = 0.0;
  double val_bda = 0.0;
  double val_btca = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::vector<double> lr_trace;  // one entry per optimizer step
};

struct TrainResult {
  nn::ModelParams params;
  TrainHistory history;
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over the total loss with the lr_at
// schedule. grounded=false is the non-contextual ablation: no context tokens
// and lambda forced to 0. Deterministic in cfg.seed.
TrainResult train(const data::Corpus& train_corpus,
                  const data::Corpus& val_corpus, const enc::Encoder& encoder,
                  const TrainConfig& cfg, bool grounded);

void write_history_csv(std::ostream& out, const TrainHistory& history);
void write_lr_trace_csv(std::ostream& out, const TrainHistory& history);

}  // namespace ctxg::train

#endif  // CTXG_TRAINER_HPP

#ifndef CTXG_MODEL_HPP
#define CTXG_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ctxg/encoder.hpp"

namespace ctxg::nn {

inline constexpr double kProbEps = 1e-7;

struct ModelDims {
  std::size_t vocab = 0;
  std::size_t embed = 32;
  std::size_t hidden = 64;
  std::size_t types = 4;
  std::size_t aux = 0;

  bool operator==(const ModelDims&) const = default;
};

// Embedding + mean-pool + tanh hidden layer + three linear heads
// (bias detection, bias type, auxiliary context prediction).
struct ModelParams {
  ModelDims dims;
  double dropout_rate = 0.1;

  std::vector<double> embeddings;  // vocab x embed, row-major
  std::vector<double> hidden_w;    // embed x hidden
  std::vector<double> hidden_b;    // hidden
  std::vector<double> detect_w;    // hidden
  std::vector<double> detect_b;    // 1
  std::vector<double> type_w;      // hidden x types
  std::vector<double> type_b;      // types
  std::vector<double> aux_w;       // hidden x aux
  std::vector<double> aux_b;       // aux

  static ModelParams zeros(const ModelDims& dims, double dropout_rate);
  // Small-normal init for weights, zero biases; deterministic in seed.
  static ModelParams init(const ModelDims& dims, double dropout_rate,
                          std::uint64_t seed);

  // Uniform access to every tensor, in serialization order.
  std::vector<std::pair<const char*, std::vector<double>*>> tensors();
  std::vector<std::pair<const char*, const std::vector<double>*>> tensors()
      const;

  bool operator==(const ModelParams&) const = default;
};

struct ForwardResult {
  double detect_prob = 0.5;
  std::vector<double> type_probs;
  std::vector<double> aux_probs;
};

// Mean non-PAD embedding -> tanh hidden (dropout in train mode, keyed by
// rng_seed) -> sigmoid/softmax/sigmoid heads. Throws DimensionError.
ForwardResult forward(const ModelParams& p, const enc::GroundedInput& x,
                      bool train_mode, std::uint64_t rng_seed);

// Batch-averaged binary cross-entropy over clamped probabilities.
double loss_main(std::span<const double> detect_probs,
                 std::span<const int> labels);

// -log p[true type], averaged over positive-labeled records only; 0 when
// the batch has none.
double loss_type(const std::vector<std::vector<double>>& type_probs,
                 std::span<const int> type_labels,
                 std::span<const int> bias_labels);

// Multi-label BCE, mean over bits then over the batch.
double loss_aux(const std::vector<std::vector<double>>& aux_probs,
                const std::vector<std::vector<std::uint8_t>>& aux_targets);

// (main + type) + lambda * aux; the lambda == 0 path never touches aux.
double loss_total(double main, double type_loss, double aux, double lambda);

struct BatchLoss {
  double main = 0.0;
  double type = 0.0;
  double aux = 0.0;
  double total = 0.0;
};

// Loss of a batch without gradients (used by the finite-difference check
// and validation passes). Dropout active only in train mode.
BatchLoss batch_loss(const ModelParams& p,
                     std::span<const enc::GroundedInput> batch, double lambda,
                     bool train_mode = false, std::uint64_t dropout_seed = 0);

// Analytic gradients of loss_total w.r.t. every parameter, accumulated into
// grad (which must be zeros_like p). Serial reference: straight loop,
// accumulating example contributions in order.
BatchLoss batch_gradients_serial(const ModelParams& p,
                                 std::span<const enc::GroundedInput> batch,
                                 double lambda, bool train_mode,
                                 std::uint64_t dropout_seed,
                                 ModelParams& grad);

// OpenMP version: per-example contributions computed in parallel, then
// reduced in example order; bit-identical to the serial reference.
BatchLoss batch_gradients(const ModelParams& p,
                          std::span<const enc::GroundedInput> batch,
                          double lambda, bool train_mode,
                          std::uint64_t dropout_seed, ModelParams& grad,
                          int threads);

// Checkpoint text format: versioned header, meta block, dimension block,
// then row-major parameter values in round-trip-exact decimals.
struct CheckpointMeta {
  bool grounded = true;
  std::size_t max_len = 64;
  std::vector<std::string> type_names;
};

void save_checkpoint(std::ostream& out, const ModelParams& p,
                     const CheckpointMeta& meta);
void save_checkpoint_file(const ModelParams& p, const CheckpointMeta& meta,
                          const std::string& path);
std::pair<ModelParams, CheckpointMeta> load_checkpoint(std::istream& in);
std::pair<ModelParams, CheckpointMeta> load_checkpoint_file(
    const std::string& path);

}  // namespace ctxg::nn

#endif  // CTXG_MODEL_HPP

#include "ctxg/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ctxg/errors.hpp"
#include "ctxg/parallel.hpp"
#include "ctxg/rng.hpp"
#include "ctxg/text.hpp"

namespace ctxg::nn {

namespace {

double clamp_prob(double p) {
  return std::min(std::max(p, kProbEps), 1.0 - kProbEps);
}

double sigmoid(double u) {
  if (u >= 0.0) {
    return 1.0 / (1.0 + std::exp(-u));
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double bce(double prob, double target) {
  const double p = clamp_prob(prob);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

}  // namespace

ModelParams ModelParams::zeros(const ModelDims& dims, double dropout_rate) {
  ModelParams p;
  p.dims = dims;
  p.dropout_rate = dropout_rate;
  p.embeddings.assign(dims.vocab * dims.embed, 0.0);
  p.hidden_w.assign(dims.embed * dims.hidden, 0.0);
  p.hidden_b.assign(dims.hidden, 0.0);
  p.detect_w.assign(dims.hidden, 0.0);
  p.detect_b.assign(1, 0.0);
  p.type_w.assign(dims.hidden * dims.types, 0.0);
  p.type_b.assign(dims.types, 0.0);
  p.aux_w.assign(dims.hidden * dims.aux, 0.0);
  p.aux_b.assign(dims.aux, 0.0);
  return p;
}

ModelParams ModelParams::init(const ModelDims& dims, double dropout_rate,
                              std::uint64_t seed) {
  ModelParams p = zeros(dims, dropout_rate);
  rng::Rng r(rng::mix(seed, 0x6d6f64656cULL));
  for (double& v : p.embeddings) v = r.normal(0.0, 0.1);
  const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(dims.embed));
  for (double& v : p.hidden_w) v = r.normal(0.0, hidden_scale);
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (double& v : p.detect_w) v = r.normal(0.0, head_scale);
  for (double& v : p.type_w) v = r.normal(0.0, head_scale);
  for (double& v : p.aux_w) v = r.normal(0.0, head_scale);
  return p;
}

std::vector<std::pair<const char*, std::vector<double>*>>
ModelParams::tensors() {
  return {{"embeddings", &embeddings}, {"hidden_w", &hidden_w},
          {"hidden_b", &hidden_b},     {"detect_w", &detect_w},
          {"detect_b", &detect_b},     {"type_w", &type_w},
          {"type_b", &type_b},         {"aux_w", &aux_w},
          {"aux_b", &aux_b}};
}

std::vector<std::pair<const char*, const std::vector<double>*>>
ModelParams::tensors() const {
  return {{"embeddings", &embeddings}, {"hidden_w", &hidden_w},
          {"hidden_b", &hidden_b},     {"detect_w", &detect_w},
          {"detect_b", &detect_b},     {"type_w", &type_w},
          {"type_b", &type_b},         {"aux_w", &aux_w},
          {"aux_b", &aux_b}};
}

namespace {

struct ExampleState {
  std::vector<std::size_t> tokens;  // non-PAD ids
  std::vector<double> x;            // mean embedding
  std::vector<double> a;            // tanh activations (pre-dropout)
  std::vector<double> mask;         // dropout multiplier per hidden unit
  std::vector<double> h;            // post-dropout activations
  double detect = 0.5;
  std::vector<double> type;
  std::vector<double> aux;
};

void check_input(const ModelParams& p, const enc::GroundedInput& x) {
  for (int id : x.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p.dims.vocab) {
      throw DimensionError("token id " + std::to_string(id) +
                           " outside vocabulary of size " +
                           std::to_string(p.dims.vocab));
    }
  }
  if (x.aux_target.size() != p.dims.aux) {
    throw DimensionError("aux target size " +
                         std::to_string(x.aux_target.size()) +
                         " does not match aux head size " +
                         std::to_string(p.dims.aux));
  }
  if (x.type_label < 0 ||
      static_cast<std::size_t>(x.type_label) >= p.dims.types) {
    throw DimensionError("type label " + std::to_string(x.type_label) +
                         " outside type head of size " +
                         std::to_string(p.dims.types));
  }
}

ExampleState run_forward(const ModelParams& p, const enc::GroundedInput& input,
                         bool train_mode, std::uint64_t rng_seed) {
  check_input(p, input);
  const std::size_t d = p.dims.embed;
  const std::size_t hd = p.dims.hidden;
  const std::size_t K = p.dims.types;
  const std::size_t M = p.dims.aux;

  ExampleState s;
  for (int id : input.ids) {
    if (id != enc::kPad) s.tokens.push_back(static_cast<std::size_t>(id));
  }
  s.x.assign(d, 0.0);
  for (std::size_t tok : s.tokens) {
    const double* row = &p.embeddings[tok * d];
    for (std::size_t i = 0; i < d; ++i) s.x[i] += row[i];
  }
  const double inv_n = 1.0 / static_cast<double>(s.tokens.size());
  for (std::size_t i = 0; i < d; ++i) s.x[i] *= inv_n;

  s.a.assign(hd, 0.0);
  for (std::size_t j = 0; j < hd; ++j) {
    double z = p.hidden_b[j];
    for (std::size_t i = 0; i < d; ++i) z += s.x[i] * p.hidden_w[i * hd + j];
    s.a[j] = std::tanh(z);
  }

  s.mask.assign(hd, 1.0);
  if (train_mode && p.dropout_rate > 0.0) {
    rng::Rng r(rng_seed);
    const double scale = 1.0 / (1.0 - p.dropout_rate);
    for (std::size_t j = 0; j < hd; ++j) {
      s.mask[j] = r.uniform01() < p.dropout_rate ? 0.0 : scale;
    }
  }
  s.h.assign(hd, 0.0);
  for (std::size_t j = 0; j < hd; ++j) s.h[j] = s.a[j] * s.mask[j];

  double u = p.detect_b[0];
  for (std::size_t j = 0; j < hd; ++j) u += p.detect_w[j] * s.h[j];
  s.detect = sigmoid(u);

  std::vector<double> logits(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) logits[k] = p.type_b[k];
  for (std::size_t j = 0; j < hd; ++j) {
    const double hj = s.h[j];
    const double* row = &p.type_w[j * K];
    for (std::size_t k = 0; k < K; ++k) logits[k] += hj * row[k];
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  s.type.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    s.type[k] = std::exp(logits[k] - top);
    denom += s.type[k];
  }
  for (std::size_t k = 0; k < K; ++k) s.type[k] /= denom;

  s.aux.assign(M, 0.0);
  if (M > 0) {
    std::vector<double> au(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) au[m] = p.aux_b[m];
    for (std::size_t j = 0; j < hd; ++j) {
      const double hj = s.h[j];
      const double* row = &p.aux_w[j * M];
      for (std::size_t m = 0; m < M; ++m) au[m] += hj * row[m];
    }
    for (std::size_t m = 0; m < M; ++m) s.aux[m] = sigmoid(au[m]);
  }
  return s;
}

// Per-example gradient contribution. Dense pieces mirror the parameter
// tensors; the embedding gradient is one shared d-vector applied to each
// token position in order.
struct ExampleGrad {
  BatchLoss loss;
  std::vector<double> hidden_w, hidden_b;
  std::vector<double> detect_w, detect_b;
  std::vector<double> type_w, type_b;
  std::vector<double> aux_w, aux_b;
  std::vector<std::size_t> tokens;
  std::vector<double> embed_add;  // g_x / n_tok
};

ExampleGrad example_gradient(const ModelParams& p,
                             const enc::GroundedInput& input, double lambda,
                             bool train_mode, std::uint64_t example_seed,
                             std::size_t batch_size,
                             std::size_t positive_count) {
  const std::size_t d = p.dims.embed;
  const std::size_t hd = p.dims.hidden;
  const std::size_t K = p.dims.types;
  const std::size_t M = p.dims.aux;
  const double invB = 1.0 / static_cast<double>(batch_size);

  ExampleState s = run_forward(p, input, train_mode, example_seed);
  ExampleGrad g;
  g.hidden_w.assign(d * hd, 0.0);
  g.hidden_b.assign(hd, 0.0);
  g.detect_w.assign(hd, 0.0);
  g.detect_b.assign(1, 0.0);
  g.type_w.assign(hd * K, 0.0);
  g.type_b.assign(K, 0.0);
  g.aux_w.assign(hd * M, 0.0);
  g.aux_b.assign(M, 0.0);

  const double y = static_cast<double>(input.main_label);
  g.loss.main = bce(s.detect, y) * invB;
  const double delta_det = (s.detect - y) * invB;

  std::vector<double> delta_type(K, 0.0);
  if (input.main_label == 1 && positive_count > 0) {
    const double invP = 1.0 / static_cast<double>(positive_count);
    const auto k_true = static_cast<std::size_t>(input.type_label);
    g.loss.type = -std::log(clamp_prob(s.type[k_true])) * invP;
    for (std::size_t k = 0; k < K; ++k) {
      delta_type[k] = (s.type[k] - (k == k_true ? 1.0 : 0.0)) * invP;
    }
  }

  std::vector<double> delta_aux;
  if (lambda > 0.0 && M > 0) {
    delta_aux.assign(M, 0.0);
    const double invMB = invB / static_cast<double>(M);
    double aux_sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double t = static_cast<double>(input.aux_target[m]);
      aux_sum += bce(s.aux[m], t);
      delta_aux[m] = lambda * (s.aux[m] - t) * invMB;
    }
    g.loss.aux = aux_sum * invMB;
  }

  // heads
  std::vector<double> g_h(hd, 0.0);
  for (std::size_t j = 0; j < hd; ++j) {
    g.detect_w[j] = s.h[j] * delta_det;
    g_h[j] = p.detect_w[j] * delta_det;
  }
  g.detect_b[0] = delta_det;
  if (input.main_label == 1 && positive_count > 0) {
    for (std::size_t j = 0; j < hd; ++j) {
      const double hj = s.h[j];
      const double* row = &p.type_w[j * K];
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        g.type_w[j * K + k] = hj * delta_type[k];
        acc += row[k] * delta_type[k];
      }
      g_h[j] += acc;
    }
    for (std::size_t k = 0; k < K; ++k) g.type_b[k] = delta_type[k];
  }
  if (!delta_aux.empty()) {
    for (std::size_t j = 0; j < hd; ++j) {
      const double hj = s.h[j];
      const double* row = &p.aux_w[j * M];
      double acc = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        g.aux_w[j * M + m] = hj * delta_aux[m];
        acc += row[m] * delta_aux[m];
      }
      g_h[j] += acc;
    }
    for (std::size_t m = 0; m < M; ++m) g.aux_b[m] = delta_aux[m];
  }

  // hidden layer
  std::vector<double> g_z(hd, 0.0);
  for (std::size_t j = 0; j < hd; ++j) {
    const double g_a = g_h[j] * s.mask[j];
    g_z[j] = g_a * (1.0 - s.a[j] * s.a[j]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = s.x[i];
    for (std::size_t j = 0; j < hd; ++j) {
      g.hidden_w[i * hd + j] = xi * g_z[j];
    }
  }
  g.hidden_b = g_z;

  // embeddings: every token position receives g_x / n_tok
  g.embed_add.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < hd; ++j) {
      acc += p.hidden_w[i * hd + j] * g_z[j];
    }
    g.embed_add[i] = acc / static_cast<double>(s.tokens.size());
  }
  g.tokens = std::move(s.tokens);
  return g;
}

void add_into(std::vector<double>& acc, const std::vector<double>& inc) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
}

void reduce_example(const ExampleGrad& g, const ModelDims& dims,
                    ModelParams& grad, BatchLoss& loss) {
  loss.main += g.loss.main;
  loss.type += g.loss.type;
  loss.aux += g.loss.aux;
  add_into(grad.hidden_w, g.hidden_w);
  add_into(grad.hidden_b, g.hidden_b);
  add_into(grad.detect_w, g.detect_w);
  add_into(grad.detect_b, g.detect_b);
  add_into(grad.type_w, g.type_w);
  add_into(grad.type_b, g.type_b);
  add_into(grad.aux_w, g.aux_w);
  add_into(grad.aux_b, g.aux_b);
  for (std::size_t tok : g.tokens) {
    double* row = &grad.embeddings[tok * dims.embed];
    for (std::size_t i = 0; i < dims.embed; ++i) row[i] += g.embed_add[i];
  }
}

std::size_t count_positives(std::span<const enc::GroundedInput> batch) {
  std::size_t n = 0;
  for (const auto& item : batch) {
    if (item.main_label == 1) ++n;
  }
  return n;
}

}  // namespace

ForwardResult forward(const ModelParams& p, const enc::GroundedInput& x,
                      bool train_mode, std::uint64_t rng_seed) {
  ExampleState s = run_forward(p, x, train_mode, rng_seed);
  return {s.detect, std::move(s.type), std::move(s.aux)};
}

double loss_main(std::span<const double> detect_probs,
                 std::span<const int> labels) {
  if (detect_probs.size() != labels.size()) {
    throw DimensionError("probability/label count mismatch");
  }
  if (detect_probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < detect_probs.size(); ++i) {
    sum += bce(detect_probs[i], static_cast<double>(labels[i]));
  }
  return sum / static_cast<double>(detect_probs.size());
}

double loss_type(const std::vector<std::vector<double>>& type_probs,
                 std::span<const int> type_labels,
                 std::span<const int> bias_labels) {
  if (type_probs.size() != type_labels.size() ||
      type_probs.size() != bias_labels.size()) {
    throw DimensionError("type loss input count mismatch");
  }
  double sum = 0.0;
  std::size_t applicable = 0;
  for (std::size_t i = 0; i < type_probs.size(); ++i) {
    if (bias_labels[i] != 1) continue;
    const auto k = static_cast<std::size_t>(type_labels[i]);
    if (k >= type_probs[i].size()) {
      throw DimensionError("type label out of range");
    }
    sum += -std::log(clamp_prob(type_probs[i][k]));
    ++applicable;
  }
  return applicable == 0 ? 0.0 : sum / static_cast<double>(applicable);
}

double loss_aux(const std::vector<std::vector<double>>& aux_probs,
                const std::vector<std::vector<std::uint8_t>>& aux_targets) {
  if (aux_probs.size() != aux_targets.size()) {
    throw DimensionError("aux loss input count mismatch");
  }
  if (aux_probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < aux_probs.size(); ++i) {
    if (aux_probs[i].size() != aux_targets[i].size()) {
      throw DimensionError("aux probability/target length mismatch");
    }
    if (aux_probs[i].empty()) continue;
    double row = 0.0;
    for (std::size_t m = 0; m < aux_probs[i].size(); ++m) {
      row += bce(aux_probs[i][m], static_cast<double>(aux_targets[i][m]));
    }
    sum += row / static_cast<double>(aux_probs[i].size());
  }
  return sum / static_cast<double>(aux_probs.size());
}

double loss_total(double main, double type_loss, double aux, double lambda) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  const double main_part = main + type_loss;
  if (lambda == 0.0) return main_part;  // exact ablation identity
  return main_part + lambda * aux;
}

BatchLoss batch_loss(const ModelParams& p,
                     std::span<const enc::GroundedInput> batch, double lambda,
                     bool train_mode, std::uint64_t dropout_seed) {
  if (batch.empty()) return {};
  const std::size_t positives = count_positives(batch);
  const double invB = 1.0 / static_cast<double>(batch.size());
  const double invP =
      positives > 0 ? 1.0 / static_cast<double>(positives) : 0.0;
  BatchLoss loss;
  const std::size_t M = p.dims.aux;
  const double invMB = M > 0 ? invB / static_cast<double>(M) : 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ExampleState s = run_forward(p, batch[i], train_mode,
                                 rng::mix(dropout_seed, i));
    const auto& input = batch[i];
    loss.main += bce(s.detect, static_cast<double>(input.main_label)) * invB;
    if (input.main_label == 1) {
      loss.type += -std::log(clamp_prob(
                       s.type[static_cast<std::size_t>(input.type_label)])) *
                   invP;
    }
    if (lambda > 0.0 && M > 0) {
      double row = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        row += bce(s.aux[m], static_cast<double>(input.aux_target[m]));
      }
      loss.aux += row * invMB;
    }
  }
  loss.total = loss_total(loss.main, loss.type, loss.aux, lambda);
  return loss;
}

BatchLoss batch_gradients_serial(const ModelParams& p,
                                 std::span<const enc::GroundedInput> batch,
                                 double lambda, bool train_mode,
                                 std::uint64_t dropout_seed,
                                 ModelParams& grad) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  BatchLoss loss;
  if (batch.empty()) return loss;
  const std::size_t positives = count_positives(batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const ExampleGrad g =
        example_gradient(p, batch[i], lambda, train_mode,
                         rng::mix(dropout_seed, i), batch.size(), positives);
    reduce_example(g, p.dims, grad, loss);
  }
  loss.total = loss_total(loss.main, loss.type, loss.aux, lambda);
  return loss;
}

BatchLoss batch_gradients(const ModelParams& p,
                          std::span<const enc::GroundedInput> batch,
                          double lambda, bool train_mode,
                          std::uint64_t dropout_seed, ModelParams& grad,
                          int threads) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  BatchLoss loss;
  if (batch.empty()) return loss;
  const std::size_t positives = count_positives(batch);
  std::vector<ExampleGrad> grads(batch.size());
  par::for_each_index(batch.size(), threads, [&](std::size_t i) {
    grads[i] =
        example_gradient(p, batch[i], lambda, train_mode,
                         rng::mix(dropout_seed, i), batch.size(), positives);
  });
  for (const auto& g : grads) {
    reduce_example(g, p.dims, grad, loss);
  }
  loss.total = loss_total(loss.main, loss.type, loss.aux, lambda);
  return loss;
}

void save_checkpoint(std::ostream& out, const ModelParams& p,
                     const CheckpointMeta& meta) {
  out << "ctxground-checkpoint v1\n";
  out << "grounded " << (meta.grounded ? 1 : 0) << '\n';
  out << "max_len " << meta.max_len << '\n';
  out << "types " << meta.type_names.size();
  for (const auto& name : meta.type_names) out << ' ' << name;
  out << '\n';
  out << "dropout " << text::format_double(p.dropout_rate) << '\n';
  out << "dims " << p.dims.vocab << ' ' << p.dims.embed << ' ' << p.dims.hidden
      << ' ' << p.dims.types << ' ' << p.dims.aux << '\n';
  for (const auto& [name, values] : p.tensors()) {
    out << "tensor " << name << ' ' << values->size() << '\n';
    for (std::size_t i = 0; i < values->size(); ++i) {
      out << text::format_double((*values)[i]);
      out << (((i + 1) % 8 == 0 || i + 1 == values->size()) ? '\n' : ' ');
    }
  }
}

void save_checkpoint_file(const ModelParams& p, const CheckpointMeta& meta,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  save_checkpoint(out, p, meta);
}

std::pair<ModelParams, CheckpointMeta> load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ctxground-checkpoint v1") {
    throw ConfigError("not a ctxground checkpoint (bad magic line)");
  }
  auto expect_key = [&in](const std::string& key) {
    std::string word;
    if (!(in >> word) || word != key) {
      throw ConfigError("checkpoint: expected '" + key + "'");
    }
  };
  CheckpointMeta meta;
  int grounded = 0;
  expect_key("grounded");
  in >> grounded;
  meta.grounded = grounded != 0;
  expect_key("max_len");
  in >> meta.max_len;
  expect_key("types");
  std::size_t n_types = 0;
  in >> n_types;
  meta.type_names.resize(n_types);
  for (auto& name : meta.type_names) in >> name;
  expect_key("dropout");
  double dropout = 0.0;
  in >> dropout;
  expect_key("dims");
  ModelDims dims;
  in >> dims.vocab >> dims.embed >> dims.hidden >> dims.types >> dims.aux;
  if (!in) throw ConfigError("checkpoint: malformed header");
  if (dims.types != n_types) {
    throw ConfigError("checkpoint: type count does not match dims");
  }

  ModelParams p = ModelParams::zeros(dims, dropout);
  for (auto& [name, values] : p.tensors()) {
    expect_key("tensor");
    std::string tensor_name;
    std::size_t count = 0;
    in >> tensor_name >> count;
    if (tensor_name != name || count != values->size()) {
      throw ConfigError("checkpoint: unexpected tensor '" + tensor_name +
                        "' (wanted '" + name + "')");
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> (*values)[i])) {
        throw ConfigError("checkpoint: truncated tensor '" + tensor_name +
                          "'");
      }
    }
  }
  return {std::move(p), std::move(meta)};
}

std::pair<ModelParams, CheckpointMeta> load_checkpoint_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace ctxg::nn

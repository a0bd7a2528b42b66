// Copyright 2026 The Offspan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offspan/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "offspan/errors.h"
#include "offspan/json_io.h"
#include "offspan/rng.h"

namespace offspan {
namespace {

constexpr char kMagic[8] = {'O', 'F', 'F', 'S', 'P', 'A', 'N', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

// Activations of one forward pass, kept for backprop.
struct Activations {
  Eigen::VectorXd pooled;
  Eigen::VectorXd hidden;
  Eigen::VectorXd logits;
  Eigen::VectorXd outputs;
};

Activations RunFromPooled(const Checkpoint& ckpt, Eigen::VectorXd pooled) {
  Activations a;
  a.pooled = std::move(pooled);
  a.hidden = (ckpt.hidden_weight() * a.pooled + ckpt.hidden_bias())
                 .array()
                 .tanh()
                 .matrix();
  a.logits = ckpt.head_weight() * a.hidden + ckpt.head_bias();
  if (ckpt.config().head == HeadKind::kBinary) {
    a.outputs = Softmax(a.logits);
  } else {
    a.outputs = a.logits.unaryExpr(&Sigmoid);
  }
  return a;
}

Eigen::VectorXd PoolSequence(const Checkpoint& ckpt,
                             std::span<const std::size_t> sequence) {
  const auto emb = ckpt.embeddings();
  if (sequence.size() < 2) {
    throw ShapeError("sequence needs at least BOS and EOS");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.cols());
  for (std::size_t idx : sequence) {
    if (idx >= static_cast<std::size_t>(emb.rows())) {
      throw ShapeError("embedding index " + std::to_string(idx) +
                       " out of range");
    }
    sum += emb.row(static_cast<Eigen::Index>(idx)).transpose();
  }
  return sum / static_cast<double>(sequence.size());
}

void CheckEmbeddingShape(const Checkpoint& ckpt, const Matrix& x) {
  if (x.rows() < 1 ||
      x.cols() != static_cast<Eigen::Index>(ckpt.config().embed_dim)) {
    throw ShapeError("embedding matrix must be (L, " +
                     std::to_string(ckpt.config().embed_dim) + "), got (" +
                     std::to_string(x.rows()) + ", " +
                     std::to_string(x.cols()) + ")");
  }
}

// Gradient of the hidden-layer input w.r.t. the pooled vector, given the
// gradient at the logits.
Eigen::VectorXd BackToPooled(const Checkpoint& ckpt, const Activations& a,
                             const Eigen::VectorXd& d_logits) {
  const Eigen::VectorXd d_hidden = ckpt.head_weight().transpose() * d_logits;
  const Eigen::VectorXd d_pre =
      d_hidden.array() * (1.0 - a.hidden.array().square());
  return ckpt.hidden_weight().transpose() * d_pre;
}

void PutU64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t GetU64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw Error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

HeadKind ParseHeadKind(std::string_view name) {
  if (name == "binary") return HeadKind::kBinary;
  if (name == "multilabel3") return HeadKind::kMultilabel3;
  throw ConfigError("unknown head '" + std::string(name) + "'");
}

std::string_view HeadKindName(HeadKind head) {
  return head == HeadKind::kBinary ? "binary" : "multilabel3";
}

void ModelConfig::Validate() const {
  if (vocab_buckets < 1 || embed_dim < 1 || hidden_dim < 1) {
    throw ConfigError("model dimensions must be >= 1");
  }
  if (max_seq_length < 3) throw ConfigError("max_seq_length must be >= 3");
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(warmup_ratio >= 0 && warmup_ratio <= 1)) {
    throw ConfigError("warmup_ratio must be in [0, 1]");
  }
  if (!(weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (init != "glorot") throw ConfigError("only glorot init is supported");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
}

std::vector<ParameterSegment> ParameterLayout(const ModelConfig& config) {
  std::vector<ParameterSegment> layout;
  std::size_t offset = 0;
  auto add = [&](const char* name, std::size_t rows, std::size_t cols) {
    layout.push_back({name, offset, rows, cols});
    offset += rows * cols;
  };
  add("embedding", config.embedding_rows(), config.embed_dim);
  add("hidden.weight", config.hidden_dim, config.embed_dim);
  add("hidden.bias", config.hidden_dim, 1);
  add("head.weight", config.num_outputs(), config.hidden_dim);
  add("head.bias", config.num_outputs(), 1);
  return layout;
}

std::size_t ParameterCount(const ModelConfig& config) {
  const auto layout = ParameterLayout(config);
  return layout.back().offset + layout.back().size();
}

Checkpoint::Checkpoint(ModelConfig config, std::vector<double> parameters,
                       TrainMeta meta)
    : config_(config),
      parameters_(std::move(parameters)),
      meta_(meta),
      layout_(ParameterLayout(config)) {
  config_.Validate();
  if (parameters_.size() != ParameterCount(config_)) {
    throw ShapeError("parameter count " + std::to_string(parameters_.size()) +
                     " does not match config (" +
                     std::to_string(ParameterCount(config_)) + ")");
  }
  for (const ParameterSegment& seg : layout_) {
    const auto begin = parameters_.begin() + seg.offset;
    if (!std::all_of(begin, begin + seg.size(),
                     [](double v) { return std::isfinite(v); })) {
      non_finite_segment_ = seg.name;
      break;
    }
  }
}

Checkpoint Checkpoint::Zeros(const ModelConfig& config) {
  return Checkpoint(config, std::vector<double>(ParameterCount(config), 0.0));
}

Checkpoint Checkpoint::Initialize(const ModelConfig& config,
                                  std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  std::vector<double> params(ParameterCount(config), 0.0);
  for (const ParameterSegment& seg : ParameterLayout(config)) {
    if (seg.cols == 1) continue;  // biases start at zero
    // Embedding rows are treated as the output of a one-hot projection.
    const double fan_in = seg.name == "embedding" ? 1.0 : seg.cols;
    const double fan_out = seg.name == "embedding" ? seg.cols : seg.rows;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t r = 0; r < seg.rows; ++r) {
      // PAD stays zero so the IG baseline carries no token signal. MASK is
      // an ordinary row that training never touches, like a transformer's
      // [MASK] under classification fine-tuning.
      if (seg.name == "embedding" && r == kPadIndex) continue;
      for (std::size_t c = 0; c < seg.cols; ++c) {
        params[seg.offset + r * seg.cols + c] =
            (2.0 * rng.Uniform() - 1.0) * limit;
      }
    }
  }
  return Checkpoint(config, std::move(params));
}

std::span<const double> Checkpoint::segment(std::string_view name) const {
  for (const ParameterSegment& seg : layout_) {
    if (seg.name == name) {
      return std::span<const double>(parameters_).subspan(seg.offset,
                                                          seg.size());
    }
  }
  throw Error("no parameter segment '" + std::string(name) + "'");
}

void Checkpoint::CheckFinite() const {
  if (non_finite_segment_) throw ModelFault(*non_finite_segment_);
}

Eigen::Map<const Matrix> Checkpoint::embeddings() const {
  return {parameters_.data() + layout_[0].offset,
          static_cast<Eigen::Index>(layout_[0].rows),
          static_cast<Eigen::Index>(layout_[0].cols)};
}

Eigen::Map<const Matrix> Checkpoint::hidden_weight() const {
  return {parameters_.data() + layout_[1].offset,
          static_cast<Eigen::Index>(layout_[1].rows),
          static_cast<Eigen::Index>(layout_[1].cols)};
}

Eigen::Map<const Eigen::VectorXd> Checkpoint::hidden_bias() const {
  return {parameters_.data() + layout_[2].offset,
          static_cast<Eigen::Index>(layout_[2].rows)};
}

Eigen::Map<const Matrix> Checkpoint::head_weight() const {
  return {parameters_.data() + layout_[3].offset,
          static_cast<Eigen::Index>(layout_[3].rows),
          static_cast<Eigen::Index>(layout_[3].cols)};
}

Eigen::Map<const Eigen::VectorXd> Checkpoint::head_bias() const {
  return {parameters_.data() + layout_[4].offset,
          static_cast<Eigen::Index>(layout_[4].rows)};
}

std::size_t TokenBucket(std::string_view token, const ModelConfig& config) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return kNumSpecialRows + static_cast<std::size_t>(h % config.vocab_buckets);
}

std::vector<std::size_t> Encode(std::string_view text,
                                const ModelConfig& config,
                                std::string_view mask_token) {
  const auto tokens = Tokenize(text);
  const std::size_t keep =
      std::min(tokens.size(), config.max_seq_length - 2);
  std::vector<std::size_t> seq;
  seq.reserve(keep + 2);
  seq.push_back(kBosIndex);
  for (std::size_t i = 0; i < keep; ++i) {
    seq.push_back(tokens[i].text == mask_token
                      ? kMaskIndex
                      : TokenBucket(tokens[i].text, config));
  }
  seq.push_back(kEosIndex);
  return seq;
}

Matrix LookupEmbeddings(const Checkpoint& checkpoint,
                        std::span<const std::size_t> sequence) {
  const auto emb = checkpoint.embeddings();
  Matrix x(static_cast<Eigen::Index>(sequence.size()), emb.cols());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence[i] >= static_cast<std::size_t>(emb.rows())) {
      throw ShapeError("embedding index out of range");
    }
    x.row(static_cast<Eigen::Index>(i)) =
        emb.row(static_cast<Eigen::Index>(sequence[i]));
  }
  return x;
}

std::vector<double> Forward(const Checkpoint& checkpoint,
                            std::span<const std::size_t> sequence) {
  checkpoint.CheckFinite();
  const Activations a =
      RunFromPooled(checkpoint, PoolSequence(checkpoint, sequence));
  return {a.outputs.data(), a.outputs.data() + a.outputs.size()};
}

std::vector<double> ForwardFromEmbeddings(const Checkpoint& checkpoint,
                                          const Matrix& embeddings) {
  checkpoint.CheckFinite();
  CheckEmbeddingShape(checkpoint, embeddings);
  const Activations a = RunFromPooled(
      checkpoint, embeddings.colwise().mean().transpose());
  return {a.outputs.data(), a.outputs.data() + a.outputs.size()};
}

Matrix InputGradient(const Checkpoint& checkpoint, const Matrix& embeddings,
                     std::size_t output_index, GradientTarget target) {
  checkpoint.CheckFinite();
  CheckEmbeddingShape(checkpoint, embeddings);
  const std::size_t outputs = checkpoint.config().num_outputs();
  if (output_index >= outputs) {
    throw ShapeError("output index " + std::to_string(output_index) +
                     " invalid for head with " + std::to_string(outputs) +
                     " outputs");
  }
  const Activations a = RunFromPooled(
      checkpoint, embeddings.colwise().mean().transpose());
  const auto k = static_cast<Eigen::Index>(output_index);

  Eigen::VectorXd d_logits = Eigen::VectorXd::Zero(a.logits.size());
  if (target == GradientTarget::kLogit) {
    d_logits(k) = 1.0;
  } else if (checkpoint.config().head == HeadKind::kBinary) {
    // d p_k / d z_j = p_k (delta_kj - p_j)
    d_logits = -a.outputs(k) * a.outputs;
    d_logits(k) += a.outputs(k);
  } else {
    d_logits(k) = a.outputs(k) * (1.0 - a.outputs(k));
  }

  const Eigen::VectorXd d_pooled = BackToPooled(checkpoint, a, d_logits);
  // Mean pooling spreads the pooled gradient evenly over every row.
  Matrix grad(embeddings.rows(), embeddings.cols());
  grad.rowwise() =
      (d_pooled / static_cast<double>(embeddings.rows())).transpose();
  return grad;
}

std::vector<double> TargetFor(const Comment& comment, HeadKind head) {
  if (head == HeadKind::kBinary) {
    if (!comment.binary_label) {
      throw ConfigError("comment '" + comment.id +
                        "' has no binary label for a binary head");
    }
    return *comment.binary_label == 1 ? std::vector<double>{0.0, 1.0}
                                      : std::vector<double>{1.0, 0.0};
  }
  if (!comment.position_labels) {
    throw ConfigError("comment '" + comment.id +
                      "' has no position labels for a multilabel head");
  }
  const PositionLabels& bits = *comment.position_labels;
  return {double(bits[0]), double(bits[1]), double(bits[2])};
}

double LossAndGradient(const Checkpoint& checkpoint,
                       std::span<const std::size_t> sequence,
                       std::span<const double> target,
                       std::vector<double>* gradient, double scale) {
  const ModelConfig& config = checkpoint.config();
  if (target.size() != config.num_outputs()) {
    throw ShapeError("target size does not match head");
  }
  const Activations a =
      RunFromPooled(checkpoint, PoolSequence(checkpoint, sequence));
  const auto n_out = static_cast<Eigen::Index>(config.num_outputs());
  const Eigen::Map<const Eigen::VectorXd> t(target.data(), n_out);

  double loss = 0.0;
  Eigen::VectorXd d_logits;
  if (config.head == HeadKind::kBinary) {
    const double lse =
        a.logits.maxCoeff() +
        std::log((a.logits.array() - a.logits.maxCoeff()).exp().sum());
    loss = -(t.array() * (a.logits.array() - lse)).sum();
    d_logits = a.outputs * t.sum() - t;
  } else {
    for (Eigen::Index j = 0; j < n_out; ++j) {
      loss += Softplus(a.logits(j)) - t(j) * a.logits(j);
    }
    d_logits = a.outputs - t;
  }
  if (gradient == nullptr) return loss;

  if (gradient->size() != checkpoint.parameters().size()) {
    throw ShapeError("gradient buffer has the wrong size");
  }
  const auto layout = ParameterLayout(config);
  double* g = gradient->data();
  d_logits *= scale;

  Eigen::Map<Matrix>(g + layout[3].offset, n_out,
                     static_cast<Eigen::Index>(config.hidden_dim)) +=
      d_logits * a.hidden.transpose();
  Eigen::Map<Eigen::VectorXd>(g + layout[4].offset, n_out) += d_logits;

  const Eigen::VectorXd d_hidden = checkpoint.head_weight().transpose() * d_logits;
  const Eigen::VectorXd d_pre =
      d_hidden.array() * (1.0 - a.hidden.array().square());
  const auto hidden = static_cast<Eigen::Index>(config.hidden_dim);
  const auto dim = static_cast<Eigen::Index>(config.embed_dim);
  Eigen::Map<Matrix>(g + layout[1].offset, hidden, dim) +=
      d_pre * a.pooled.transpose();
  Eigen::Map<Eigen::VectorXd>(g + layout[2].offset, hidden) += d_pre;

  const Eigen::VectorXd d_row = checkpoint.hidden_weight().transpose() *
                                d_pre / static_cast<double>(sequence.size());
  for (std::size_t idx : sequence) {
    Eigen::Map<Eigen::VectorXd>(g + layout[0].offset + idx * config.embed_dim,
                                dim) += d_row;
  }
  return loss;
}

namespace {

struct Example {
  std::vector<std::size_t> sequence;
  std::vector<double> target;
};

double MeanLoss(const Checkpoint& ckpt, const std::vector<Example>& examples,
                std::span<const std::size_t> indices) {
  if (indices.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i : indices) {
    total += LossAndGradient(ckpt, examples[i].sequence, examples[i].target,
                             nullptr);
  }
  return total / static_cast<double>(indices.size());
}

}  // namespace

Checkpoint Train(std::span<const Comment> dataset, const ModelConfig& config,
                 const TrainConfig& train_config) {
  config.Validate();
  train_config.Validate();
  if (dataset.empty()) throw ConfigError("training dataset is empty");

  std::vector<Example> examples;
  examples.reserve(dataset.size());
  for (const Comment& c : dataset) {
    examples.push_back({Encode(c.text, config), TargetFor(c, config.head)});
  }

  // Seeded 10% held-out split for checkpoint selection.
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(DeriveSeed(config.seed, "split"));
  split_rng.Shuffle(order);
  const std::size_t held_count = examples.size() >= 10 ? examples.size() / 10 : 0;
  std::vector<std::size_t> held(order.begin(), order.begin() + held_count);
  std::vector<std::size_t> train(order.begin() + held_count, order.end());
  std::sort(held.begin(), held.end());

  Checkpoint current =
      Checkpoint::Initialize(config, DeriveSeed(config.seed, "init"));
  std::vector<double>& params = current.parameters_;
  const auto layout = ParameterLayout(config);
  const std::size_t dim = config.embed_dim;

  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  // Per-row step counters for the lazily updated embedding rows.
  std::vector<std::uint64_t> row_steps(config.embedding_rows(), 0);

  const std::size_t batches_per_epoch =
      (train.size() + train_config.batch_size - 1) / train_config.batch_size;
  const std::size_t total_steps = batches_per_epoch * train_config.epochs;
  const auto warmup_steps = static_cast<std::size_t>(
      std::ceil(train_config.warmup_ratio * static_cast<double>(total_steps)));

  TrainMeta meta;
  meta.seed = config.seed;
  meta.initial_train_loss = MeanLoss(current, examples, train);

  std::vector<double> best_params = params;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  double best_train_loss = meta.initial_train_loss;

  Rng shuffle_rng(DeriveSeed(config.seed, "shuffle"));
  std::size_t step = 0;
  std::vector<std::size_t> touched_rows;

  auto adam_update = [&](std::size_t j, double lr, std::uint64_t t,
                         bool decay) {
    const double g = grad[j];
    m1[j] = kAdamBeta1 * m1[j] + (1.0 - kAdamBeta1) * g;
    m2[j] = kAdamBeta2 * m2[j] + (1.0 - kAdamBeta2) * g * g;
    const double m_hat = m1[j] / (1.0 - std::pow(kAdamBeta1, double(t)));
    const double v_hat = m2[j] / (1.0 - std::pow(kAdamBeta2, double(t)));
    if (decay) params[j] -= lr * train_config.weight_decay * params[j];
    params[j] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    grad[j] = 0.0;
  };

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    shuffle_rng.Shuffle(train);
    for (std::size_t b = 0; b < train.size(); b += train_config.batch_size) {
      const std::size_t end = std::min(train.size(), b + train_config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - b);
      touched_rows.clear();
      for (std::size_t i = b; i < end; ++i) {
        const Example& ex = examples[train[i]];
        LossAndGradient(current, ex.sequence, ex.target, &grad, scale);
        touched_rows.insert(touched_rows.end(), ex.sequence.begin(),
                            ex.sequence.end());
      }
      std::sort(touched_rows.begin(), touched_rows.end());
      touched_rows.erase(std::unique(touched_rows.begin(), touched_rows.end()),
                         touched_rows.end());

      ++step;
      const double lr =
          warmup_steps > 0 && step <= warmup_steps
              ? train_config.learning_rate * double(step) / double(warmup_steps)
              : train_config.learning_rate;

      // Embedding rows absent from the batch keep their moments untouched.
      for (std::size_t row : touched_rows) {
        const std::uint64_t t = ++row_steps[row];
        for (std::size_t c = 0; c < dim; ++c) {
          adam_update(row * dim + c, lr, t, true);
        }
      }
      for (std::size_t s = 1; s < layout.size(); ++s) {
        const bool decay = layout[s].cols > 1;
        for (std::size_t j = layout[s].offset;
             j < layout[s].offset + layout[s].size(); ++j) {
          adam_update(j, lr, step, decay);
        }
      }
    }

    const double train_loss = MeanLoss(current, examples, train);
    const double held_loss =
        held.empty() ? train_loss : MeanLoss(current, examples, held);
    if (held_loss < best_loss) {
      best_loss = held_loss;
      best_params = params;
      best_epoch = epoch;
      best_train_loss = train_loss;
    }
    meta.epochs_run = epoch;
  }

  meta.best_epoch = best_epoch;
  meta.final_loss = best_loss;
  meta.final_train_loss = best_train_loss;
  return Checkpoint(config, std::move(best_params), meta);
}

void WriteCheckpoint(std::ostream& out, const Checkpoint& checkpoint) {
  nlohmann::ordered_json header;
  header["format"] = "offspan-checkpoint";
  header["version"] = kCheckpointVersion;
  header["config"] = checkpoint.config();
  header["train_meta"] = checkpoint.meta();
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const ParameterSegment& seg : ParameterLayout(checkpoint.config())) {
    segments.push_back({{"name", seg.name}, {"rows", seg.rows},
                        {"cols", seg.cols}});
  }
  header["segments"] = segments;
  const std::string text = header.dump();

  out.write(kMagic, sizeof(kMagic));
  PutU64(out, kCheckpointVersion);
  PutU64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : checkpoint.parameters()) {
    PutU64(out, std::bit_cast<std::uint64_t>(v));
  }
}

Checkpoint ReadCheckpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("not an offspan checkpoint");
  }
  if (GetU64(in) != kCheckpointVersion) {
    throw Error("unsupported checkpoint version");
  }
  const std::uint64_t header_size = GetU64(in);
  if (header_size > (1u << 24)) throw Error("corrupt checkpoint header size");
  std::string text(header_size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_size));
  if (!in) throw Error("truncated checkpoint header");

  const auto header = nlohmann::json::parse(text);
  const ModelConfig config = header.at("config").get<ModelConfig>();
  config.Validate();
  const TrainMeta meta = header.at("train_meta").get<TrainMeta>();

  const auto expected = ParameterLayout(config);
  const auto& segments = header.at("segments");
  if (segments.size() != expected.size()) {
    throw ShapeError("checkpoint segment table does not match config");
  }
  for (std::size_t s = 0; s < expected.size(); ++s) {
    if (segments[s].at("name").get<std::string>() != expected[s].name ||
        segments[s].at("rows").get<std::size_t>() != expected[s].rows ||
        segments[s].at("cols").get<std::size_t>() != expected[s].cols) {
      throw ShapeError("segment '" + expected[s].name +
                       "' has the wrong shape");
    }
  }
  std::vector<double> params(ParameterCount(config));
  for (double& v : params) v = std::bit_cast<double>(GetU64(in));
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ShapeError("trailing data after parameters");
  }
  Checkpoint ckpt(config, std::move(params), meta);
  ckpt.CheckFinite();
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  WriteCheckpoint(out, checkpoint);
  if (!out) throw Error("write failed for '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return ReadCheckpoint(in);
}

}  // namespace offspan

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

#include "offspan/lime.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "offspan/errors.h"
#include "offspan/rng.h"

namespace offspan {
namespace {

// Pivots below this fraction of the largest one count as zero.
constexpr double kRankThreshold = 1e-10;

std::size_t DefaultOutput(const Checkpoint& checkpoint,
                          const Comment& comment, const LimeConfig& config) {
  if (config.explained_output) {
    if (*config.explained_output >= checkpoint.config().num_outputs()) {
      throw ConfigError("explained_output out of range for head");
    }
    return *config.explained_output;
  }
  if (checkpoint.config().head == HeadKind::kBinary) return kOffensiveOutput;
  const auto out =
      Forward(checkpoint, Encode(comment.text, checkpoint.config(),
                                 config.mask_token));
  return static_cast<std::size_t>(
      std::max_element(out.begin(), out.end()) - out.begin());
}

TextScorer ModelScorer(const Checkpoint& checkpoint,
                       const LimeConfig& config) {
  return [&checkpoint, &config](const std::string& text) {
    return Forward(checkpoint,
                   Encode(text, checkpoint.config(), config.mask_token));
  };
}

}  // namespace

void LimeConfig::Validate() const {
  if (num_samples < 1) throw ConfigError("num_samples must be >= 1");
  if (!(kernel_width > 0)) throw ConfigError("kernel_width must be > 0");
  if (!(ridge_lambda >= 0)) throw ConfigError("ridge_lambda must be >= 0");
  if (mask_token.empty()) throw ConfigError("mask_token must not be empty");
}

std::string ApplyKeepMask(std::string_view text,
                          std::span<const TokenSpan> tokens,
                          const KeepMask& mask, std::string_view mask_token) {
  if (mask.size() != tokens.size()) {
    throw ShapeError("keep mask length does not match token count");
  }
  const std::u32string chars = DecodeUtf8(text);
  const std::u32string replacement = DecodeUtf8(mask_token);
  std::u32string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const CharRange r = tokens[i].range;
    out.append(chars, cursor, r.start - cursor);
    if (mask[i]) {
      out.append(chars, r.start, r.size());
    } else {
      out.append(replacement);
    }
    cursor = r.end;
  }
  out.append(chars, cursor, std::u32string::npos);
  return EncodeUtf8(out);
}

std::vector<PerturbedSample> Perturb(std::string_view text,
                                     std::span<const TokenSpan> tokens,
                                     std::size_t num_samples,
                                     std::uint64_t seed,
                                     std::string_view mask_token) {
  const std::size_t n = tokens.size();
  if (n == 0) throw Error("cannot perturb a comment with no tokens");
  Rng rng(seed);
  std::vector<PerturbedSample> samples;
  samples.reserve(num_samples);
  for (std::size_t s = 0; s < num_samples; ++s) {
    KeepMask mask(n, 1);
    if (s > 0) {
      const std::size_t k = 1 + rng.Below(n);
      for (std::size_t pos : rng.Choose(n, k)) mask[pos] = 0;
    }
    std::string perturbed = ApplyKeepMask(text, tokens, mask, mask_token);
    samples.push_back({std::move(mask), std::move(perturbed)});
  }
  return samples;
}

double ProximityWeight(const KeepMask& mask, double kernel_width) {
  if (mask.empty()) throw ShapeError("empty mask");
  const auto masked = std::count(mask.begin(), mask.end(), 0);
  const double d = static_cast<double>(masked) / static_cast<double>(mask.size());
  return std::exp(-(d * d) / (kernel_width * kernel_width));
}

SurrogateFit FitSurrogate(std::span<const KeepMask> masks,
                          std::span<const double> outputs,
                          std::span<const double> weights, double lambda) {
  if (masks.empty()) throw ShapeError("surrogate needs at least one sample");
  if (masks.size() != outputs.size() || masks.size() != weights.size()) {
    throw ShapeError("masks, outputs and weights differ in length");
  }
  if (!(lambda >= 0)) throw ConfigError("ridge lambda must be >= 0");
  const std::size_t n = masks.front().size();
  const auto cols = static_cast<Eigen::Index>(n + 1);
  const auto rows = static_cast<Eigen::Index>(masks.size());

  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  Eigen::VectorXd w(rows);
  for (Eigen::Index s = 0; s < rows; ++s) {
    const KeepMask& m = masks[static_cast<std::size_t>(s)];
    if (m.size() != n) throw ShapeError("masks differ in length");
    design(s, 0) = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      design(s, static_cast<Eigen::Index>(j + 1)) = m[j] ? 1.0 : 0.0;
    }
    y(s) = outputs[static_cast<std::size_t>(s)];
    w(s) = weights[static_cast<std::size_t>(s)];
  }

  Eigen::MatrixXd normal = design.transpose() * w.asDiagonal() * design;
  normal.diagonal().tail(cols - 1).array() += lambda;
  const Eigen::VectorXd rhs = design.transpose() * (w.array() * y.array()).matrix();

  // A positive ridge makes the system definite, but a huge lambda leaves the
  // intercept pivot tiny relative to the rest. The strict threshold only
  // applies to the unregularized fit.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  if (lambda == 0) qr.setThreshold(kRankThreshold);
  if (qr.rank() < cols) {
    throw RankDeficientError("surrogate normal equations have rank " +
                             std::to_string(qr.rank()) + " < " +
                             std::to_string(cols) +
                             "; add samples or use ridge_lambda > 0");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);

  const Eigen::VectorXd fitted = design * beta;
  const double w_sum = w.sum();
  const double y_mean = w.dot(y) / w_sum;
  const double ss_res = (w.array() * (y - fitted).array().square()).sum();
  const double ss_tot = (w.array() * (y.array() - y_mean).square()).sum();

  SurrogateFit fit;
  fit.intercept = beta(0);
  fit.coefficients.assign(beta.data() + 1, beta.data() + cols);
  if (ss_tot <= 1e-300) {
    fit.weighted_r2 = ss_res <= 1e-300 ? 1.0 : 0.0;
  } else {
    fit.weighted_r2 = 1.0 - ss_res / ss_tot;
  }
  return fit;
}

std::vector<Attribution> ExplainWithScorer(
    std::string_view text, const TextScorer& score,
    std::span<const std::size_t> outputs, const LimeConfig& config) {
  config.Validate();
  const std::vector<TokenSpan> tokens = Tokenize(text);
  if (tokens.empty()) throw Error("cannot explain a comment with no tokens");

  const auto samples = Perturb(text, tokens, config.num_samples, config.seed,
                               config.mask_token);
  std::vector<KeepMask> masks;
  std::vector<double> weights;
  std::vector<std::vector<double>> scored;
  masks.reserve(samples.size());
  weights.reserve(samples.size());
  scored.reserve(samples.size());
  for (const PerturbedSample& s : samples) {
    masks.push_back(s.mask);
    weights.push_back(ProximityWeight(s.mask, config.kernel_width));
    scored.push_back(score(s.text));
  }

  std::vector<Attribution> result;
  std::vector<double> y(samples.size());
  for (std::size_t output : outputs) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (output >= scored[s].size()) {
        throw ShapeError("scorer returned too few outputs");
      }
      y[s] = scored[s][output];
    }
    SurrogateFit fit = FitSurrogate(masks, y, weights, config.ridge_lambda);
    Attribution a;
    a.tokens = tokens;
    a.scores = std::move(fit.coefficients);
    a.explained_output = output;
    a.diagnostics.weighted_r2 = fit.weighted_r2;
    a.diagnostics.sample_count = samples.size();
    result.push_back(std::move(a));
  }
  return result;
}

Attribution ExplainLime(const Checkpoint& checkpoint, const Comment& comment,
                        const LimeConfig& config) {
  const std::size_t output = DefaultOutput(checkpoint, comment, config);
  const std::size_t outputs[] = {output};
  return ExplainWithScorer(comment.text, ModelScorer(checkpoint, config),
                           outputs, config)
      .front();
}

std::vector<Attribution> ExplainLimeAllOutputs(const Checkpoint& checkpoint,
                                               const Comment& comment,
                                               const LimeConfig& config) {
  std::vector<std::size_t> outputs(checkpoint.config().num_outputs());
  for (std::size_t k = 0; k < outputs.size(); ++k) outputs[k] = k;
  return ExplainWithScorer(comment.text, ModelScorer(checkpoint, config),
                           outputs, config);
}

}  // namespace offspan

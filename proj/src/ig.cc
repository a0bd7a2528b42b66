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

#include "offspan/ig.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "offspan/errors.h"

namespace offspan {

RiemannScheme ParseRiemannScheme(std::string_view name) {
  if (name == "right") return RiemannScheme::kRight;
  if (name == "trapezoid") return RiemannScheme::kTrapezoid;
  throw ConfigError("unknown Riemann scheme '" + std::string(name) + "'");
}

std::string_view RiemannSchemeName(RiemannScheme scheme) {
  return scheme == RiemannScheme::kRight ? "right" : "trapezoid";
}

void IgConfig::Validate() const {
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (!(completeness_tolerance > 0)) {
    throw ConfigError("completeness_tolerance must be > 0");
  }
}

Matrix MakeBaseline(const Checkpoint& checkpoint,
                    std::span<const std::size_t> sequence) {
  if (sequence.size() < 2 || sequence.front() != kBosIndex ||
      sequence.back() != kEosIndex) {
    throw ShapeError("baseline needs a sequence framed by BOS and EOS");
  }
  Matrix baseline = LookupEmbeddings(checkpoint, sequence);
  const auto pad = checkpoint.embeddings().row(kPadIndex);
  for (Eigen::Index i = 1; i + 1 < baseline.rows(); ++i) baseline.row(i) = pad;
  return baseline;
}

Matrix IntegratedGradients(const Checkpoint& checkpoint, const Matrix& input,
                           const Matrix& baseline, std::size_t steps,
                           std::size_t output_index, RiemannScheme scheme) {
  if (input.rows() != baseline.rows() || input.cols() != baseline.cols()) {
    throw ShapeError("input and baseline shapes differ");
  }
  if (steps < 1) throw ConfigError("steps must be >= 1");
  const Matrix delta = input - baseline;
  Matrix grad_sum = Matrix::Zero(input.rows(), input.cols());
  const double m = static_cast<double>(steps);
  // Fixed summation order keeps the result bit-reproducible.
  if (scheme == RiemannScheme::kRight) {
    for (std::size_t s = 1; s <= steps; ++s) {
      const double alpha = static_cast<double>(s) / m;
      grad_sum += InputGradient(checkpoint, baseline + alpha * delta,
                                output_index);
    }
    grad_sum /= m;
  } else {
    for (std::size_t s = 0; s <= steps; ++s) {
      const double alpha = static_cast<double>(s) / m;
      const double w = (s == 0 || s == steps) ? 0.5 : 1.0;
      grad_sum += w * InputGradient(checkpoint, baseline + alpha * delta,
                                    output_index);
    }
    grad_sum /= m;
  }
  return delta.cwiseProduct(grad_sum);
}

Attribution ExplainIgOutput(const Checkpoint& checkpoint,
                            const Comment& comment, const IgConfig& config,
                            std::size_t output_index) {
  config.Validate();
  const std::vector<TokenSpan> tokens = Tokenize(comment.text);
  if (tokens.empty()) throw Error("cannot explain a comment with no tokens");
  if (output_index >= checkpoint.config().num_outputs()) {
    throw ConfigError("explained_output out of range for head");
  }

  const auto sequence = Encode(comment.text, checkpoint.config());
  const Matrix input = LookupEmbeddings(checkpoint, sequence);
  const Matrix baseline = MakeBaseline(checkpoint, sequence);
  const Matrix cells = IntegratedGradients(checkpoint, input, baseline,
                                           config.steps, output_index,
                                           config.scheme);

  Attribution a;
  a.tokens = tokens;
  a.explained_output = output_index;
  a.scores.assign(tokens.size(), 0.0);
  // Row i + 1 holds token i; tokens past the truncation point score 0.
  const std::size_t content_rows = sequence.size() - 2;
  for (std::size_t i = 0; i < content_rows; ++i) {
    a.scores[i] = cells.row(static_cast<Eigen::Index>(i + 1)).sum();
  }

  const double f_input = ForwardFromEmbeddings(checkpoint, input)[output_index];
  const double f_base =
      ForwardFromEmbeddings(checkpoint, baseline)[output_index];
  const double residual = std::abs(cells.sum() - (f_input - f_base));
  a.diagnostics.completeness_residual = residual;
  a.diagnostics.output_delta = f_input - f_base;
  a.diagnostics.steps = config.steps;
  if (residual > config.completeness_tolerance) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "completeness residual %.6g exceeds tolerance %.6g",
                  residual, config.completeness_tolerance);
    a.diagnostics.warnings.emplace_back(buf);
  }
  return a;
}

Attribution ExplainIg(const Checkpoint& checkpoint, const Comment& comment,
                      const IgConfig& config) {
  std::size_t output = kOffensiveOutput;
  if (config.explained_output) {
    output = *config.explained_output;
  } else if (checkpoint.config().head == HeadKind::kMultilabel3) {
    const auto out = Forward(checkpoint, Encode(comment.text, checkpoint.config()));
    output = static_cast<std::size_t>(
        std::max_element(out.begin(), out.end()) - out.begin());
  }
  return ExplainIgOutput(checkpoint, comment, config, output);
}

}  // namespace offspan

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

// LIME token attributions.
//
// Each perturbed sample is described by a keep-mask over the comment's
// tokens: bit 1 keeps the original token, bit 0 replaces it with the mask
// token. (The augmentation masks in augment.h use the opposite polarity,
// 1 = replace.)

#ifndef OFFSPAN_LIME_H_
#define OFFSPAN_LIME_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offspan/attribution.h"
#include "offspan/corpus.h"
#include "offspan/model.h"

namespace offspan {

struct LimeConfig {
  std::size_t num_samples = 5000;
  double kernel_width = 25.0;
  double ridge_lambda = 1.0;
  std::string mask_token = "[MASK]";
  std::uint64_t seed = 0;
  // Explained head output. Unset: the offensive class for binary heads, the
  // highest-scoring label on the unperturbed comment for multilabel heads.
  std::optional<std::size_t> explained_output;

  void Validate() const;
};

using KeepMask = std::vector<std::uint8_t>;

struct PerturbedSample {
  KeepMask mask;
  std::string text;
};

// Sample 0 is the unperturbed comment. Every later sample masks k positions,
// k uniform in [1, n], positions uniform without replacement.
std::vector<PerturbedSample> Perturb(std::string_view text,
                                     std::span<const TokenSpan> tokens,
                                     std::size_t num_samples,
                                     std::uint64_t seed,
                                     std::string_view mask_token = "[MASK]");

// Rebuilds `text` with every token whose keep bit is 0 replaced.
std::string ApplyKeepMask(std::string_view text,
                          std::span<const TokenSpan> tokens,
                          const KeepMask& mask, std::string_view mask_token);

// exp(-d^2 / width^2) with d the masked fraction.
double ProximityWeight(const KeepMask& mask, double kernel_width);

struct SurrogateFit {
  std::vector<double> coefficients;  // one per mask position
  double intercept = 0.0;
  double weighted_r2 = 0.0;
};

// Weighted ridge regression of outputs on mask bits; the intercept is not
// penalized. Throws RankDeficientError when the normal equations are
// singular.
SurrogateFit FitSurrogate(std::span<const KeepMask> masks,
                          std::span<const double> outputs,
                          std::span<const double> weights, double lambda);

// Model-agnostic core: `score` maps a perturbed text to every head output.
// Returns one attribution per requested output, all sharing one sample set.
using TextScorer = std::function<std::vector<double>(const std::string&)>;
std::vector<Attribution> ExplainWithScorer(
    std::string_view text, const TextScorer& score,
    std::span<const std::size_t> outputs, const LimeConfig& config);

Attribution ExplainLime(const Checkpoint& checkpoint, const Comment& comment,
                        const LimeConfig& config);
// All head outputs at once (used for multilabel merging).
std::vector<Attribution> ExplainLimeAllOutputs(const Checkpoint& checkpoint,
                                               const Comment& comment,
                                               const LimeConfig& config);

}  // namespace offspan

#endif  // OFFSPAN_LIME_H_

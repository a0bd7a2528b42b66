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

// Integrated gradients over input embeddings.
//
// The baseline keeps the BOS and EOS rows and replaces every content row
// with the PAD embedding, so it carries no token information but is still a
// valid model input.

#ifndef OFFSPAN_IG_H_
#define OFFSPAN_IG_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "offspan/attribution.h"
#include "offspan/corpus.h"
#include "offspan/model.h"

namespace offspan {

enum class RiemannScheme { kRight, kTrapezoid };

RiemannScheme ParseRiemannScheme(std::string_view name);
std::string_view RiemannSchemeName(RiemannScheme scheme);

struct IgConfig {
  std::size_t steps = 50;
  RiemannScheme scheme = RiemannScheme::kRight;
  // Unset: offensive class (binary) or highest-scoring label (multilabel).
  std::optional<std::size_t> explained_output;
  double completeness_tolerance = 0.05;

  void Validate() const;
};

Matrix MakeBaseline(const Checkpoint& checkpoint,
                    std::span<const std::size_t> sequence);

// Attribution per embedding cell:
//   (x - x') * mean over s = 1..m of dF/dx at x' + (s/m)(x - x')
// with F the head output `output_index`. The trapezoid scheme averages
// both interval endpoints instead.
Matrix IntegratedGradients(const Checkpoint& checkpoint, const Matrix& input,
                           const Matrix& baseline, std::size_t steps,
                           std::size_t output_index,
                           RiemannScheme scheme = RiemannScheme::kRight);

Attribution ExplainIg(const Checkpoint& checkpoint, const Comment& comment,
                      const IgConfig& config);
// Same with an explicit output, ignoring config.explained_output.
Attribution ExplainIgOutput(const Checkpoint& checkpoint,
                            const Comment& comment, const IgConfig& config,
                            std::size_t output_index);

}  // namespace offspan

#endif  // OFFSPAN_IG_H_

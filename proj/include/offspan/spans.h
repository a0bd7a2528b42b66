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

#ifndef OFFSPAN_SPANS_H_
#define OFFSPAN_SPANS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "offspan/attribution.h"
#include "offspan/corpus.h"

namespace offspan {

enum class MergePolicy { kMax, kSum, kSingleLabel };

MergePolicy ParseMergePolicy(std::string_view name);
std::string_view MergePolicyName(MergePolicy policy);

struct SpanDecoderConfig {
  // Tokens scoring >= threshold are offensive. Slightly negative, so tokens
  // the explainer is indifferent to are kept.
  double threshold = -0.01;
  MergePolicy merge_policy = MergePolicy::kMax;
  // Label passed through by kSingleLabel.
  std::size_t single_label = 0;
  // Merge runs of consecutive offensive tokens, whitespace included.
  bool coalesce_adjacent = true;

  void Validate() const;
};

std::vector<CharRange> DecodeSpans(const Attribution& attribution,
                                   const SpanDecoderConfig& config);

// Combines per-label attributions over one token list into one.
Attribution MergeMultilabel(std::span<const Attribution> attributions,
                            MergePolicy policy, std::size_t single_label = 0);

}  // namespace offspan

#endif  // OFFSPAN_SPANS_H_

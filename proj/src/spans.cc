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

#include "offspan/spans.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "offspan/errors.h"

namespace offspan {

MergePolicy ParseMergePolicy(std::string_view name) {
  if (name == "max") return MergePolicy::kMax;
  if (name == "sum") return MergePolicy::kSum;
  if (name == "single-label") return MergePolicy::kSingleLabel;
  throw ConfigError("unknown merge policy '" + std::string(name) + "'");
}

std::string_view MergePolicyName(MergePolicy policy) {
  switch (policy) {
    case MergePolicy::kMax:
      return "max";
    case MergePolicy::kSum:
      return "sum";
    case MergePolicy::kSingleLabel:
      return "single-label";
  }
  return "unknown";
}

void SpanDecoderConfig::Validate() const {
  if (!std::isfinite(threshold)) throw ConfigError("threshold must be finite");
}

std::vector<CharRange> DecodeSpans(const Attribution& attribution,
                                   const SpanDecoderConfig& config) {
  config.Validate();
  ValidateAttribution(attribution);
  std::vector<CharRange> spans;
  bool previous_marked = false;
  for (std::size_t i = 0; i < attribution.tokens.size(); ++i) {
    const bool marked = attribution.scores[i] >= config.threshold;
    const CharRange r = attribution.tokens[i].range;
    if (marked) {
      if (config.coalesce_adjacent && previous_marked) {
        spans.back().end = r.end;
      } else {
        spans.push_back(r);
      }
    }
    previous_marked = marked;
  }
  return spans;
}

Attribution MergeMultilabel(std::span<const Attribution> attributions,
                            MergePolicy policy, std::size_t single_label) {
  if (attributions.empty()) throw Error("nothing to merge");
  for (const Attribution& a : attributions) {
    ValidateAttribution(a);
    if (a.tokens != attributions.front().tokens) {
      throw Error("attributions cover different token lists");
    }
  }
  if (policy == MergePolicy::kSingleLabel) {
    for (const Attribution& a : attributions) {
      if (a.explained_output == single_label) return a;
    }
    throw Error("no attribution for label " + std::to_string(single_label));
  }

  Attribution merged;
  merged.tokens = attributions.front().tokens;
  merged.explained_output = attributions.front().explained_output;
  merged.scores = attributions.front().scores;
  for (std::size_t k = 1; k < attributions.size(); ++k) {
    const auto& scores = attributions[k].scores;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      merged.scores[i] = policy == MergePolicy::kMax
                             ? std::max(merged.scores[i], scores[i])
                             : merged.scores[i] + scores[i];
    }
  }
  return merged;
}

}  // namespace offspan

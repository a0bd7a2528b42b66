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

#ifndef OFFSPAN_ATTRIBUTION_H_
#define OFFSPAN_ATTRIBUTION_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offspan/corpus.h"

namespace offspan {

struct AttributionDiagnostics {
  // LIME surrogate fit.
  std::optional<double> weighted_r2;
  std::optional<std::size_t> sample_count;
  // Integrated gradients.
  std::optional<double> completeness_residual;
  std::optional<double> output_delta;  // F(x) - F(baseline)
  std::optional<std::size_t> steps;
  std::vector<std::string> warnings;

  friend bool operator==(const AttributionDiagnostics&,
                         const AttributionDiagnostics&) = default;
};

// Per-token relevance scores for one explained head output.
struct Attribution {
  std::vector<TokenSpan> tokens;
  std::vector<double> scores;
  std::size_t explained_output = 0;
  AttributionDiagnostics diagnostics;

  friend bool operator==(const Attribution&, const Attribution&) = default;
};

// Throws offspan::Error when score and token counts differ or a score is not
// finite.
void ValidateAttribution(const Attribution& attribution);

// One explained comment, as written by `explain` and read by `extract-spans`.
// Holds one attribution per explained output.
struct ExplanationRecord {
  std::string id;
  std::string text;
  std::string method;  // "lime" or "ig"
  std::vector<Attribution> attributions;
};

std::string FormatExplanation(const ExplanationRecord& record);
ExplanationRecord ParseExplanation(std::string_view json_line,
                                   std::size_t line = 0);
void WriteExplanations(std::ostream& out,
                       std::span<const ExplanationRecord> records);
std::vector<ExplanationRecord> ReadExplanations(std::istream& in);

// Static HTML page with every token shaded by its score.
std::string RenderHtml(std::span<const ExplanationRecord> records);

}  // namespace offspan

#endif  // OFFSPAN_ATTRIBUTION_H_

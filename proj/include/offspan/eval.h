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

// Character-level span F1 and the two reference baselines.

#ifndef OFFSPAN_EVAL_H_
#define OFFSPAN_EVAL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "offspan/corpus.h"

namespace offspan {

// 2|P n G| / (|P| + |G|) over character index sets. Both empty scores 1,
// exactly one empty scores 0.
double CharF1(std::span<const CharRange> predicted,
              std::span<const CharRange> gold);

// Comment length buckets: "<30", "30-50" (both ends inclusive), ">50".
inline constexpr std::array<std::string_view, 3> kBucketNames = {"<30", "30-50",
                                                                  ">50"};
std::size_t LengthBucket(std::size_t length);

struct BucketScore {
  std::size_t count = 0;
  std::optional<double> mean_f1;  // unset for an empty bucket
};

struct EvalReport {
  std::vector<std::pair<std::string, double>> per_comment_f1;
  double mean_f1 = 0.0;
  std::array<BucketScore, 3> buckets;
  // Free-form echo of the settings that produced the predictions.
  std::vector<std::pair<std::string, std::string>> settings;
};

// Scores predictions against gold by id; gold order fixes report order.
// Throws when an id is missing on either side.
EvalReport Evaluate(std::span<const Comment> predictions,
                    std::span<const Comment> gold);

// Aggregates per-comment scores that were already computed.
EvalReport Summarize(std::vector<std::pair<std::string, double>> per_comment,
                     std::span<const std::size_t> lengths);

// Predicts exactly floor(len / 2) characters per comment, uniformly.
std::vector<Comment> RandomBaselinePredictions(std::span<const Comment> gold,
                                               std::uint64_t seed);
EvalReport BenchmarkRandom(std::span<const Comment> gold, std::uint64_t seed);

// Whole-token, case-insensitive lookup of words seen in training spans.
std::vector<Comment> LexiconBaselinePredictions(
    std::span<const Comment> train, std::span<const Comment> test);
EvalReport BenchmarkLexicon(std::span<const Comment> train,
                            std::span<const Comment> test);

std::string FormatReportJson(const EvalReport& report);

// Aligned text table, one row per named report.
std::string FormatReportTable(
    std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace offspan

#endif  // OFFSPAN_EVAL_H_

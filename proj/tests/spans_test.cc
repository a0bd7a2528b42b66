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

#include <gtest/gtest.h>

#include <algorithm>

#include "offspan/errors.h"
#include "test_util.h"

namespace offspan {
namespace {

Attribution Over(const std::string& text, std::vector<double> scores,
                 std::size_t output = 0) {
  Attribution a;
  a.tokens = Tokenize(text);
  a.scores = std::move(scores);
  a.explained_output = output;
  return a;
}

TEST(DecodeTest, AllBelowThresholdIsEmpty) {
  EXPECT_TRUE(DecodeSpans(Over("a bb c", {-0.5, -0.02, -1}), {}).empty());
}

TEST(DecodeTest, GapBreaksAdjacency) {
  const auto spans = DecodeSpans(Over("aa bb cc", {0.5, -0.5, 0.3}), {});
  EXPECT_EQ(spans, (std::vector<CharRange>{{0, 2}, {6, 8}}));
}

TEST(DecodeTest, FullCoverCoalesces) {
  const std::string text = "  Last  scene vera ";
  const auto spans = DecodeSpans(Over(text, {0.0, -0.01, 2.0}), {});
  EXPECT_EQ(spans, (std::vector<CharRange>{{2, 18}}));
  SpanDecoderConfig separate;
  separate.coalesce_adjacent = false;
  EXPECT_EQ(DecodeSpans(Over(text, {0.0, -0.01, 2.0}), separate),
            (std::vector<CharRange>{{2, 6}, {8, 13}, {14, 18}}));
}

TEST(DecodeTest, RaisingThresholdNeverAddsCharacters) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = testing::RandomSentence(rng, 1, 12);
    std::vector<double> scores;
    for (std::size_t i = 0; i < Tokenize(text).size(); ++i) {
      scores.push_back(rng.Uniform() - 0.5);
    }
    const Attribution a = Over(text, scores);
    SpanDecoderConfig lo, hi;
    lo.threshold = rng.Uniform() - 0.5;
    hi.threshold = lo.threshold + rng.Uniform() * 0.3;
    const auto lo_set = SpansToCharset(DecodeSpans(a, lo));
    const auto hi_set = SpansToCharset(DecodeSpans(a, hi));
    EXPECT_TRUE(std::includes(lo_set.begin(), lo_set.end(), hi_set.begin(),
                              hi_set.end()));
    const auto spans = DecodeSpans(a, lo);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      EXPECT_LE(spans[i].end, CodepointLength(text));
      if (i) EXPECT_LT(spans[i - 1].end, spans[i].start);
    }
  }
}

TEST(DecodeTest, RejectsMismatchedScores) {
  EXPECT_THROW(DecodeSpans(Over("a b", {1.0}), {}), Error);
}

TEST(MergeTest, PolicyExamples) {
  const std::string text = "x y z";
  const std::vector<Attribution> same = {Over(text, {1, -2, 3}, 0),
                                         Over(text, {1, -2, 3}, 1),
                                         Over(text, {1, -2, 3}, 2)};
  EXPECT_EQ(MergeMultilabel(same, MergePolicy::kMax).scores,
            (std::vector<double>{1, -2, 3}));
  const std::vector<Attribution> diag = {Over(text, {1, 0, 0}, 0),
                                         Over(text, {0, 1, 0}, 1),
                                         Over(text, {0, 0, 1}, 2)};
  EXPECT_EQ(MergeMultilabel(diag, MergePolicy::kMax).scores,
            (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(MergeMultilabel(diag, MergePolicy::kSum).scores,
            (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(MergeMultilabel(diag, MergePolicy::kSingleLabel, 1).scores,
            (std::vector<double>{0, 1, 0}));
}

TEST(MergeTest, MaxDominatesEverySingleLabel) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = testing::RandomSentence(rng, 1, 10);
    const std::size_t n = Tokenize(text).size();
    std::vector<Attribution> per_label;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> s;
      for (std::size_t i = 0; i < n; ++i) s.push_back(rng.Uniform() - 0.5);
      per_label.push_back(Over(text, s, k));
    }
    const SpanDecoderConfig config;
    const auto merged = SpansToCharset(
        DecodeSpans(MergeMultilabel(per_label, MergePolicy::kMax), config));
    for (std::size_t k = 0; k < 3; ++k) {
      const auto single = SpansToCharset(DecodeSpans(per_label[k], config));
      EXPECT_TRUE(std::includes(merged.begin(), merged.end(), single.begin(),
                                single.end()));
    }
  }
}

TEST(MergeTest, RejectsMismatchedTokens) {
  const std::vector<Attribution> bad = {Over("a b", {1, 2}), Over("a c", {1, 2}),
                                        Over("a b", {1, 2})};
  EXPECT_THROW(MergeMultilabel(bad, MergePolicy::kMax), Error);
  const std::vector<Attribution> one = {Over("a b", {1, 2})};
  EXPECT_THROW(MergeMultilabel(one, MergePolicy::kSingleLabel, 2), Error);
}

TEST(DecoderConfigTest, Names) {
  for (MergePolicy p :
       {MergePolicy::kMax, MergePolicy::kSum, MergePolicy::kSingleLabel}) {
    EXPECT_EQ(ParseMergePolicy(MergePolicyName(p)), p);
  }
  EXPECT_THROW(ParseMergePolicy("mean"), ConfigError);
}

}  // namespace
}  // namespace offspan

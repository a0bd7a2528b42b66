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

#include "offspan/eval.h"

#include <gtest/gtest.h>

#include "json.hpp"
#include "offspan/errors.h"
#include "test_util.h"

namespace offspan {
namespace {

using testing::OracleF1;

Comment Gold(std::string id, std::string text, std::vector<CharRange> spans) {
  Comment c;
  c.id = std::move(id);
  c.text = std::move(text);
  c.gold_spans = std::move(spans);
  return c;
}

TEST(CharF1Test, HandCases) {
  const std::vector<CharRange> a = {{0, 10}}, b = {{0, 5}}, c = {{20, 25}};
  EXPECT_EQ(CharF1(a, a), 1.0);
  EXPECT_EQ(CharF1(a, c), 0.0);
  EXPECT_NEAR(CharF1(a, b), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(CharF1({}, {}), 1.0);
  EXPECT_EQ(CharF1(a, {}), 0.0);
  EXPECT_EQ(CharF1({}, a), 0.0);
}

TEST(CharF1Test, MatchesSetOracle) {
  Rng rng(99);
  auto random_spans = [&] {
    std::vector<CharRange> s;
    const std::size_t n = rng.Below(5);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = rng.Below(40);
      s.push_back({a, a + 1 + rng.Below(10)});
    }
    return s;
  };
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = random_spans(), g = random_spans();
    EXPECT_EQ(CharF1(p, g), OracleF1(p, g));
    EXPECT_EQ(CharF1(p, g), CharF1(g, p));
  }
}

TEST(BucketTest, InclusiveMiddle) {
  EXPECT_EQ(LengthBucket(0), 0u);
  EXPECT_EQ(LengthBucket(29), 0u);
  EXPECT_EQ(LengthBucket(30), 1u);
  EXPECT_EQ(LengthBucket(50), 1u);
  EXPECT_EQ(LengthBucket(51), 2u);
}

TEST(EvaluateTest, PerfectAndEmptyPredictions) {
  const std::vector<Comment> gold = {
      Gold("a", "short text", {{0, 5}}),
      Gold("b", std::string(40, 'x'), {{3, 9}}),
      Gold("c", std::string(60, 'y'), {{0, 60}}),
  };
  const EvalReport perfect = Evaluate(gold, gold);
  EXPECT_EQ(perfect.mean_f1, 1.0);
  for (const BucketScore& b : perfect.buckets) {
    EXPECT_EQ(b.count, 1u);
    EXPECT_EQ(*b.mean_f1, 1.0);
  }
  std::vector<Comment> empty = gold;
  for (Comment& c : empty) c.gold_spans->clear();
  EXPECT_EQ(Evaluate(empty, gold).mean_f1, 0.0);
}

TEST(EvaluateTest, MixedToyMatchesHandAverage) {
  const std::vector<Comment> gold = {
      Gold("1", std::string(20, 'a'), {{0, 10}}),
      Gold("2", std::string(20, 'a'), {{0, 4}}),
      Gold("3", std::string(35, 'a'), {}),
      Gold("4", std::string(70, 'a'), {{10, 20}}),
  };
  const std::vector<Comment> pred = {
      Gold("1", gold[0].text, {{0, 5}}),     // 2*5/15
      Gold("2", gold[1].text, {{2, 6}}),     // 2*2/8
      Gold("3", gold[2].text, {}),           // 1
      Gold("4", gold[3].text, {{30, 40}}),   // 0
  };
  const EvalReport r = Evaluate(pred, gold);
  const double expected[] = {2.0 / 3.0, 0.5, 1.0, 0.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.per_comment_f1[i].first, gold[i].id);
    EXPECT_DOUBLE_EQ(r.per_comment_f1[i].second, expected[i]);
  }
  EXPECT_DOUBLE_EQ(r.mean_f1, (2.0 / 3.0 + 0.5 + 1.0 + 0.0) / 4.0);
  EXPECT_DOUBLE_EQ(*r.buckets[0].mean_f1, (2.0 / 3.0 + 0.5) / 2.0);
  EXPECT_DOUBLE_EQ(*r.buckets[1].mean_f1, 1.0);
  EXPECT_DOUBLE_EQ(*r.buckets[2].mean_f1, 0.0);
}

TEST(EvaluateTest, IdMismatchesThrow) {
  const std::vector<Comment> gold = {Gold("a", "text", {{0, 2}})};
  const std::vector<Comment> other = {Gold("b", "text", {{0, 2}})};
  EXPECT_THROW(Evaluate(other, gold), Error);
  const std::vector<Comment> none;
  EXPECT_THROW(Evaluate(none, gold), Error);
}

TEST(RandomBaselineTest, HalfTheCharacters) {
  const std::vector<Comment> gold = {Gold("a", std::string(11, 'z'), {{0, 11}}),
                                     Gold("b", "", {})};
  const auto preds = RandomBaselinePredictions(gold, 3);
  EXPECT_EQ(SpansToCharset(*preds[0].gold_spans).size(), 5u);
  EXPECT_TRUE(preds[1].gold_spans->empty());
  EXPECT_EQ(RandomBaselinePredictions(gold, 3), preds);
  // Empty gold scores 0 once anything is predicted.
  const std::vector<Comment> clean = {Gold("c", "abcdef", {})};
  EXPECT_EQ(BenchmarkRandom(clean, 1).mean_f1, 0.0);
}

TEST(LexiconBaselineTest, WholeTokenCaseInsensitive) {
  const std::vector<Comment> train = {Gold("t", "you p**a da", {{4, 8}})};
  const std::vector<Comment> test = {
      Gold("1", "oh P**A wow", {{3, 7}}),
      Gold("2", "nothing here", {}),
      Gold("3", "p**ad p**a", {{6, 10}}),
  };
  const auto preds = LexiconBaselinePredictions(train, test);
  EXPECT_EQ(*preds[0].gold_spans, (std::vector<CharRange>{{3, 7}}));
  EXPECT_TRUE(preds[1].gold_spans->empty());
  EXPECT_EQ(*preds[2].gold_spans, (std::vector<CharRange>{{6, 10}}));
  EXPECT_EQ(BenchmarkLexicon(train, test).mean_f1, 1.0);
}

TEST(ReportTest, JsonAndTable) {
  const std::vector<Comment> gold = {Gold("a", "short text", {{0, 5}})};
  EvalReport r = Evaluate(gold, gold);
  r.settings = {{"method", "lime"}};
  const auto j = nlohmann::json::parse(FormatReportJson(r));
  EXPECT_EQ(j["mean_f1"], 1.0);
  EXPECT_TRUE(j["bucket_f1"]["30-50"]["mean_f1"].is_null());
  EXPECT_EQ(j["settings"]["method"], "lime");
  const std::vector<std::pair<std::string, EvalReport>> rows = {{"LIME", r}};
  const std::string table = FormatReportTable(rows);
  EXPECT_NE(table.find("F1@30-50"), std::string::npos);
  EXPECT_NE(table.find("100.00"), std::string::npos);
}

}  // namespace
}  // namespace offspan

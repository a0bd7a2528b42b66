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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "offspan/errors.h"
#include "test_util.h"

namespace offspan {
namespace {

using testing::RandomCheckpoint;
using testing::TinyConfig;

Comment Make(const std::string& text) {
  return {"c", text, std::nullopt, std::nullopt, std::nullopt};
}

// Binary model whose offensive logit reads one embedding dimension that
// only the planted token's row carries.
Checkpoint PlantedModel(const std::string& planted) {
  ModelConfig c = TinyConfig();
  Checkpoint base = RandomCheckpoint(c, 2, 0.05);
  std::vector<double> p(base.parameters().begin(), base.parameters().end());
  const auto layout = ParameterLayout(c);
  const std::size_t row = TokenBucket(planted, c);
  for (std::size_t r = 0; r < c.embedding_rows(); ++r) {
    p[layout[0].offset + r * c.embed_dim] = r == row ? 12.0 : 0.0;
  }
  // hidden unit 0 = tanh(pooled dim 0); logit_1 - logit_0 = 6 h0 - 2.
  p[layout[1].offset + 0] = 1.0;
  p[layout[2].offset + 0] = 0.0;
  p[layout[3].offset + 0 * c.hidden_dim + 0] = 0.0;
  p[layout[3].offset + 1 * c.hidden_dim + 0] = 6.0;
  p[layout[4].offset + 0] = 1.0;
  p[layout[4].offset + 1] = -1.0;
  return Checkpoint(c, p);
}

TEST(BaselineTest, BoundaryRowsKeptContentIsPad) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 1);
  const std::vector<std::size_t> empty = {kBosIndex, kEosIndex};
  EXPECT_EQ(MakeBaseline(ckpt, empty), LookupEmbeddings(ckpt, empty));
  const auto seq = Encode("vera", TinyConfig());
  const Matrix b = MakeBaseline(ckpt, seq);
  const Matrix x = LookupEmbeddings(ckpt, seq);
  EXPECT_EQ(b.row(0), x.row(0));
  EXPECT_EQ(b.row(2), x.row(2));
  EXPECT_EQ(b.row(1), ckpt.embeddings().row(kPadIndex));
  const std::vector<std::size_t> bad = {5, kEosIndex};
  EXPECT_THROW(MakeBaseline(ckpt, bad), ShapeError);
}

TEST(BaselineTest, ZeroModelBaselineIsUninformative) {
  const auto ckpt = Checkpoint::Zeros(TinyConfig());
  const auto seq = Encode("a b c", TinyConfig());
  EXPECT_EQ(ForwardFromEmbeddings(ckpt, MakeBaseline(ckpt, seq)),
            (std::vector<double>{0.5, 0.5}));
}

TEST(IntegratedGradientsTest, ZeroPathGivesZero) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 3);
  const Matrix x = LookupEmbeddings(ckpt, Encode("a b c", TinyConfig()));
  EXPECT_TRUE(IntegratedGradients(ckpt, x, x, 7, 1).isZero(0.0));
  EXPECT_THROW(IntegratedGradients(ckpt, x, x.topRows(2), 7, 1), ShapeError);
}

TEST(IntegratedGradientsTest, ConstantGradientPathIsExactForAnyM) {
  // Swapping two rows leaves the mean-pooled vector, and so the gradient,
  // constant along the path; the Riemann sum is then exact at m = 1.
  const auto ckpt = RandomCheckpoint(TinyConfig(), 4);
  const Matrix x = LookupEmbeddings(ckpt, Encode("ka lo", TinyConfig()));
  Matrix xb = x;
  xb.row(1) = x.row(2);
  xb.row(2) = x.row(1);
  const Matrix g = InputGradient(ckpt, x, 1);
  for (std::size_t m : {1u, 2u, 17u}) {
    const Matrix a = IntegratedGradients(ckpt, x, xb, m, 1);
    EXPECT_LT((a - (x - xb).cwiseProduct(g)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(IntegratedGradientsTest, CompletenessImprovesWithSteps) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ckpt = RandomCheckpoint(TinyConfig(), 50 + seed, 3.0);
    const auto seq = Encode("ka lo mi ne su", TinyConfig());
    const Matrix x = LookupEmbeddings(ckpt, seq);
    const Matrix xb = MakeBaseline(ckpt, seq);
    const double delta =
        ForwardFromEmbeddings(ckpt, x)[1] - ForwardFromEmbeddings(ckpt, xb)[1];
    auto residual = [&](std::size_t m, RiemannScheme s) {
      return std::abs(IntegratedGradients(ckpt, x, xb, m, 1, s).sum() - delta);
    };
    EXPECT_LE(residual(500, RiemannScheme::kRight),
              residual(5, RiemannScheme::kRight));
    EXPECT_LT(residual(500, RiemannScheme::kRight), 1e-2);
    EXPECT_LT(residual(200, RiemannScheme::kTrapezoid), 1e-4);
  }
}

TEST(ExplainIgTest, PlantedTokenScoresHighest) {
  const Checkpoint ckpt = PlantedModel("p**a");
  const Attribution a =
      ExplainIg(ckpt, Make("Last scene p**a level love u"), IgConfig{});
  ASSERT_EQ(a.scores.size(), 6u);
  const auto best = std::max_element(a.scores.begin(), a.scores.end());
  EXPECT_EQ(best - a.scores.begin(), 2);
  for (std::size_t j = 0; j < a.scores.size(); ++j) {
    if (j != 2) EXPECT_LT(a.scores[j], *best);
  }
  EXPECT_GT(*best, 0.0);
  EXPECT_GT(*a.diagnostics.output_delta, 0.1);
}

TEST(ExplainIgTest, ConstantModelScoresZero) {
  const auto ckpt = Checkpoint::Zeros(TinyConfig());
  const Attribution a = ExplainIg(ckpt, Make("a b c"), IgConfig{});
  for (double s : a.scores) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(*a.diagnostics.completeness_residual, 0.0);
  EXPECT_TRUE(a.diagnostics.warnings.empty());
}

TEST(ExplainIgTest, SensitivityToSingleToken) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 9);
  const Comment c = Make("vera");
  const auto seq = Encode(c.text, TinyConfig());
  const double fx = Forward(ckpt, seq)[1];
  const double fb = ForwardFromEmbeddings(ckpt, MakeBaseline(ckpt, seq))[1];
  ASSERT_NE(fx, fb);
  EXPECT_NE(ExplainIg(ckpt, c, IgConfig{}).scores[0], 0.0);
}

TEST(ExplainIgTest, WarnsWhenResidualExceedsTolerance) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 13, 4.0);
  IgConfig config;
  config.steps = 1;
  config.completeness_tolerance = 1e-12;
  const Attribution a = ExplainIg(ckpt, Make("ka lo mi"), config);
  EXPECT_EQ(a.diagnostics.warnings.size(), 1u);
  EXPECT_EQ(*a.diagnostics.steps, 1u);
}

TEST(ExplainIgTest, TruncatedTokensScoreZero) {
  ModelConfig c = TinyConfig();
  c.max_seq_length = 4;
  const auto ckpt = RandomCheckpoint(c, 2);
  const Attribution a = ExplainIg(ckpt, Make("a b c d e"), IgConfig{});
  ASSERT_EQ(a.scores.size(), 5u);
  EXPECT_EQ(a.scores[2], 0.0);
  EXPECT_EQ(a.scores[4], 0.0);
}

TEST(ExplainIgTest, DeterministicAndOutputSelection) {
  const auto ckpt = RandomCheckpoint(TinyConfig(HeadKind::kMultilabel3), 6);
  const Comment c = Make("Last scene vera level love u");
  EXPECT_EQ(ExplainIg(ckpt, c, IgConfig{}), ExplainIg(ckpt, c, IgConfig{}));
  const auto out = Forward(ckpt, Encode(c.text, ckpt.config()));
  const std::size_t top = std::max_element(out.begin(), out.end()) - out.begin();
  EXPECT_EQ(ExplainIg(ckpt, c, IgConfig{}).explained_output, top);
  EXPECT_THROW(ExplainIgOutput(ckpt, c, IgConfig{}, 3), ConfigError);
  EXPECT_THROW(ExplainIg(ckpt, Make(""), IgConfig{}), Error);
}

}  // namespace
}  // namespace offspan

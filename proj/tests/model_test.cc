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

#include "offspan/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "offspan/augment.h"
#include "offspan/errors.h"
#include "test_util.h"

namespace offspan {
namespace {

using testing::RandomCheckpoint;
using testing::RandomSentence;
using testing::TinyConfig;

double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

TEST(EncodeTest, EmptyTextIsBosEos) {
  EXPECT_EQ(Encode("", TinyConfig()),
            (std::vector<std::size_t>{kBosIndex, kEosIndex}));
}

TEST(EncodeTest, DeterministicAndMaskAware) {
  const ModelConfig c = TinyConfig();
  EXPECT_EQ(Encode("vera level", c), Encode("vera level", c));
  const auto seq = Encode("vera [MASK] u", c);
  ASSERT_EQ(seq.size(), 5u);
  EXPECT_EQ(seq[2], kMaskIndex);
  EXPECT_GE(seq[1], kNumSpecialRows);
}

TEST(EncodeTest, TruncatesKeepingEos) {
  ModelConfig c = TinyConfig();
  c.max_seq_length = 150;
  std::string text;
  for (int i = 0; i < 200; ++i) text += "w" + std::to_string(i) + " ";
  const auto seq = Encode(text, c);
  ASSERT_EQ(seq.size(), 150u);
  EXPECT_EQ(seq.front(), kBosIndex);
  EXPECT_EQ(seq.back(), kEosIndex);
}

TEST(ForwardTest, ZeroParametersAreSymmetric) {
  const auto binary = Checkpoint::Zeros(TinyConfig());
  const auto seq = Encode("some text here", TinyConfig());
  EXPECT_EQ(Forward(binary, seq), (std::vector<double>{0.5, 0.5}));
  const auto multi = Checkpoint::Zeros(TinyConfig(HeadKind::kMultilabel3));
  EXPECT_EQ(Forward(multi, seq), (std::vector<double>{0.5, 0.5, 0.5}));
  const Matrix zeros = Matrix::Zero(3, TinyConfig().embed_dim);
  EXPECT_EQ(ForwardFromEmbeddings(binary, zeros),
            (std::vector<double>{0.5, 0.5}));
}

TEST(ForwardTest, ProbabilityContracts) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto bin = RandomCheckpoint(TinyConfig(), trial, 5.0);
    const auto seq = Encode(RandomSentence(rng, 0, 12), TinyConfig());
    const auto p = Forward(bin, seq);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    const auto ml =
        RandomCheckpoint(TinyConfig(HeadKind::kMultilabel3), trial, 5.0);
    for (double v : Forward(ml, seq)) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(ForwardTest, EmbeddingPathMatchesIndexPath) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 3);
  const auto seq = Encode("Last scene vera level love u", TinyConfig());
  EXPECT_EQ(Forward(ckpt, seq),
            ForwardFromEmbeddings(ckpt, LookupEmbeddings(ckpt, seq)));
}

TEST(ForwardTest, ShapeAndFaultErrors) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 3);
  EXPECT_THROW(ForwardFromEmbeddings(ckpt, Matrix::Zero(3, 2)), ShapeError);
  EXPECT_THROW(InputGradient(ckpt, Matrix::Zero(3, 5), 2), ShapeError);
  const std::vector<std::size_t> too_short = {kBosIndex};
  EXPECT_THROW(Forward(ckpt, too_short), ShapeError);

  std::vector<double> p(ckpt.parameters().begin(), ckpt.parameters().end());
  const auto layout = ParameterLayout(TinyConfig());
  p[layout[3].offset] = std::numeric_limits<double>::quiet_NaN();
  const Checkpoint bad(TinyConfig(), p);
  try {
    Forward(bad, Encode("x", TinyConfig()));
    FAIL() << "expected ModelFault";
  } catch (const ModelFault& e) {
    EXPECT_EQ(e.segment(), "head.weight");
  }
  p.pop_back();
  EXPECT_THROW(Checkpoint(TinyConfig(), p), ShapeError);
}

// Central differences on every input cell.
void CheckInputGradient(const Checkpoint& ckpt, const Matrix& x,
                        std::size_t k, GradientTarget target) {
  const Matrix g = InputGradient(ckpt, x, k, target);
  ASSERT_EQ(g.rows(), x.rows());
  ASSERT_EQ(g.cols(), x.cols());
  const double eps = 1e-5;
  auto f = [&](const Matrix& m) {
    const auto out = ForwardFromEmbeddings(ckpt, m);
    if (target == GradientTarget::kProbability) return out[k];
    // Logit recovered from the output: log-odds for sigmoid, and for the
    // 2-way softmax only differences of logits are identified, so compare
    // the probability path there instead.
    return std::log(out[k] / (1.0 - out[k]));
  };
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
      Matrix plus = x, minus = x;
      plus(i, d) += eps;
      minus(i, d) -= eps;
      const double fd = (f(plus) - f(minus)) / (2 * eps);
      EXPECT_LT(RelativeError(g(i, d), fd), 1e-4)
          << "cell " << i << "," << d << " analytic " << g(i, d) << " fd "
          << fd;
    }
  }
}

TEST(GradientTest, InputGradientMatchesFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const HeadKind head =
        trial % 2 ? HeadKind::kMultilabel3 : HeadKind::kBinary;
    const auto ckpt = RandomCheckpoint(TinyConfig(head), 100 + trial);
    const auto seq = Encode(RandomSentence(rng, 1, 8), TinyConfig(head));
    const Matrix x = LookupEmbeddings(ckpt, seq);
    const std::size_t k = rng.Below(TinyConfig(head).num_outputs());
    CheckInputGradient(ckpt, x, k, GradientTarget::kProbability);
    if (head == HeadKind::kMultilabel3) {
      CheckInputGradient(ckpt, x, k, GradientTarget::kLogit);
    }
  }
}

TEST(GradientTest, ConstantModelHasZeroGradient) {
  const ModelConfig c = TinyConfig();
  auto base = RandomCheckpoint(c, 5);
  std::vector<double> p(base.parameters().begin(), base.parameters().end());
  for (const ParameterSegment& s : ParameterLayout(c)) {
    if (s.name == "hidden.weight" || s.name == "head.weight") {
      std::fill_n(p.begin() + s.offset, s.size(), 0.0);
    }
  }
  const Checkpoint ckpt(c, p);
  const Matrix x = LookupEmbeddings(ckpt, Encode("a b c", c));
  EXPECT_TRUE(InputGradient(ckpt, x, 1).isZero(0.0));
}

TEST(GradientTest, LogitGradientIsLinearInHeadWeights) {
  const ModelConfig c = TinyConfig();
  const auto ckpt = RandomCheckpoint(c, 8);
  std::vector<double> p(ckpt.parameters().begin(), ckpt.parameters().end());
  for (const ParameterSegment& s : ParameterLayout(c)) {
    if (s.name == "head.weight") {
      for (std::size_t i = 0; i < s.size(); ++i) p[s.offset + i] *= 2.0;
    }
  }
  const Checkpoint doubled(c, p);
  const Matrix x = LookupEmbeddings(ckpt, Encode("vera level love", c));
  const Matrix g1 = InputGradient(ckpt, x, 1, GradientTarget::kLogit);
  const Matrix g2 = InputGradient(doubled, x, 1, GradientTarget::kLogit);
  EXPECT_LT((g2 - 2.0 * g1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GradientTest, ParameterGradientMatchesFiniteDifferences) {
  Rng rng(23);
  for (HeadKind head : {HeadKind::kBinary, HeadKind::kMultilabel3}) {
    const ModelConfig c = TinyConfig(head);
    const auto ckpt = RandomCheckpoint(c, 31);
    const auto seq = Encode("ka lo mi ka", c);
    const std::vector<double> target =
        head == HeadKind::kBinary ? std::vector<double>{0.0, 1.0}
                                  : std::vector<double>{1.0, 0.0, 1.0};
    std::vector<double> grad(ckpt.parameters().size(), 0.0);
    LossAndGradient(ckpt, seq, target, &grad);
    std::vector<double> p(ckpt.parameters().begin(), ckpt.parameters().end());
    // Every non-embedding parameter plus the rows the sequence touches.
    std::vector<std::size_t> indices;
    for (const ParameterSegment& s : ParameterLayout(c)) {
      if (s.name != "embedding") {
        for (std::size_t i = 0; i < s.size(); ++i) indices.push_back(s.offset + i);
      }
    }
    for (std::size_t row : seq) {
      for (std::size_t d = 0; d < c.embed_dim; ++d) {
        indices.push_back(row * c.embed_dim + d);
      }
    }
    const double eps = 1e-5;
    for (std::size_t idx : indices) {
      auto plus = p, minus = p;
      plus[idx] += eps;
      minus[idx] -= eps;
      const double fd = (LossAndGradient(Checkpoint(c, plus), seq, target,
                                         nullptr) -
                         LossAndGradient(Checkpoint(c, minus), seq, target,
                                         nullptr)) /
                        (2 * eps);
      EXPECT_LT(RelativeError(grad[idx], fd), 1e-4) << "parameter " << idx;
    }
    // Rows outside the sequence get no gradient.
    for (std::size_t row = 0; row < c.embedding_rows(); ++row) {
      if (std::find(seq.begin(), seq.end(), row) != seq.end()) continue;
      for (std::size_t d = 0; d < c.embed_dim; ++d) {
        EXPECT_EQ(grad[row * c.embed_dim + d], 0.0);
      }
    }
  }
}

std::vector<Comment> SeparableCorpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Comment> out;
  for (std::size_t i = 0; i < n; ++i) {
    Comment c;
    c.id = "c" + std::to_string(i);
    c.binary_label = static_cast<int>(i % 2);
    c.text = RandomSentence(rng, 2, 8);
    c.text += c.binary_label == 1 ? " zzbad" : " zzgood";
    out.push_back(c);
  }
  return out;
}

double Accuracy(const Checkpoint& ckpt, const std::vector<Comment>& data) {
  std::size_t right = 0;
  for (const Comment& c : data) {
    const auto p = Forward(ckpt, Encode(c.text, ckpt.config()));
    right += (p[1] > 0.5) == (*c.binary_label == 1);
  }
  return static_cast<double>(right) / static_cast<double>(data.size());
}

TEST(TrainTest, LearnsSeparableCorpus) {
  const auto data = SeparableCorpus(200, 4);
  ModelConfig mc;
  mc.vocab_buckets = 1024;
  mc.seed = 2;
  TrainConfig tc;
  const Checkpoint ckpt = Train(data, mc, tc);
  EXPECT_GE(Accuracy(ckpt, data), 0.95);
  EXPECT_LT(ckpt.meta().final_train_loss, ckpt.meta().initial_train_loss);
  EXPECT_EQ(ckpt.meta().seed, 2u);
}

TEST(TrainTest, SameSeedIsBitIdentical) {
  const auto data = SeparableCorpus(120, 6);
  ModelConfig mc = TinyConfig();
  mc.seed = 77;
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 16;
  const Checkpoint a = Train(data, mc, tc);
  const Checkpoint b = Train(data, mc, tc);
  ASSERT_EQ(a.parameters().size(), b.parameters().size());
  EXPECT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(),
                         b.parameters().begin()));
  mc.seed = 78;
  const Checkpoint c = Train(data, mc, tc);
  EXPECT_FALSE(std::equal(a.parameters().begin(), a.parameters().end(),
                          c.parameters().begin()));
}

TEST(TrainTest, RejectsBadInput) {
  TrainConfig tc;
  EXPECT_THROW(Train({}, TinyConfig(), tc), ConfigError);
  Comment unlabeled{"a", "text", std::nullopt, std::nullopt, std::nullopt};
  std::vector<Comment> one = {unlabeled};
  EXPECT_THROW(Train(one, TinyConfig(), tc), ConfigError);
  EXPECT_THROW(Train(SeparableCorpus(10, 1), TinyConfig(HeadKind::kMultilabel3),
                     tc),
               ConfigError);
}

TEST(TrainTest, MultilabelHeadsBeatMajorityRate) {
  // Clean sentences augmented with a small lexicon; each head has to learn
  // where in the sentence the inserted words sit.
  Rng rng(12);
  std::vector<Comment> source;
  for (std::size_t i = 0; i < 400; ++i) {
    source.push_back({"s" + std::to_string(i), RandomSentence(rng, 3, 9),
                      std::nullopt, 0, std::nullopt});
  }
  const Lexicon lexicon({"p**a", "thu", "F**k", "sanghu", "n**y"});
  AugmentConfig ac;
  ac.seed = 5;
  const auto corpus = RunAugmentation(source, lexicon, ac);
  std::vector<Comment> train(corpus.multilabel.begin(),
                             corpus.multilabel.begin() + 1400);
  std::vector<Comment> test(corpus.multilabel.begin() + 1400,
                            corpus.multilabel.end());
  ModelConfig mc;
  mc.vocab_buckets = 2048;
  mc.head = HeadKind::kMultilabel3;
  mc.seed = 9;
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  const Checkpoint ckpt = Train(train, mc, tc);
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t ones = 0, right = 0;
    for (const Comment& c : test) {
      const int label = (*c.position_labels)[k];
      ones += label;
      const double p = Forward(ckpt, Encode(c.text, mc))[k];
      right += (p > 0.5) == (label == 1);
    }
    const double n = static_cast<double>(test.size());
    const double majority = std::max(ones, test.size() - ones) / n;
    EXPECT_GT(right / n, majority) << "head " << k;
  }
}

TEST(CheckpointTest, RoundTripsExactly) {
  ModelConfig c = TinyConfig(HeadKind::kMultilabel3);
  c.seed = 5;
  const auto ckpt = RandomCheckpoint(c, 5);
  std::stringstream buf;
  WriteCheckpoint(buf, ckpt);
  const std::string bytes = buf.str();
  const Checkpoint back = ReadCheckpoint(buf);
  EXPECT_TRUE(std::equal(ckpt.parameters().begin(), ckpt.parameters().end(),
                         back.parameters().begin()));
  EXPECT_EQ(back.config().head, HeadKind::kMultilabel3);
  std::stringstream again;
  WriteCheckpoint(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(CheckpointTest, RejectsCorruptFiles) {
  const auto ckpt = RandomCheckpoint(TinyConfig(), 5);
  std::stringstream buf;
  WriteCheckpoint(buf, ckpt);
  const std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(ReadCheckpoint(truncated), Error);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(ReadCheckpoint(trailing), ShapeError);
  std::stringstream garbage("not a checkpoint at all");
  EXPECT_THROW(ReadCheckpoint(garbage), Error);
}

}  // namespace
}  // namespace offspan

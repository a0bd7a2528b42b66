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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fail. Pass criterion numbers as arguments to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "offspan/augment.h"
#include "offspan/eval.h"
#include "offspan/experiment.h"
#include "offspan/ig.h"
#include "offspan/lime.h"
#include "offspan/model.h"
#include "offspan/synth.h"
#include "test_util.h"

namespace offspan {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// 1. IG completeness on trained models.
Outcome IgCompleteness() {
  const auto start = Clock::now();
  constexpr int kModels = 20;
  constexpr std::size_t kComments = 50;
  std::size_t cases = 0, improved = 0;
  std::vector<double> residual50, deltas;
  for (int k = 0; k < kModels; ++k) {
    SynthConfig synth;
    synth.seed = 1000 + k;
    synth.num_comments = 400;
    synth.span_train = 10;
    synth.span_test = kComments;
    synth.lexicon_size = 40;
    synth.neutral_vocab = 300;
    const SynthCorpus corpus = GenerateSynthCorpus(synth);
    ModelConfig model;
    model.vocab_buckets = 1024;
    model.embed_dim = 16;
    model.hidden_dim = 16;
    model.seed = 7 + k;
    TrainConfig train;
    train.epochs = 10;
    train.learning_rate = 3e-3;
    const Checkpoint ckpt = Train(corpus.classification, model, train);
    for (const Comment& c : corpus.span_test) {
      const auto seq = Encode(c.text, model);
      const Matrix x = LookupEmbeddings(ckpt, seq);
      const Matrix base = MakeBaseline(ckpt, seq);
      const double delta = ForwardFromEmbeddings(ckpt, x)[kOffensiveOutput] -
                           ForwardFromEmbeddings(ckpt, base)[kOffensiveOutput];
      auto residual = [&](std::size_t m) {
        return std::abs(
            IntegratedGradients(ckpt, x, base, m, kOffensiveOutput).sum() -
            delta);
      };
      const double r5 = residual(5), r50 = residual(50), r500 = residual(500);
      ++cases;
      if (r500 < r5) ++improved;
      residual50.push_back(r50);
      deltas.push_back(std::abs(delta));
    }
  }
  std::sort(residual50.begin(), residual50.end());
  const double median = residual50[residual50.size() / 2];
  // Guards against a vacuous pass on near-constant models.
  std::sort(deltas.begin(), deltas.end());
  const double median_delta = deltas[deltas.size() / 2];
  const double rate = static_cast<double>(improved) / cases;
  const double secs = Seconds(start);
  return {rate >= 0.95 && median < 0.05 && secs < 300,
          Format("%d models x %zu comments: m=500 beats m=5 in %.1f%% of "
                 "cases; median residual at m=50 = %.2e (median |F(x) - "
                 "F(baseline)| = %.3f); %.1fs",
                 kModels, kComments, 100 * rate, median, median_delta, secs)};
}

// 2. Input-embedding gradient vs central finite differences.
Outcome GradientCheck() {
  const auto start = Clock::now();
  constexpr double kEps = 1e-5;
  double worst = 0.0;
  Rng rng(2024);
  for (int pair = 0; pair < 100; ++pair) {
    const HeadKind head =
        pair % 2 ? HeadKind::kMultilabel3 : HeadKind::kBinary;
    ModelConfig config = testing::TinyConfig(head);
    const Checkpoint ckpt = testing::RandomCheckpoint(config, 500 + pair, 2.0);
    const auto seq =
        Encode(testing::RandomSentence(rng, 1, 12), config);
    const Matrix x = LookupEmbeddings(ckpt, seq);
    const std::size_t out = rng.Below(config.num_outputs());
    const Matrix g = InputGradient(ckpt, x, out);
    Matrix fd(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Matrix up = x, down = x;
        up(i, j) += kEps;
        down(i, j) -= kEps;
        fd(i, j) = (ForwardFromEmbeddings(ckpt, up)[out] -
                    ForwardFromEmbeddings(ckpt, down)[out]) /
                   (2 * kEps);
      }
    }
    const double scale = std::max({g.norm(), fd.norm(), 1e-12});
    worst = std::max(worst, (g - fd).norm() / scale);
  }
  const double secs = Seconds(start);
  return {worst < 1e-4 && secs < 60,
          Format("100 pairs: worst relative error %.2e; %.1fs", worst, secs)};
}

// 3. LIME recovers exact-linear scorers.
Outcome LimeRecovery() {
  const auto start = Clock::now();
  Rng rng(303);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::string text = testing::RandomSentence(rng, 5, 20);
    const auto tokens = Tokenize(text);
    std::vector<double> coef;
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      coef.push_back(4.0 * rng.Uniform() - 2.0);
    }
    const double intercept = rng.Uniform();
    const TextScorer scorer = [&](const std::string& t) {
      const auto now = Tokenize(t);
      double y = intercept;
      for (std::size_t j = 0; j < tokens.size(); ++j) {
        if (now[j].text == tokens[j].text) y += coef[j];
      }
      return std::vector<double>{y};
    };
    LimeConfig config;
    config.ridge_lambda = 0.0;
    config.num_samples = 10 * tokens.size();
    config.seed = DeriveSeed(77, trial);
    const std::size_t outputs[] = {0};
    const auto a = ExplainWithScorer(text, scorer, outputs, config).front();
    double err = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
      err = std::max(err, std::abs(a.scores[j] - coef[j]));
    }
    worst = std::max(worst, err);
    if (err <= 1e-6) ++ok;
  }
  const double secs = Seconds(start);
  return {ok == 100 && secs < 60,
          Format("%d/100 trials within 1e-6 (worst %.2e); %.1fs", ok, worst,
                 secs)};
}

// 4. char F1 against the brute-force set oracle.
Outcome CharF1Oracle() {
  Rng rng(404);
  auto spans = [&] {
    std::vector<CharRange> s;
    const std::size_t n = rng.Below(6);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = rng.Below(60);
      s.push_back({a, a + 1 + rng.Below(15)});
    }
    return s;
  };
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto p = spans(), g = spans();
    if (CharF1(p, g) != testing::OracleF1(p, g)) ++mismatches;
  }
  const std::vector<CharRange> ten = {{0, 10}}, five = {{0, 5}},
                               far = {{20, 30}};
  const bool hand = CharF1(ten, ten) == 1.0 && CharF1(ten, far) == 0.0 &&
                    std::abs(CharF1(ten, five) - 2.0 / 3.0) <= 1e-12;
  return {mismatches == 0 && hand,
          Format("10000 random configurations: %d mismatches; hand cases %s",
                 mismatches, hand ? "ok" : "wrong")};
}

// 5. Random benchmark on full-cover gold.
Outcome RandomExpectation() {
  Rng rng(505);
  std::vector<Comment> gold;
  for (int i = 0; i < 50; ++i) {
    Comment c;
    c.id = "g" + std::to_string(i);
    c.text = std::string(10 + rng.Below(91), 'x');
    c.gold_spans = std::vector<CharRange>{{0, c.text.size()}};
    gold.push_back(std::move(c));
  }
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    sum += BenchmarkRandom(gold, seed).mean_f1;
  }
  const double mean = sum / 1000.0;
  return {std::abs(mean - 2.0 / 3.0) <= 0.02,
          Format("mean F1 over 1000 seeds = %.4f (target 0.6667 +/- 0.02)",
                 mean)};
}

// 6. Augmentation counts and fidelity, checked on the saved file.
Outcome AugmentationFidelity() {
  Rng rng(606);
  std::vector<Comment> source;
  for (int i = 0; i < 10; ++i) {
    Comment c;
    c.id = "s" + std::to_string(i);
    c.text = testing::RandomSentence(rng, 1, 14);
    c.binary_label = 0;
    source.push_back(std::move(c));
  }
  const Lexicon lexicon({"p**a", "thu", "F**k", "n**y", "sanghu"});
  AugmentConfig config;
  config.seed = 6;
  const AugmentedCorpus corpus = RunAugmentation(source, lexicon, config);
  const fs::path path = fs::temp_directory_path() / "offspan-accept-aug.jsonl";
  SaveDataset(path.string(), corpus.multilabel, DatasetKind::kMultilabel);
  const std::vector<Comment> saved =
      LoadDataset(path.string(), DatasetKind::kMultilabel);
  fs::remove(path);

  std::size_t offensive = 0, bad_spans = 0, bad_labels = 0;
  for (const Comment& c : saved) {
    if (*c.binary_label == 1) ++offensive;
    for (const CharRange& s : *c.gold_spans) {
      if (!lexicon.Contains(CharSubstring(c.text, s))) ++bad_spans;
    }
    if (PositionLabelsFromSpans(c) != *c.position_labels) ++bad_labels;
  }
  const bool pass = saved.size() == 40 && corpus.classification.size() == 40 &&
                    offensive == 30 && bad_spans == 0 && bad_labels == 0;
  return {pass, Format("%zu records, %zu offensive, %zu non-lexicon spans, "
                       "%zu label mismatches",
                       saved.size(), offensive, bad_spans, bad_labels)};
}

// 7. Directional checks on the synthetic planted-token corpus.
Outcome SyntheticDirections() {
  const auto start = Clock::now();
  std::map<Preset, ExperimentResult> results;
  for (Preset p :
       {Preset::kOsBaseline, Preset::kOsAugmentation, Preset::kOsMultilabel}) {
    RunConfig c;
    c.preset = p;
    c.seed = 1;
    c.model.vocab_buckets = 4096;
    results[p] = RunExperiment(c);
  }
  const double secs = Seconds(start);
  const ExperimentResult& base = results[Preset::kOsBaseline];
  const double random = base.random_benchmark.mean_f1;
  std::printf("  %-16s %-5s %8s  per-seed\n", "preset", "xai", "mean F1");
  for (const auto& [preset, r] : results) {
    for (const MethodSummary& m : r.methods) {
      std::printf("  %-16s %-5s %8.4f ", std::string(PresetName(preset)).c_str(),
                  m.method.c_str(), m.mean_f1);
      for (double f : m.per_seed_f1) std::printf(" %.4f", f);
      std::printf("\n");
    }
  }
  std::printf("  benchmark random %.4f, lexicon %.4f\n", random,
              base.lexicon_benchmark.mean_f1);
  const double lime = base.method("lime").mean_f1;
  const double ig = base.method("ig").mean_f1;
  const double ml_lime = results[Preset::kOsMultilabel].method("lime").mean_f1;
  // (a) is required of every preset, not only the baseline.
  double weakest = 1.0;
  for (const auto& [preset, r] : results) {
    for (const MethodSummary& m : r.methods) {
      weakest = std::min(weakest, m.mean_f1);
    }
  }
  const bool a = weakest >= random + 0.10;
  const bool b = ml_lime > lime;
  const bool c = ig > lime;
  return {a && b && c && secs < 1800,
          Format("(a) %s weakest explainer row %.4f vs random %.4f; (b) %s "
                 "multilabel lime %.4f vs baseline %.4f; (c) %s ig %.4f vs "
                 "lime %.4f; %.0fs",
                 a ? "ok" : "FAIL", weakest, random, b ? "ok" : "FAIL",
                 ml_lime, lime, c ? "ok" : "FAIL", ig, lime, secs)};
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

// 8. Manifest replay reproduces every artifact byte for byte.
Outcome ManifestReplay() {
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (Preset p :
       {Preset::kOsBaseline, Preset::kOsAugmentation, Preset::kOsMultilabel}) {
    const fs::path dir = fs::temp_directory_path() /
                         ("offspan-accept-" + std::string(PresetName(p)));
    fs::remove_all(dir);
    RunConfig c;
    c.preset = p;
    c.seed = 11;
    c.out_dir = dir.string();
    c.synth.num_comments = 300;
    c.synth.span_train = 60;
    c.synth.span_test = 30;
    c.synth.lexicon_size = 40;
    c.model.vocab_buckets = 1024;
    c.model.embed_dim = 16;
    c.model.hidden_dim = 16;
    c.train.epochs = 3;
    c.train.seeds = {13, 29};
    c.lime.num_samples = 200;
    c.ig.steps = 20;
    RunExperiment(c);
    const auto first = Snapshot(dir);
    const RunConfig replay = LoadManifest((dir / "manifest.json").string());
    fs::remove_all(dir);
    RunExperiment(replay);
    const auto second = Snapshot(dir);
    fs::remove_all(dir);
    files += first.size();
    for (const auto& [name, bytes] : first) {
      auto it = second.find(name);
      if (it == second.end() || it->second != bytes) {
        differing.push_back(std::string(PresetName(p)) + "/" + name);
      }
    }
    if (second.size() != first.size()) {
      differing.push_back(std::string(PresetName(p)) + ": file set");
    }
  }
  std::string detail = Format("3 presets, %zu files compared, %zu differ",
                              files, differing.size());
  for (const std::string& d : differing) detail += " " + d;
  return {files > 0 && differing.empty(), detail};
}

}  // namespace
}  // namespace offspan

int main(int argc, char** argv) {
  using offspan::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"IG completeness", offspan::IgCompleteness},
      {"gradient vs finite differences", offspan::GradientCheck},
      {"LIME linear recovery", offspan::LimeRecovery},
      {"char F1 oracle", offspan::CharF1Oracle},
      {"random benchmark expectation", offspan::RandomExpectation},
      {"augmentation counts and fidelity", offspan::AugmentationFidelity},
      {"synthetic directional replication", offspan::SyntheticDirections},
      {"manifest replay determinism", offspan::ManifestReplay},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(n)) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", n,
                checks[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

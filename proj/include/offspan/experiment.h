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

// End-to-end experiment runner.
//
// Presets:
//   os-baseline      train a binary head on the sentence-labelled corpus
//   os-augmentation  train a binary head on the mask-augmented corpus
//   os-multilabel    train a 3-label positional head on the augmented corpus
// Each preset then explains the span test set with LIME and integrated
// gradients, decodes spans, and scores them. This repeats once per seed in
// TrainConfig::seeds and the scores are averaged.
//
// Every random stream is derived from RunConfig::seed by name, so a manifest
// replays bit-identically.

#ifndef OFFSPAN_EXPERIMENT_H_
#define OFFSPAN_EXPERIMENT_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offspan/attribution.h"
#include "offspan/augment.h"
#include "offspan/eval.h"
#include "offspan/ig.h"
#include "offspan/lime.h"
#include "offspan/model.h"
#include "offspan/spans.h"
#include "offspan/synth.h"

namespace offspan {

enum class Preset { kOsBaseline, kOsAugmentation, kOsMultilabel };

Preset ParsePreset(std::string_view name);
std::string_view PresetName(Preset preset);

enum class Method { kLime, kIg };

Method ParseMethod(std::string_view name);
std::string_view MethodName(Method method);

// Which head outputs to explain: the explainer default, every output, or
// one fixed index.
struct OutputSelection {
  enum class Kind { kAuto, kAll, kIndex } kind = Kind::kAuto;
  std::size_t index = 0;

  static OutputSelection Parse(std::string_view text);
  std::string ToString() const;
};

ExplanationRecord ExplainComment(const Checkpoint& checkpoint,
                                 const Comment& comment, Method method,
                                 const LimeConfig& lime, const IgConfig& ig,
                                 OutputSelection outputs);

// Merges multi-output records per the decoder's policy, then thresholds.
std::vector<CharRange> ExtractSpans(const ExplanationRecord& record,
                                    const SpanDecoderConfig& config);

struct RunConfig {
  Preset preset = Preset::kOsBaseline;
  std::uint64_t seed = 0;
  std::string out_dir;

  // Input data: the synthetic corpus unless every path below is set.
  SynthConfig synth;
  std::string classification_path;
  std::string span_train_path;
  std::string span_test_path;
  std::string stoplist_path;  // optional, adds to lexicon.stoplist

  LexiconConfig lexicon;
  AugmentConfig augment;
  ModelConfig model;
  TrainConfig train;
  LimeConfig lime;
  IgConfig ig;
  SpanDecoderConfig decoder;
  std::vector<std::string> methods = {"lime", "ig"};
  std::size_t max_test_comments = 0;  // 0 = whole test set

  bool uses_synthetic() const;
  void Validate() const;
};

struct MethodSummary {
  std::string method;
  double mean_f1 = 0.0;  // mean over seeds of the per-run mean
  std::array<std::optional<double>, 3> bucket_f1;
  std::vector<double> per_seed_f1;
};

struct ExperimentResult {
  Preset preset = Preset::kOsBaseline;
  std::vector<MethodSummary> methods;
  EvalReport random_benchmark;
  EvalReport lexicon_benchmark;

  const MethodSummary& method(std::string_view name) const;
};

// Writes manifest.json, report.json, report.txt and per-seed artifacts under
// config.out_dir (skipped when out_dir is empty). A failing stage leaves a
// FAILED marker naming the stage and rethrows.
ExperimentResult RunExperiment(const RunConfig& config);

// Manifest round trip: the "config" block of manifest.json.
std::string RunConfigToJson(const RunConfig& config);
RunConfig RunConfigFromJson(std::string_view json);
RunConfig LoadManifest(const std::string& path);

}  // namespace offspan

#endif  // OFFSPAN_EXPERIMENT_H_

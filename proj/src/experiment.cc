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

#include "offspan/experiment.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "offspan/errors.h"
#include "offspan/json_io.h"
#include "offspan/rng.h"

namespace offspan {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

struct DerivedSeeds {
  std::uint64_t data;
  std::uint64_t augment;
  std::uint64_t random_benchmark;
  std::vector<std::uint64_t> train;  // one per repeat
  std::vector<std::uint64_t> lime;   // one per repeat, split per comment
};

DerivedSeeds Derive(const RunConfig& config) {
  DerivedSeeds d;
  d.data = DeriveSeed(config.seed, "data");
  d.augment = DeriveSeed(config.seed, "augment");
  d.random_benchmark = DeriveSeed(config.seed, "benchmark-random");
  const std::uint64_t repeats = DeriveSeed(config.seed, "repeat");
  for (std::uint64_t s : config.train.seeds) {
    const std::uint64_t r = DeriveSeed(repeats, s);
    d.train.push_back(DeriveSeed(r, "train"));
    d.lime.push_back(DeriveSeed(r, "lime"));
  }
  return d;
}

ordered_json BucketJson(const std::array<std::optional<double>, 3>& buckets) {
  ordered_json j = ordered_json::object();
  for (std::size_t b = 0; b < 3; ++b) {
    j[std::string(kBucketNames[b])] =
        buckets[b] ? ordered_json(*buckets[b]) : ordered_json(nullptr);
  }
  return j;
}

std::array<std::optional<double>, 3> BucketMeans(const EvalReport& r) {
  return {r.buckets[0].mean_f1, r.buckets[1].mean_f1, r.buckets[2].mean_f1};
}

}  // namespace

Preset ParsePreset(std::string_view name) {
  if (name == "os-baseline") return Preset::kOsBaseline;
  if (name == "os-augmentation") return Preset::kOsAugmentation;
  if (name == "os-multilabel") return Preset::kOsMultilabel;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view PresetName(Preset preset) {
  switch (preset) {
    case Preset::kOsBaseline:
      return "os-baseline";
    case Preset::kOsAugmentation:
      return "os-augmentation";
    case Preset::kOsMultilabel:
      return "os-multilabel";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  if (name == "lime") return Method::kLime;
  if (name == "ig") return Method::kIg;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view MethodName(Method method) {
  return method == Method::kLime ? "lime" : "ig";
}

OutputSelection OutputSelection::Parse(std::string_view text) {
  if (text == "auto") return {};
  if (text == "all") return {Kind::kAll, 0};
  std::size_t index = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw ConfigError("output must be auto, all or an index, got '" +
                        std::string(text) + "'");
    }
    index = index * 10 + static_cast<std::size_t>(c - '0');
  }
  if (text.empty()) throw ConfigError("empty output selection");
  return {Kind::kIndex, index};
}

std::string OutputSelection::ToString() const {
  switch (kind) {
    case Kind::kAuto:
      return "auto";
    case Kind::kAll:
      return "all";
    case Kind::kIndex:
      return std::to_string(index);
  }
  return "auto";
}

ExplanationRecord ExplainComment(const Checkpoint& checkpoint,
                                 const Comment& comment, Method method,
                                 const LimeConfig& lime, const IgConfig& ig,
                                 OutputSelection outputs) {
  ExplanationRecord record;
  record.id = comment.id;
  record.text = comment.text;
  record.method = std::string(MethodName(method));
  const std::size_t n_out = checkpoint.config().num_outputs();
  if (outputs.kind == OutputSelection::Kind::kIndex && outputs.index >= n_out) {
    throw ConfigError("output index out of range for head");
  }

  if (method == Method::kLime) {
    switch (outputs.kind) {
      case OutputSelection::Kind::kAll:
        record.attributions = ExplainLimeAllOutputs(checkpoint, comment, lime);
        break;
      case OutputSelection::Kind::kIndex: {
        LimeConfig fixed = lime;
        fixed.explained_output = outputs.index;
        record.attributions.push_back(ExplainLime(checkpoint, comment, fixed));
        break;
      }
      case OutputSelection::Kind::kAuto:
        record.attributions.push_back(ExplainLime(checkpoint, comment, lime));
        break;
    }
  } else {
    switch (outputs.kind) {
      case OutputSelection::Kind::kAll:
        for (std::size_t k = 0; k < n_out; ++k) {
          record.attributions.push_back(
              ExplainIgOutput(checkpoint, comment, ig, k));
        }
        break;
      case OutputSelection::Kind::kIndex:
        record.attributions.push_back(
            ExplainIgOutput(checkpoint, comment, ig, outputs.index));
        break;
      case OutputSelection::Kind::kAuto:
        record.attributions.push_back(ExplainIg(checkpoint, comment, ig));
        break;
    }
  }
  return record;
}

std::vector<CharRange> ExtractSpans(const ExplanationRecord& record,
                                    const SpanDecoderConfig& config) {
  if (record.attributions.empty()) {
    throw Error("explanation '" + record.id + "' has no attributions");
  }
  if (record.attributions.size() == 1) {
    return DecodeSpans(record.attributions.front(), config);
  }
  return DecodeSpans(MergeMultilabel(record.attributions, config.merge_policy,
                                     config.single_label),
                     config);
}

bool RunConfig::uses_synthetic() const {
  return classification_path.empty() && span_train_path.empty() &&
         span_test_path.empty();
}

void RunConfig::Validate() const {
  if (!uses_synthetic() &&
      (classification_path.empty() || span_train_path.empty() ||
       span_test_path.empty())) {
    throw ConfigError(
        "set all of classification_path, span_train_path and span_test_path, "
        "or none to use the synthetic corpus");
  }
  if (methods.empty()) throw ConfigError("no explanation methods selected");
  for (const std::string& m : methods) ParseMethod(m);
  synth.Validate();
  lexicon.Validate();
  augment.Validate();
  model.Validate();
  train.Validate();
  lime.Validate();
  ig.Validate();
  decoder.Validate();
}

const MethodSummary& ExperimentResult::method(std::string_view name) const {
  for (const MethodSummary& m : methods) {
    if (m.method == name) return m;
  }
  throw Error("no result for method '" + std::string(name) + "'");
}

std::string RunConfigToJson(const RunConfig& c) {
  ordered_json j;
  j["preset"] = std::string(PresetName(c.preset));
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["synth"] = c.synth;
  j["classification_path"] = c.classification_path;
  j["span_train_path"] = c.span_train_path;
  j["span_test_path"] = c.span_test_path;
  j["stoplist_path"] = c.stoplist_path;
  j["lexicon"] = c.lexicon;
  j["augment"] = c.augment;
  j["model"] = c.model;
  j["train"] = c.train;
  j["lime"] = c.lime;
  j["ig"] = c.ig;
  j["decoder"] = c.decoder;
  j["methods"] = c.methods;
  j["max_test_comments"] = c.max_test_comments;
  return j.dump(2);
}

RunConfig RunConfigFromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  json_detail::RejectUnknown(
      j, "run config",
      {"preset", "seed", "out_dir", "synth", "classification_path",
       "span_train_path", "span_test_path", "stoplist_path", "lexicon",
       "augment", "model", "train", "lime", "ig", "decoder", "methods",
       "max_test_comments"});
  RunConfig c;
  std::string preset(PresetName(c.preset));
  json_detail::Read(j, "preset", preset);
  c.preset = ParsePreset(preset);
  json_detail::Read(j, "seed", c.seed);
  json_detail::Read(j, "out_dir", c.out_dir);
  json_detail::Read(j, "synth", c.synth);
  json_detail::Read(j, "classification_path", c.classification_path);
  json_detail::Read(j, "span_train_path", c.span_train_path);
  json_detail::Read(j, "span_test_path", c.span_test_path);
  json_detail::Read(j, "stoplist_path", c.stoplist_path);
  json_detail::Read(j, "lexicon", c.lexicon);
  json_detail::Read(j, "augment", c.augment);
  json_detail::Read(j, "model", c.model);
  json_detail::Read(j, "train", c.train);
  json_detail::Read(j, "lime", c.lime);
  json_detail::Read(j, "ig", c.ig);
  json_detail::Read(j, "decoder", c.decoder);
  json_detail::Read(j, "methods", c.methods);
  json_detail::Read(j, "max_test_comments", c.max_test_comments);
  return c;
}

RunConfig LoadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = nlohmann::json::parse(buf.str());
  if (!j.contains("config")) throw ConfigError("manifest has no config block");
  return RunConfigFromJson(j["config"].dump());
}

ExperimentResult RunExperiment(const RunConfig& config) {
  config.Validate();
  const bool write = !config.out_dir.empty();
  const fs::path out(config.out_dir);
  std::string stage = "setup";
  const DerivedSeeds seeds = Derive(config);

  auto fail = [&](const std::string& what) {
    if (write) {
      std::error_code ec;
      fs::create_directories(out, ec);
      std::ofstream marker(out / "FAILED", std::ios::binary);
      marker << "stage: " << stage << "\nerror: " << what << "\n";
    }
    throw Error("stage '" + stage + "' failed: " + what);
  };

  try {
    if (write) {
      fs::create_directories(out / "data");
      fs::remove(out / "FAILED");
      ordered_json manifest;
      manifest["format"] = "offspan-manifest";
      manifest["version"] = 1;
      manifest["config"] = ordered_json::parse(RunConfigToJson(config));
      manifest["derived_seeds"] = {{"data", seeds.data},
                                   {"augment", seeds.augment},
                                   {"random_benchmark", seeds.random_benchmark},
                                   {"train", seeds.train},
                                   {"lime", seeds.lime}};
      WriteText(out / "manifest.json", manifest.dump(2) + "\n");
    }

    stage = "data";
    std::vector<Comment> classification;
    std::vector<Comment> span_train;
    std::vector<Comment> span_test;
    LexiconConfig lexicon_config = config.lexicon;
    if (config.uses_synthetic()) {
      SynthConfig synth = config.synth;
      synth.seed = seeds.data;
      SynthCorpus corpus = GenerateSynthCorpus(synth);
      classification = std::move(corpus.classification);
      span_train = std::move(corpus.span_train);
      span_test = std::move(corpus.span_test);
      lexicon_config.stoplist.insert(lexicon_config.stoplist.end(),
                                     corpus.pronouns.begin(),
                                     corpus.pronouns.end());
      if (write) {
        SaveDataset((out / "data" / "classification.jsonl").string(),
                    classification, DatasetKind::kClassification);
        SaveDataset((out / "data" / "span_train.jsonl").string(), span_train,
                    DatasetKind::kSpan);
        SaveDataset((out / "data" / "span_test.jsonl").string(), span_test,
                    DatasetKind::kSpan);
      }
    } else {
      classification =
          LoadDataset(config.classification_path, DatasetKind::kClassification);
      span_train = LoadDataset(config.span_train_path, DatasetKind::kSpan);
      span_test = LoadDataset(config.span_test_path, DatasetKind::kSpan);
    }
    if (!config.stoplist_path.empty()) {
      for (std::string& w : LoadWordList(config.stoplist_path)) {
        lexicon_config.stoplist.push_back(std::move(w));
      }
    }
    if (config.max_test_comments > 0 &&
        span_test.size() > config.max_test_comments) {
      span_test.resize(config.max_test_comments);
    }

    ExperimentResult result;
    result.preset = config.preset;

    stage = "benchmark";
    result.random_benchmark = BenchmarkRandom(span_test, seeds.random_benchmark);
    result.lexicon_benchmark = BenchmarkLexicon(span_train, span_test);

    std::vector<Comment> train_data;
    ModelConfig model_config = config.model;
    if (config.preset == Preset::kOsBaseline) {
      train_data = std::move(classification);
      model_config.head = HeadKind::kBinary;
    } else {
      stage = "lexicon";
      const Lexicon lexicon = BuildLexicon(span_train, lexicon_config);
      if (write) SaveLexicon((out / "data" / "lexicon.txt").string(), lexicon);

      stage = "augment";
      std::vector<Comment> source;
      for (const Comment& c : classification) {
        if (c.binary_label && *c.binary_label == 0) {
          Comment s = c;
          s.gold_spans.reset();
          source.push_back(std::move(s));
        }
      }
      AugmentConfig augment = config.augment;
      augment.seed = seeds.augment;
      AugmentedCorpus augmented = RunAugmentation(source, lexicon, augment);
      if (write) {
        SaveDataset((out / "data" / "augmented.classification.jsonl").string(),
                    augmented.classification, DatasetKind::kClassification);
        SaveDataset((out / "data" / "augmented.multilabel.jsonl").string(),
                    augmented.multilabel, DatasetKind::kMultilabel);
      }
      if (config.preset == Preset::kOsAugmentation) {
        train_data = std::move(augmented.classification);
        model_config.head = HeadKind::kBinary;
      } else {
        train_data = std::move(augmented.multilabel);
        model_config.head = HeadKind::kMultilabel3;
      }
    }
    const OutputSelection selection =
        model_config.head == HeadKind::kMultilabel3
            ? OutputSelection{OutputSelection::Kind::kAll, 0}
            : OutputSelection{};

    std::vector<Method> methods;
    for (const std::string& m : config.methods) {
      methods.push_back(ParseMethod(m));
      result.methods.push_back({m, 0.0, {}, {}});
    }
    std::vector<std::array<double, 3>> bucket_sums(methods.size(),
                                                   {0.0, 0.0, 0.0});
    std::vector<std::array<std::size_t, 3>> bucket_counts(methods.size(),
                                                          {0, 0, 0});

    for (std::size_t r = 0; r < config.train.seeds.size(); ++r) {
      const std::string tag = "seed-" + std::to_string(config.train.seeds[r]);
      const fs::path run_dir = out / tag;
      if (write) fs::create_directories(run_dir);

      stage = "train[" + tag + "]";
      model_config.seed = seeds.train[r];
      const Checkpoint checkpoint =
          Train(train_data, model_config, config.train);
      if (write) SaveCheckpoint((run_dir / "checkpoint.bin").string(), checkpoint);

      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string name(MethodName(methods[mi]));
        stage = "explain-" + name + "[" + tag + "]";
        std::vector<ExplanationRecord> records;
        records.reserve(span_test.size());
        for (std::size_t i = 0; i < span_test.size(); ++i) {
          LimeConfig lime = config.lime;
          lime.seed = DeriveSeed(seeds.lime[r], i);
          records.push_back(ExplainComment(checkpoint, span_test[i],
                                           methods[mi], lime, config.ig,
                                           selection));
        }

        stage = "decode-" + name + "[" + tag + "]";
        std::vector<Comment> predictions;
        predictions.reserve(records.size());
        for (const ExplanationRecord& rec : records) {
          Comment p;
          p.id = rec.id;
          p.text = rec.text;
          p.gold_spans = ExtractSpans(rec, config.decoder);
          predictions.push_back(std::move(p));
        }

        stage = "evaluate-" + name + "[" + tag + "]";
        EvalReport report = Evaluate(predictions, span_test);
        report.settings = {
            {"preset", std::string(PresetName(config.preset))},
            {"method", name},
            {"seed", std::to_string(config.train.seeds[r])},
            {"threshold", ordered_json(config.decoder.threshold).dump()},
            {"merge_policy", std::string(MergePolicyName(config.decoder.merge_policy))},
            {"coalesce_adjacent", config.decoder.coalesce_adjacent ? "true" : "false"}};

        if (write) {
          std::ostringstream attr;
          WriteExplanations(attr, records);
          WriteText(run_dir / (name + ".attributions.jsonl"), attr.str());
          SaveDataset((run_dir / (name + ".predictions.jsonl")).string(),
                      predictions, DatasetKind::kSpan);
          WriteText(run_dir / (name + ".report.json"),
                    FormatReportJson(report) + "\n");
        }

        MethodSummary& summary = result.methods[mi];
        summary.per_seed_f1.push_back(report.mean_f1);
        for (std::size_t b = 0; b < 3; ++b) {
          if (report.buckets[b].mean_f1) {
            bucket_sums[mi][b] += *report.buckets[b].mean_f1;
            ++bucket_counts[mi][b];
          }
        }
      }
    }

    stage = "report";
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      MethodSummary& summary = result.methods[mi];
      double total = 0.0;
      for (double f : summary.per_seed_f1) total += f;
      summary.mean_f1 = total / static_cast<double>(summary.per_seed_f1.size());
      for (std::size_t b = 0; b < 3; ++b) {
        if (bucket_counts[mi][b] > 0) {
          summary.bucket_f1[b] =
              bucket_sums[mi][b] / static_cast<double>(bucket_counts[mi][b]);
        }
      }
    }

    if (write) {
      ordered_json report;
      report["preset"] = std::string(PresetName(config.preset));
      ordered_json methods_json = ordered_json::array();
      for (const MethodSummary& m : result.methods) {
        methods_json.push_back({{"method", m.method},
                                {"mean_f1", m.mean_f1},
                                {"per_seed_f1", m.per_seed_f1},
                                {"bucket_f1", BucketJson(m.bucket_f1)}});
      }
      report["methods"] = methods_json;
      report["benchmarks"] = {
          {"random",
           {{"mean_f1", result.random_benchmark.mean_f1},
            {"bucket_f1", BucketJson(BucketMeans(result.random_benchmark))}}},
          {"lexicon",
           {{"mean_f1", result.lexicon_benchmark.mean_f1},
            {"bucket_f1", BucketJson(BucketMeans(result.lexicon_benchmark))}}}};
      WriteText(out / "report.json", report.dump(2) + "\n");

      std::vector<std::pair<std::string, EvalReport>> rows;
      rows.emplace_back("BENCHMARK 1 (random)", result.random_benchmark);
      rows.emplace_back("BENCHMARK 2 (lexicon)", result.lexicon_benchmark);
      for (const MethodSummary& m : result.methods) {
        EvalReport r;
        r.mean_f1 = m.mean_f1;
        for (std::size_t b = 0; b < 3; ++b) r.buckets[b].mean_f1 = m.bucket_f1[b];
        rows.emplace_back(std::string(PresetName(config.preset)) + " " + m.method,
                          r);
      }
      WriteText(out / "report.txt", FormatReportTable(rows));
    }
    return result;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  throw Error("unreachable");
}

}  // namespace offspan

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

// offspan: command-line front end for the span extraction pipeline.
//
// Every flag can also come from a TOML file passed with --config. Keys of a
// subcommand live in a section named after it, e.g.
//
//   [train]
//   epochs = 10
//   lr = 0.003
//
// Command-line flags override the file. Unknown keys are rejected.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offspan/augment.h"
#include "offspan/errors.h"
#include "offspan/eval.h"
#include "offspan/experiment.h"
#include "offspan/synth.h"

namespace offspan {
namespace {

namespace fs = std::filesystem;

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::vector<ExplanationRecord> LoadExplanations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadExplanations(in);
}

// Copies `value` into `target` only when the flag was given, on the command
// line or in the config file.
template <typename T>
void SetIf(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count() > 0) target = value;
}

void AddMakeSynthetic(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "make-synthetic", "Write the seeded planted-token corpus");
  auto c = std::make_shared<SynthConfig>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--out-dir", *out, "Output directory")->required();
  cmd->add_option("--seed", c->seed, "Generator seed");
  cmd->add_option("--comments", c->num_comments, "Classification comments");
  cmd->add_option("--span-train", c->span_train, "Span-labelled train size");
  cmd->add_option("--span-test", c->span_test, "Span-labelled test size");
  cmd->add_option("--lexicon-size", c->lexicon_size, "Offensive words");
  cmd->add_option("--neutral-vocab", c->neutral_vocab, "Neutral words");
  cmd->callback([c, out] {
    c->Validate();
    const SynthCorpus corpus = GenerateSynthCorpus(*c);
    fs::create_directories(*out);
    const fs::path dir(*out);
    SaveDataset((dir / "classification.jsonl").string(), corpus.classification,
                DatasetKind::kClassification);
    SaveDataset((dir / "span_train.jsonl").string(), corpus.span_train,
                DatasetKind::kSpan);
    SaveDataset((dir / "span_test.jsonl").string(), corpus.span_test,
                DatasetKind::kSpan);
    std::string stop;
    for (const std::string& w : corpus.pronouns) stop += w + "\n";
    WriteFile((dir / "stoplist.txt").string(), stop);
    std::printf("wrote %zu + %zu + %zu comments to %s\n",
                corpus.classification.size(), corpus.span_train.size(),
                corpus.span_test.size(), out->c_str());
  });
}

void AddBuildLexicon(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "build-lexicon", "Collect offensive words from short gold phrases");
  struct Args {
    std::string spans, out, stoplist_file;
    LexiconConfig config;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--spans", a->spans, "Span-labelled dataset")->required();
  cmd->add_option("--out", a->out, "Lexicon file, one word per line")
      ->required();
  cmd->add_option("--max-phrase-chars", a->config.max_phrase_chars,
                  "Keep phrases strictly shorter than this")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stoplist", a->config.stoplist, "Words to drop");
  cmd->add_option("--stoplist-file", a->stoplist_file,
                  "File of words to drop, one per line");
  cmd->callback([a] {
    LexiconConfig config = a->config;
    if (!a->stoplist_file.empty()) {
      for (std::string& w : LoadWordList(a->stoplist_file)) {
        config.stoplist.push_back(std::move(w));
      }
    }
    const auto data = LoadDataset(a->spans, DatasetKind::kSpan);
    const Lexicon lexicon = BuildLexicon(data, config);
    SaveLexicon(a->out, lexicon);
    std::printf("lexicon: %zu words -> %s\n", lexicon.size(), a->out.c_str());
  });
}

void AddAugment(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "augment", "Substitute lexicon words into non-offensive comments");
  struct Args {
    std::string source, lexicon, out_classification, out_multilabel;
    AugmentConfig config;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--source", a->source,
                  "Classification dataset; label-0 comments are used")
      ->required();
  cmd->add_option("--lexicon", a->lexicon, "Lexicon file")->required();
  cmd->add_option("--out-classification", a->out_classification,
                  "Augmented classification dataset");
  cmd->add_option("--out-multilabel", a->out_multilabel,
                  "Augmented multilabel dataset");
  cmd->add_option("--masks", a->config.masks_per_comment,
                  "Variants per source comment");
  cmd->add_option("--mask-prob", a->config.mask_probability,
                  "Per-token replacement probability");
  cmd->add_option("--seed", a->config.seed, "Augmentation seed");
  cmd->callback([a] {
    if (a->out_classification.empty() && a->out_multilabel.empty()) {
      throw ConfigError(
          "give --out-classification and/or --out-multilabel");
    }
    std::vector<Comment> source;
    for (Comment& c : LoadDataset(a->source, DatasetKind::kClassification)) {
      if (*c.binary_label == 0) source.push_back(std::move(c));
    }
    const AugmentedCorpus corpus =
        RunAugmentation(source, LoadLexicon(a->lexicon), a->config);
    if (!a->out_classification.empty()) {
      SaveDataset(a->out_classification, corpus.classification,
                  DatasetKind::kClassification);
    }
    if (!a->out_multilabel.empty()) {
      SaveDataset(a->out_multilabel, corpus.multilabel,
                  DatasetKind::kMultilabel);
    }
    std::printf("augmented %zu sources into %zu records\n", source.size(),
                corpus.classification.size());
  });
}

void AddMakeMultilabel(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "make-multilabel", "Derive start/middle/end labels from gold spans");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--spans", *in, "Span-labelled dataset")->required();
  cmd->add_option("--out", *out, "Multilabel dataset")->required();
  cmd->callback([in, out] {
    const auto data = MakeMultilabel(LoadDataset(*in, DatasetKind::kSpan));
    SaveDataset(*out, data, DatasetKind::kMultilabel);
    std::printf("wrote %zu records to %s\n", data.size(), out->c_str());
  });
}

void AddModelOptions(CLI::App* cmd, ModelConfig& m) {
  cmd->add_option("--vocab-buckets", m.vocab_buckets, "Hashed vocabulary size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--embed-dim", m.embed_dim, "Embedding width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--hidden-dim", m.hidden_dim, "Hidden width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-seq-length", m.max_seq_length,
                  "Sequence cap including BOS and EOS");
}

void AddTrainOptions(CLI::App* cmd, TrainConfig& t) {
  cmd->add_option("--epochs", t.epochs, "Training epochs");
  cmd->add_option("--batch-size", t.batch_size, "Minibatch size");
  cmd->add_option("--lr", t.learning_rate, "Peak learning rate");
  cmd->add_option("--warmup-ratio", t.warmup_ratio, "Warmup fraction");
  cmd->add_option("--weight-decay", t.weight_decay, "AdamW weight decay");
}

void AddTrain(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Train a classifier checkpoint");
  struct Args {
    std::string data, kind = "classification", out;
    ModelConfig model;
    TrainConfig train;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--data", a->data, "Training dataset")->required();
  cmd->add_option("--kind", a->kind,
                  "classification (binary head) or multilabel (3 heads)")
      ->check(CLI::IsMember({"classification", "multilabel"}));
  cmd->add_option("--out", a->out, "Checkpoint path")->required();
  cmd->add_option("--seed", a->model.seed, "Init, split and shuffle seed");
  AddModelOptions(cmd, a->model);
  AddTrainOptions(cmd, a->train);
  cmd->callback([a] {
    const DatasetKind kind = ParseDatasetKind(a->kind);
    ModelConfig model = a->model;
    model.head = kind == DatasetKind::kMultilabel ? HeadKind::kMultilabel3
                                                  : HeadKind::kBinary;
    const auto data = LoadDataset(a->data, kind);
    const Checkpoint ckpt = Train(data, model, a->train);
    SaveCheckpoint(a->out, ckpt);
    const TrainMeta& m = ckpt.meta();
    std::printf("best epoch %zu of %zu, held-out loss %.6f -> %s\n",
                m.best_epoch, m.epochs_run, m.final_loss, a->out.c_str());
  });
}

void AddExplain(CLI::App& app) {
  auto* cmd = app.add_subcommand("explain",
                                 "Attribute model outputs to tokens");
  struct Args {
    std::string checkpoint, data, kind = "span", method = "lime",
                output = "auto", out, html;
    std::uint64_t seed = 0;
    LimeConfig lime;
    IgConfig ig;
    std::string scheme = "right";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--checkpoint", a->checkpoint, "Model checkpoint")
      ->required();
  cmd->add_option("--data", a->data, "Comments to explain")->required();
  cmd->add_option("--kind", a->kind, "Dataset kind of --data")
      ->check(CLI::IsMember({"span", "classification", "multilabel"}));
  cmd->add_option("--method", a->method, "lime or ig")
      ->check(CLI::IsMember({"lime", "ig"}));
  cmd->add_option("--output", a->output,
                  "auto (offensive class / predicted heads), all, or an index");
  cmd->add_option("--out", a->out, "Attributions JSONL")->required();
  cmd->add_option("--html", a->html, "Also render a highlighted HTML report");
  cmd->add_option("--seed", a->seed,
                  "LIME seed; comment i uses a seed derived from it and i");
  cmd->add_option("--samples", a->lime.num_samples, "LIME perturbations");
  cmd->add_option("--kernel-width", a->lime.kernel_width, "LIME kernel width");
  cmd->add_option("--ridge", a->lime.ridge_lambda, "LIME ridge lambda");
  cmd->add_option("--mask-token", a->lime.mask_token, "LIME mask string");
  cmd->add_option("--steps", a->ig.steps, "IG Riemann steps");
  cmd->add_option("--scheme", a->scheme, "IG scheme: right or trapezoid");
  cmd->add_option("--tolerance", a->ig.completeness_tolerance,
                  "IG completeness warning threshold");
  cmd->callback([a] {
    const Checkpoint ckpt = LoadCheckpoint(a->checkpoint);
    const auto data = LoadDataset(a->data, ParseDatasetKind(a->kind));
    const Method method = ParseMethod(a->method);
    const OutputSelection selection = OutputSelection::Parse(a->output);
    IgConfig ig = a->ig;
    ig.scheme = ParseRiemannScheme(a->scheme);
    std::vector<ExplanationRecord> records;
    records.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      LimeConfig lime = a->lime;
      lime.seed = DeriveSeed(a->seed, i);
      records.push_back(
          ExplainComment(ckpt, data[i], method, lime, ig, selection));
    }
    std::ostringstream out;
    WriteExplanations(out, records);
    WriteFile(a->out, out.str());
    if (!a->html.empty()) WriteFile(a->html, RenderHtml(records));
    std::size_t warnings = 0;
    for (const auto& r : records) {
      for (const auto& at : r.attributions) {
        warnings += at.diagnostics.warnings.size();
      }
    }
    std::printf("explained %zu comments with %s (%zu warnings) -> %s\n",
                records.size(), a->method.c_str(), warnings, a->out.c_str());
  });
}

void AddExtractSpans(CLI::App& app) {
  auto* cmd = app.add_subcommand("extract-spans",
                                 "Threshold attributions into character spans");
  struct Args {
    std::string attributions, out, merge = "max";
    SpanDecoderConfig decoder;
    bool no_coalesce = false;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--attributions", a->attributions, "Attributions JSONL")
      ->required();
  cmd->add_option("--out", a->out, "Predicted span dataset")->required();
  cmd->add_option("--threshold", a->decoder.threshold,
                  "Tokens scoring at or above this are offensive");
  cmd->add_option("--merge", a->merge,
                  "Multi-output merge: max, sum or single-label");
  cmd->add_option("--single-label", a->decoder.single_label,
                  "Output used by the single-label merge");
  cmd->add_flag("--no-coalesce", a->no_coalesce,
                "Keep adjacent offensive tokens as separate spans");
  cmd->callback([a] {
    SpanDecoderConfig decoder = a->decoder;
    decoder.merge_policy = ParseMergePolicy(a->merge);
    decoder.coalesce_adjacent = !a->no_coalesce;
    decoder.Validate();
    std::vector<Comment> predictions;
    for (const ExplanationRecord& r : LoadExplanations(a->attributions)) {
      Comment p;
      p.id = r.id;
      p.text = r.text;
      p.gold_spans = ExtractSpans(r, decoder);
      predictions.push_back(std::move(p));
    }
    SaveDataset(a->out, predictions, DatasetKind::kSpan);
    std::printf("wrote spans for %zu comments -> %s\n", predictions.size(),
                a->out.c_str());
  });
}

void PrintAndSave(const std::string& label, const EvalReport& report,
                  const std::string& out) {
  const std::pair<std::string, EvalReport> rows[] = {{label, report}};
  std::fputs(FormatReportTable(rows).c_str(), stdout);
  if (!out.empty()) WriteFile(out, FormatReportJson(report) + "\n");
}

void AddEvaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate",
                                 "Score predicted spans against gold");
  struct Args {
    std::string predictions, gold, out;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--predictions", a->predictions, "Predicted span dataset")
      ->required();
  cmd->add_option("--gold", a->gold, "Gold span dataset")->required();
  cmd->add_option("--out", a->out, "Report JSON");
  cmd->callback([a] {
    const EvalReport report =
        Evaluate(LoadDataset(a->predictions, DatasetKind::kSpan),
                 LoadDataset(a->gold, DatasetKind::kSpan));
    PrintAndSave(a->predictions, report, a->out);
  });
}

void AddBenchmark(CLI::App& app) {
  auto* cmd = app.add_subcommand("benchmark",
                                 "Score the random or lexicon baseline");
  struct Args {
    std::string which = "random", gold, train, out;
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--which", a->which, "random or lexicon")
      ->check(CLI::IsMember({"random", "lexicon"}));
  cmd->add_option("--gold", a->gold, "Gold span test set")->required();
  cmd->add_option("--train", a->train,
                  "Span-labelled train set (lexicon baseline)");
  cmd->add_option("--seed", a->seed, "Random baseline seed");
  cmd->add_option("--out", a->out, "Report JSON");
  cmd->callback([a] {
    const auto gold = LoadDataset(a->gold, DatasetKind::kSpan);
    if (a->which == "random") {
      PrintAndSave("BENCHMARK 1 (random)", BenchmarkRandom(gold, a->seed),
                   a->out);
      return;
    }
    if (a->train.empty()) throw ConfigError("lexicon baseline needs --train");
    PrintAndSave("BENCHMARK 2 (lexicon)",
                 BenchmarkLexicon(LoadDataset(a->train, DatasetKind::kSpan),
                                  gold),
                 a->out);
  });
}

void AddRun(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "run", "Run a preset experiment end to end and write a manifest");
  struct Args {
    std::string manifest, preset = "os-baseline", out, classification,
                span_train, span_test, stoplist_file, merge = "max",
                scheme = "right";
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;
    std::size_t max_test = 0;
    ModelConfig model;
    TrainConfig train;
    SynthConfig synth;
    LimeConfig lime;
    IgConfig ig;
    SpanDecoderConfig decoder;
    AugmentConfig augment;
    LexiconConfig lexicon;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option(
      "--manifest", a->manifest,
      "Replay the config of an earlier run; other flags override it");
  auto* preset = cmd->add_option("--preset", a->preset,
                                 "os-baseline, os-augmentation or "
                                 "os-multilabel");
  auto* out = cmd->add_option("--out-dir", a->out, "Run directory");
  auto* seed = cmd->add_option("--seed", a->seed, "Root seed");
  auto* seeds = cmd->add_option("--seeds", a->seeds, "Training repeats");
  auto* methods = cmd->add_option("--methods", a->methods, "lime and/or ig");
  auto* cls = cmd->add_option("--classification", a->classification,
                              "Classification dataset (else synthetic)");
  auto* st = cmd->add_option("--span-train", a->span_train,
                             "Span-labelled train dataset");
  auto* se = cmd->add_option("--span-test", a->span_test,
                             "Span-labelled test dataset");
  auto* stop = cmd->add_option("--stoplist-file", a->stoplist_file,
                               "Extra lexicon stoplist");
  auto* max_test = cmd->add_option("--max-test-comments", a->max_test,
                                   "Explain only the first N test comments");
  auto* vocab = cmd->add_option("--vocab-buckets", a->model.vocab_buckets,
                                "Hashed vocabulary size");
  auto* embed = cmd->add_option("--embed-dim", a->model.embed_dim,
                                "Embedding width");
  auto* hidden = cmd->add_option("--hidden-dim", a->model.hidden_dim,
                                 "Hidden width");
  auto* seq = cmd->add_option("--max-seq-length", a->model.max_seq_length,
                              "Sequence cap");
  auto* epochs = cmd->add_option("--epochs", a->train.epochs, "Epochs");
  auto* batch = cmd->add_option("--batch-size", a->train.batch_size,
                                "Minibatch size");
  auto* lr = cmd->add_option("--lr", a->train.learning_rate, "Learning rate");
  auto* samples = cmd->add_option("--lime-samples", a->lime.num_samples,
                                  "LIME perturbations");
  auto* width = cmd->add_option("--kernel-width", a->lime.kernel_width,
                                "LIME kernel width");
  auto* ridge = cmd->add_option("--ridge", a->lime.ridge_lambda,
                                "LIME ridge lambda");
  auto* steps = cmd->add_option("--ig-steps", a->ig.steps, "IG steps");
  auto* scheme = cmd->add_option("--ig-scheme", a->scheme,
                                 "IG scheme: right or trapezoid");
  auto* threshold = cmd->add_option("--threshold", a->decoder.threshold,
                                    "Span decision threshold");
  auto* merge = cmd->add_option("--merge", a->merge,
                                "Multi-output merge policy");
  auto* masks = cmd->add_option("--masks", a->augment.masks_per_comment,
                                "Augmented variants per comment");
  auto* mask_prob = cmd->add_option("--mask-prob",
                                    a->augment.mask_probability,
                                    "Replacement probability");
  auto* phrase = cmd->add_option("--max-phrase-chars",
                                 a->lexicon.max_phrase_chars,
                                 "Lexicon phrase length cap");
  auto* comments = cmd->add_option("--synth-comments", a->synth.num_comments,
                                   "Synthetic classification size");
  auto* lex_size = cmd->add_option("--synth-lexicon-size",
                                   a->synth.lexicon_size,
                                   "Synthetic offensive words");
  cmd->callback([=] {
    RunConfig c = a->manifest.empty() ? RunConfig{} : LoadManifest(a->manifest);
    if (preset->count() || a->manifest.empty()) {
      c.preset = ParsePreset(a->preset);
    }
    SetIf(out, c.out_dir, a->out);
    SetIf(seed, c.seed, a->seed);
    SetIf(seeds, c.train.seeds, a->seeds);
    SetIf(methods, c.methods, a->methods);
    SetIf(cls, c.classification_path, a->classification);
    SetIf(st, c.span_train_path, a->span_train);
    SetIf(se, c.span_test_path, a->span_test);
    SetIf(stop, c.stoplist_path, a->stoplist_file);
    SetIf(max_test, c.max_test_comments, a->max_test);
    SetIf(vocab, c.model.vocab_buckets, a->model.vocab_buckets);
    SetIf(embed, c.model.embed_dim, a->model.embed_dim);
    SetIf(hidden, c.model.hidden_dim, a->model.hidden_dim);
    SetIf(seq, c.model.max_seq_length, a->model.max_seq_length);
    SetIf(epochs, c.train.epochs, a->train.epochs);
    SetIf(batch, c.train.batch_size, a->train.batch_size);
    SetIf(lr, c.train.learning_rate, a->train.learning_rate);
    SetIf(samples, c.lime.num_samples, a->lime.num_samples);
    SetIf(width, c.lime.kernel_width, a->lime.kernel_width);
    SetIf(ridge, c.lime.ridge_lambda, a->lime.ridge_lambda);
    SetIf(steps, c.ig.steps, a->ig.steps);
    if (scheme->count()) c.ig.scheme = ParseRiemannScheme(a->scheme);
    SetIf(threshold, c.decoder.threshold, a->decoder.threshold);
    if (merge->count()) c.decoder.merge_policy = ParseMergePolicy(a->merge);
    SetIf(masks, c.augment.masks_per_comment, a->augment.masks_per_comment);
    SetIf(mask_prob, c.augment.mask_probability, a->augment.mask_probability);
    SetIf(phrase, c.lexicon.max_phrase_chars, a->lexicon.max_phrase_chars);
    SetIf(comments, c.synth.num_comments, a->synth.num_comments);
    SetIf(lex_size, c.synth.lexicon_size, a->synth.lexicon_size);
    if (c.out_dir.empty()) throw ConfigError("run needs --out-dir");

    const ExperimentResult r = RunExperiment(c);
    std::printf("%-24s %8s\n", "row", "F1");
    std::printf("%-24s %8.4f\n", "BENCHMARK 1 (random)",
                r.random_benchmark.mean_f1);
    std::printf("%-24s %8.4f\n", "BENCHMARK 2 (lexicon)",
                r.lexicon_benchmark.mean_f1);
    for (const MethodSummary& m : r.methods) {
      const std::string row = std::string(PresetName(c.preset)) + " " +
                              m.method;
      std::printf("%-24s %8.4f\n", row.c_str(), m.mean_f1);
    }
    std::printf("artifacts in %s\n", c.out_dir.c_str());
  });
}

}  // namespace
}  // namespace offspan

int main(int argc, char** argv) {
  CLI::App app{"offspan: zero-shot offensive span extraction"};
  app.set_config("--config", "", "TOML file with defaults for any flag");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  offspan::AddMakeSynthetic(app);
  offspan::AddBuildLexicon(app);
  offspan::AddAugment(app);
  offspan::AddMakeMultilabel(app);
  offspan::AddTrain(app);
  offspan::AddExplain(app);
  offspan::AddExtractSpans(app);
  offspan::AddEvaluate(app);
  offspan::AddBenchmark(app);
  offspan::AddRun(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const offspan::Error& e) {
    std::fprintf(stderr, "offspan: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "offspan: internal error: %s\n", e.what());
    return 2;
  }
  return 0;
}

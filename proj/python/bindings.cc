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

// Python bindings for the offspan core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "offspan/augment.h"
#include "offspan/errors.h"
#include "offspan/eval.h"
#include "offspan/experiment.h"

namespace py = pybind11;

namespace offspan {
namespace {

Attribution Explain(const Checkpoint& ckpt, const std::string& text,
                    const std::string& method, std::size_t output,
                    std::size_t samples, std::uint64_t seed,
                    std::size_t steps) {
  Comment c;
  c.id = "py";
  c.text = text;
  if (method == "lime") {
    LimeConfig config;
    config.num_samples = samples;
    config.seed = seed;
    config.explained_output = output;
    return ExplainLime(ckpt, c, config);
  }
  if (method == "ig") {
    IgConfig config;
    config.steps = steps;
    config.explained_output = output;
    return ExplainIg(ckpt, c, config);
  }
  throw ConfigError("unknown method '" + method + "'");
}

py::dict ReportToDict(const EvalReport& r) {
  py::dict buckets;
  for (std::size_t b = 0; b < 3; ++b) {
    py::dict d;
    d["count"] = r.buckets[b].count;
    d["mean_f1"] = r.buckets[b].mean_f1;
    buckets[py::str(std::string(kBucketNames[b]))] = d;
  }
  py::dict out;
  out["mean_f1"] = r.mean_f1;
  out["per_comment_f1"] = r.per_comment_f1;
  out["buckets"] = buckets;
  return out;
}

}  // namespace
}  // namespace offspan

PYBIND11_MODULE(_core, m) {
  using namespace offspan;
  m.doc() = "Zero-shot offensive span extraction core";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<CharRange>(m, "CharRange")
      .def(py::init([](std::size_t s, std::size_t e) {
             return CharRange{s, e};
           }),
           py::arg("start"), py::arg("end"))
      .def_readwrite("start", &CharRange::start)
      .def_readwrite("end", &CharRange::end)
      .def("__eq__", [](const CharRange& a, const CharRange& b) {
        return a == b;
      })
      .def("__repr__", [](const CharRange& r) {
        return "CharRange(" + std::to_string(r.start) + ", " +
               std::to_string(r.end) + ")";
      });

  py::class_<TokenSpan>(m, "TokenSpan")
      .def_readonly("text", &TokenSpan::text)
      .def_readonly("range", &TokenSpan::range);

  py::class_<Comment>(m, "Comment")
      .def(py::init<>())
      .def(py::init([](std::string id, std::string text) {
             Comment c;
             c.id = std::move(id);
             c.text = std::move(text);
             return c;
           }),
           py::arg("id"), py::arg("text"))
      .def_readwrite("id", &Comment::id)
      .def_readwrite("text", &Comment::text)
      .def_readwrite("gold_spans", &Comment::gold_spans)
      .def_readwrite("binary_label", &Comment::binary_label)
      .def_readwrite("position_labels", &Comment::position_labels)
      .def("__eq__", [](const Comment& a, const Comment& b) { return a == b; });

  m.def("tokenize", &Tokenize, py::arg("text"),
        "Whitespace tokens with code point offsets");
  m.def(
      "load_dataset",
      [](const std::string& path, const std::string& kind) {
        return LoadDataset(path, ParseDatasetKind(kind));
      },
      py::arg("path"), py::arg("kind"));
  m.def(
      "save_dataset",
      [](const std::string& path, const std::vector<Comment>& comments,
         const std::string& kind) {
        SaveDataset(path, comments, ParseDatasetKind(kind));
      },
      py::arg("path"), py::arg("comments"), py::arg("kind"));

  m.def(
      "char_f1",
      [](const std::vector<CharRange>& p, const std::vector<CharRange>& g) {
        return CharF1(p, g);
      },
      py::arg("predicted"), py::arg("gold"));
  m.def(
      "evaluate",
      [](const std::vector<Comment>& p, const std::vector<Comment>& g) {
        return ReportToDict(Evaluate(p, g));
      },
      py::arg("predictions"), py::arg("gold"));

  m.def(
      "build_lexicon",
      [](const std::vector<Comment>& spans, std::vector<std::string> stoplist,
         std::size_t max_phrase_chars) {
        LexiconConfig config;
        config.stoplist = std::move(stoplist);
        config.max_phrase_chars = max_phrase_chars;
        return BuildLexicon(spans, config).words();
      },
      py::arg("span_dataset"), py::arg("stoplist") = std::vector<std::string>{},
      py::arg("max_phrase_chars") = 20);
  m.def(
      "augment",
      [](const std::vector<Comment>& source,
         const std::vector<std::string>& lexicon, std::size_t masks,
         double mask_probability, std::uint64_t seed) {
        AugmentConfig config;
        config.masks_per_comment = masks;
        config.mask_probability = mask_probability;
        config.seed = seed;
        AugmentedCorpus c = RunAugmentation(source, Lexicon(lexicon), config);
        return py::make_tuple(c.classification, c.multilabel);
      },
      py::arg("source"), py::arg("lexicon"), py::arg("masks") = 3,
      py::arg("mask_probability") = 0.3, py::arg("seed") = 0,
      "Returns (classification records, multilabel records)");

  py::class_<Checkpoint>(m, "Checkpoint")
      .def("predict",
           [](const Checkpoint& c, const std::string& text) {
             return Forward(c, Encode(text, c.config()));
           })
      .def("save", [](const Checkpoint& c,
                      const std::string& path) { SaveCheckpoint(path, c); })
      .def_static("load", &LoadCheckpoint)
      .def_property_readonly("num_outputs", [](const Checkpoint& c) {
        return c.config().num_outputs();
      });

  m.def(
      "train",
      [](const std::vector<Comment>& data, bool multilabel,
         std::size_t vocab_buckets, std::size_t embed_dim,
         std::size_t hidden_dim, std::size_t epochs, double learning_rate,
         std::uint64_t seed) {
        ModelConfig model;
        model.head = multilabel ? HeadKind::kMultilabel3 : HeadKind::kBinary;
        model.vocab_buckets = vocab_buckets;
        model.embed_dim = embed_dim;
        model.hidden_dim = hidden_dim;
        model.seed = seed;
        TrainConfig train;
        train.epochs = epochs;
        train.learning_rate = learning_rate;
        py::gil_scoped_release release;
        return Train(data, model, train);
      },
      py::arg("data"), py::arg("multilabel") = false,
      py::arg("vocab_buckets") = 32768, py::arg("embed_dim") = 64,
      py::arg("hidden_dim") = 128, py::arg("epochs") = 20,
      py::arg("learning_rate") = 3e-4, py::arg("seed") = 0);

  py::class_<Attribution>(m, "Attribution")
      .def_readonly("tokens", &Attribution::tokens)
      .def_readonly("scores", &Attribution::scores)
      .def_readonly("explained_output", &Attribution::explained_output)
      .def_property_readonly("warnings", [](const Attribution& a) {
        return a.diagnostics.warnings;
      });

  m.def("explain", &Explain, py::arg("checkpoint"), py::arg("text"),
        py::arg("method") = "lime", py::arg("output") = kOffensiveOutput,
        py::arg("samples") = 5000, py::arg("seed") = 0, py::arg("steps") = 50,
        "Token attributions for one output, by LIME or IG");
  m.def(
      "decode_spans",
      [](const Attribution& a, double threshold) {
        SpanDecoderConfig config;
        config.threshold = threshold;
        return DecodeSpans(a, config);
      },
      py::arg("attribution"), py::arg("threshold") = -0.01);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const RunConfig config = RunConfigFromJson(config_json);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = RunExperiment(config);
        }
        py::dict methods;
        for (const MethodSummary& s : r.methods) {
          py::dict d;
          d["mean_f1"] = s.mean_f1;
          d["per_seed_f1"] = s.per_seed_f1;
          methods[py::str(s.method)] = d;
        }
        py::dict out;
        out["methods"] = methods;
        out["random_benchmark"] = ReportToDict(r.random_benchmark);
        out["lexicon_benchmark"] = ReportToDict(r.lexicon_benchmark);
        return out;
      },
      py::arg("config_json"),
      "Run a preset from a JSON config in the manifest's 'config' layout");
  m.def(
      "default_run_config", [] { return RunConfigToJson(RunConfig{}); },
      "Default run config as JSON");
}

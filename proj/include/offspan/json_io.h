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

// nlohmann::json conversions for the config structs. Readers accept partial
// objects (missing keys keep their defaults) and reject unknown keys.

#ifndef OFFSPAN_JSON_IO_H_
#define OFFSPAN_JSON_IO_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "offspan/augment.h"
#include "offspan/errors.h"
#include "offspan/ig.h"
#include "offspan/lime.h"
#include "offspan/model.h"
#include "offspan/spans.h"
#include "offspan/synth.h"

namespace offspan {
namespace json_detail {

template <typename Json>
void RejectUnknown(const Json& j, std::string_view what,
                   std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + " must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (std::string_view k : keys) known = known || it.key() == k;
    if (!known) {
      throw ConfigError("unknown key '" + it.key() + "' in " +
                        std::string(what));
    }
  }
}

template <typename Json, typename T>
void Read(const Json& j, const char* key, T& field) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace json_detail

template <typename Json>
void to_json(Json& j, const ModelConfig& c) {
  j = Json{{"vocab_buckets", c.vocab_buckets},
           {"embed_dim", c.embed_dim},
           {"hidden_dim", c.hidden_dim},
           {"head", std::string(HeadKindName(c.head))},
           {"max_seq_length", c.max_seq_length},
           {"seed", c.seed}};
}

template <typename Json>
void from_json(const Json& j, ModelConfig& c) {
  json_detail::RejectUnknown(j, "model config",
                             {"vocab_buckets", "embed_dim", "hidden_dim",
                              "head", "max_seq_length", "seed"});
  json_detail::Read(j, "vocab_buckets", c.vocab_buckets);
  json_detail::Read(j, "embed_dim", c.embed_dim);
  json_detail::Read(j, "hidden_dim", c.hidden_dim);
  std::string head(HeadKindName(c.head));
  json_detail::Read(j, "head", head);
  c.head = ParseHeadKind(head);
  json_detail::Read(j, "max_seq_length", c.max_seq_length);
  json_detail::Read(j, "seed", c.seed);
}

template <typename Json>
void to_json(Json& j, const TrainConfig& c) {
  j = Json{{"epochs", c.epochs},
           {"batch_size", c.batch_size},
           {"learning_rate", c.learning_rate},
           {"warmup_ratio", c.warmup_ratio},
           {"weight_decay", c.weight_decay},
           {"init", c.init},
           {"seeds", c.seeds}};
}

template <typename Json>
void from_json(const Json& j, TrainConfig& c) {
  json_detail::RejectUnknown(j, "train config",
                             {"epochs", "batch_size", "learning_rate",
                              "warmup_ratio", "weight_decay", "init", "seeds"});
  json_detail::Read(j, "epochs", c.epochs);
  json_detail::Read(j, "batch_size", c.batch_size);
  json_detail::Read(j, "learning_rate", c.learning_rate);
  json_detail::Read(j, "warmup_ratio", c.warmup_ratio);
  json_detail::Read(j, "weight_decay", c.weight_decay);
  json_detail::Read(j, "init", c.init);
  json_detail::Read(j, "seeds", c.seeds);
}

template <typename Json>
void to_json(Json& j, const TrainMeta& m) {
  j = Json{{"epochs_run", m.epochs_run},
           {"best_epoch", m.best_epoch},
           {"final_loss", m.final_loss},
           {"initial_train_loss", m.initial_train_loss},
           {"final_train_loss", m.final_train_loss},
           {"seed", m.seed}};
}

template <typename Json>
void from_json(const Json& j, TrainMeta& m) {
  json_detail::RejectUnknown(j, "train meta",
                             {"epochs_run", "best_epoch", "final_loss",
                              "initial_train_loss", "final_train_loss",
                              "seed"});
  json_detail::Read(j, "epochs_run", m.epochs_run);
  json_detail::Read(j, "best_epoch", m.best_epoch);
  json_detail::Read(j, "final_loss", m.final_loss);
  json_detail::Read(j, "initial_train_loss", m.initial_train_loss);
  json_detail::Read(j, "final_train_loss", m.final_train_loss);
  json_detail::Read(j, "seed", m.seed);
}

template <typename Json>
void to_json(Json& j, const LexiconConfig& c) {
  j = Json{{"max_phrase_chars", c.max_phrase_chars}, {"stoplist", c.stoplist}};
}

template <typename Json>
void from_json(const Json& j, LexiconConfig& c) {
  json_detail::RejectUnknown(j, "lexicon config",
                             {"max_phrase_chars", "stoplist"});
  json_detail::Read(j, "max_phrase_chars", c.max_phrase_chars);
  json_detail::Read(j, "stoplist", c.stoplist);
}

template <typename Json>
void to_json(Json& j, const AugmentConfig& c) {
  j = Json{{"masks_per_comment", c.masks_per_comment},
           {"mask_probability", c.mask_probability},
           {"seed", c.seed}};
}

template <typename Json>
void from_json(const Json& j, AugmentConfig& c) {
  json_detail::RejectUnknown(j, "augment config",
                             {"masks_per_comment", "mask_probability", "seed"});
  json_detail::Read(j, "masks_per_comment", c.masks_per_comment);
  json_detail::Read(j, "mask_probability", c.mask_probability);
  json_detail::Read(j, "seed", c.seed);
}

template <typename Json>
void to_json(Json& j, const LimeConfig& c) {
  j = Json{{"num_samples", c.num_samples},
           {"kernel_width", c.kernel_width},
           {"ridge_lambda", c.ridge_lambda},
           {"mask_token", c.mask_token},
           {"seed", c.seed}};
  j["explained_output"] =
      c.explained_output ? Json(*c.explained_output) : Json(nullptr);
}

template <typename Json>
void from_json(const Json& j, LimeConfig& c) {
  json_detail::RejectUnknown(j, "lime config",
                             {"num_samples", "kernel_width", "ridge_lambda",
                              "mask_token", "seed", "explained_output"});
  json_detail::Read(j, "num_samples", c.num_samples);
  json_detail::Read(j, "kernel_width", c.kernel_width);
  json_detail::Read(j, "ridge_lambda", c.ridge_lambda);
  json_detail::Read(j, "mask_token", c.mask_token);
  json_detail::Read(j, "seed", c.seed);
  if (j.contains("explained_output") && !j["explained_output"].is_null()) {
    c.explained_output = j["explained_output"].template get<std::size_t>();
  }
}

template <typename Json>
void to_json(Json& j, const IgConfig& c) {
  j = Json{{"steps", c.steps},
           {"scheme", std::string(RiemannSchemeName(c.scheme))},
           {"completeness_tolerance", c.completeness_tolerance}};
  j["explained_output"] =
      c.explained_output ? Json(*c.explained_output) : Json(nullptr);
}

template <typename Json>
void from_json(const Json& j, IgConfig& c) {
  json_detail::RejectUnknown(j, "ig config",
                             {"steps", "scheme", "completeness_tolerance",
                              "explained_output"});
  json_detail::Read(j, "steps", c.steps);
  std::string scheme(RiemannSchemeName(c.scheme));
  json_detail::Read(j, "scheme", scheme);
  c.scheme = ParseRiemannScheme(scheme);
  json_detail::Read(j, "completeness_tolerance", c.completeness_tolerance);
  if (j.contains("explained_output") && !j["explained_output"].is_null()) {
    c.explained_output = j["explained_output"].template get<std::size_t>();
  }
}

template <typename Json>
void to_json(Json& j, const SpanDecoderConfig& c) {
  j = Json{{"threshold", c.threshold},
           {"merge_policy", std::string(MergePolicyName(c.merge_policy))},
           {"single_label", c.single_label},
           {"coalesce_adjacent", c.coalesce_adjacent}};
}

template <typename Json>
void from_json(const Json& j, SpanDecoderConfig& c) {
  json_detail::RejectUnknown(j, "decoder config",
                             {"threshold", "merge_policy", "single_label",
                              "coalesce_adjacent"});
  json_detail::Read(j, "threshold", c.threshold);
  std::string policy(MergePolicyName(c.merge_policy));
  json_detail::Read(j, "merge_policy", policy);
  c.merge_policy = ParseMergePolicy(policy);
  json_detail::Read(j, "single_label", c.single_label);
  json_detail::Read(j, "coalesce_adjacent", c.coalesce_adjacent);
}

template <typename Json>
void to_json(Json& j, const SynthConfig& c) {
  j = Json{{"num_comments", c.num_comments},
           {"span_train", c.span_train},
           {"span_test", c.span_test},
           {"lexicon_size", c.lexicon_size},
           {"neutral_vocab", c.neutral_vocab},
           {"cue_words", c.cue_words},
           {"pronouns", c.pronouns},
           {"min_tokens", c.min_tokens},
           {"max_tokens", c.max_tokens},
           {"offensive_fraction", c.offensive_fraction},
           {"cue_rate_offensive", c.cue_rate_offensive},
           {"cue_rate_clean", c.cue_rate_clean},
           {"pronoun_rate", c.pronoun_rate},
           {"seed", c.seed}};
}

template <typename Json>
void from_json(const Json& j, SynthConfig& c) {
  json_detail::RejectUnknown(
      j, "synth config",
      {"num_comments", "span_train", "span_test", "lexicon_size",
       "neutral_vocab", "cue_words", "pronouns", "min_tokens", "max_tokens",
       "offensive_fraction", "cue_rate_offensive", "cue_rate_clean",
       "pronoun_rate", "seed"});
  json_detail::Read(j, "num_comments", c.num_comments);
  json_detail::Read(j, "span_train", c.span_train);
  json_detail::Read(j, "span_test", c.span_test);
  json_detail::Read(j, "lexicon_size", c.lexicon_size);
  json_detail::Read(j, "neutral_vocab", c.neutral_vocab);
  json_detail::Read(j, "cue_words", c.cue_words);
  json_detail::Read(j, "pronouns", c.pronouns);
  json_detail::Read(j, "min_tokens", c.min_tokens);
  json_detail::Read(j, "max_tokens", c.max_tokens);
  json_detail::Read(j, "offensive_fraction", c.offensive_fraction);
  json_detail::Read(j, "cue_rate_offensive", c.cue_rate_offensive);
  json_detail::Read(j, "cue_rate_clean", c.cue_rate_clean);
  json_detail::Read(j, "pronoun_rate", c.pronoun_rate);
  json_detail::Read(j, "seed", c.seed);
}

}  // namespace offspan

#endif  // OFFSPAN_JSON_IO_H_

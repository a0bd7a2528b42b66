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

// Seeded planted-token corpus for desk-scale experiments.
//
// Words are pronounceable pseudo-words. Offensive comments carry one or more
// words from a hidden offensive lexicon; gold spans cover them, sometimes
// together with a preceding pronoun. A small set of "cue" words co-occurs
// with offensive comments without being offensive itself, so a classifier
// can pick up signal that gold spans do not reward.

#ifndef OFFSPAN_SYNTH_H_
#define OFFSPAN_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "offspan/corpus.h"

namespace offspan {

struct SynthConfig {
  std::size_t num_comments = 2000;  // sentence-labelled training corpus
  std::size_t span_train = 500;
  std::size_t span_test = 200;
  std::size_t lexicon_size = 200;
  std::size_t neutral_vocab = 1500;
  std::size_t cue_words = 20;
  std::size_t pronouns = 6;
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 16;
  double offensive_fraction = 0.5;
  // Chance an offensive comment contains a cue word, and the same for a
  // clean one.
  double cue_rate_offensive = 0.6;
  double cue_rate_clean = 0.1;
  // Chance a planted offensive phrase starts with a pronoun.
  double pronoun_rate = 0.2;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SynthCorpus {
  std::vector<Comment> classification;  // binary labels only
  std::vector<Comment> span_train;      // gold spans, all offensive
  std::vector<Comment> span_test;
  std::vector<std::string> offensive_words;
  std::vector<std::string> cue_words;
  std::vector<std::string> pronouns;  // suitable as a lexicon stoplist
};

SynthCorpus GenerateSynthCorpus(const SynthConfig& config);

}  // namespace offspan

#endif  // OFFSPAN_SYNTH_H_

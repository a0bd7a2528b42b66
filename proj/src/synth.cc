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

#include "offspan/synth.h"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "offspan/errors.h"
#include "offspan/rng.h"

namespace offspan {
namespace {

constexpr std::string_view kConsonants = "bcdghjklmnprstvyz";
constexpr std::string_view kVowels = "aeiou";
constexpr double kPronounInClean = 0.05;

class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {}

  std::string Neutral() {
    for (;;) {
      std::string w = Syllables(2 + rng_.Below(3));
      if (seen_.insert(w).second) return w;
    }
  }

  // Censored-looking words such as "p**a" or "sanghu".
  std::string Offensive() {
    for (;;) {
      std::string w = Syllables(2 + rng_.Below(2));
      if (rng_.Bernoulli(0.5) && w.size() >= 4) {
        const std::size_t stars = 1 + rng_.Below(w.size() - 3);
        for (std::size_t i = 1; i <= stars; ++i) w[i] = '*';
      }
      if (seen_.insert(w).second) return w;
    }
  }

 private:
  std::string Syllables(std::size_t count) {
    std::string w;
    for (std::size_t s = 0; s < count; ++s) {
      w += kConsonants[rng_.Below(kConsonants.size())];
      w += kVowels[rng_.Below(kVowels.size())];
    }
    return w;
  }

  Rng& rng_;
  std::unordered_set<std::string> seen_;
};

// Zipf-like sampler over a fixed vocabulary.
class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cumulative_(n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / static_cast<double>(i + 1);
      cumulative_[i] = total;
    }
    for (double& c : cumulative_) c /= total;
  }

  std::size_t Sample(Rng& rng) const {
    const double u = rng.Uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

struct Slot {
  std::string word;
  bool in_span = false;
};

Comment Assemble(std::string id, const std::vector<Slot>& slots) {
  Comment c;
  c.id = std::move(id);
  std::vector<CharRange> spans;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i > 0) {
      c.text += ' ';
      ++pos;
    }
    const std::size_t len = CodepointLength(slots[i].word);
    if (slots[i].in_span) {
      if (i > 0 && slots[i - 1].in_span) {
        spans.back().end = pos + len;
      } else {
        spans.push_back({pos, pos + len});
      }
    }
    c.text += slots[i].word;
    pos += len;
  }
  c.gold_spans = std::move(spans);
  return c;
}

std::string MakeId(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix, i);
  return buf;
}

}  // namespace

void SynthConfig::Validate() const {
  if (lexicon_size < 1 || neutral_vocab < 1) {
    throw ConfigError("synthetic vocabularies must be non-empty");
  }
  if (min_tokens < 1 || max_tokens < min_tokens) {
    throw ConfigError("need 1 <= min_tokens <= max_tokens");
  }
  for (double p : {offensive_fraction, cue_rate_offensive, cue_rate_clean,
                   pronoun_rate}) {
    if (!(p >= 0 && p <= 1)) throw ConfigError("rates must be in [0, 1]");
  }
}

SynthCorpus GenerateSynthCorpus(const SynthConfig& config) {
  config.Validate();
  Rng vocab_rng(DeriveSeed(config.seed, "vocab"));
  WordFactory factory(vocab_rng);

  SynthCorpus corpus;
  std::vector<std::string> neutral;
  for (std::size_t i = 0; i < config.neutral_vocab; ++i) {
    neutral.push_back(factory.Neutral());
  }
  for (std::size_t i = 0; i < config.lexicon_size; ++i) {
    corpus.offensive_words.push_back(factory.Offensive());
  }
  for (std::size_t i = 0; i < config.cue_words; ++i) {
    corpus.cue_words.push_back(factory.Neutral());
  }
  for (std::size_t i = 0; i < config.pronouns; ++i) {
    corpus.pronouns.push_back(factory.Neutral());
  }
  const ZipfSampler zipf(neutral.size());

  Rng rng(DeriveSeed(config.seed, "comments"));
  auto neutral_slots = [&](std::size_t n) {
    std::vector<Slot> slots(n);
    for (Slot& s : slots) {
      if (!corpus.pronouns.empty() && rng.Bernoulli(kPronounInClean)) {
        s.word = corpus.pronouns[rng.Below(corpus.pronouns.size())];
      } else {
        s.word = neutral[zipf.Sample(rng)];
      }
    }
    return slots;
  };
  auto length = [&] {
    return config.min_tokens +
           rng.Below(config.max_tokens - config.min_tokens + 1);
  };
  auto place_cue = [&](std::vector<Slot>& slots, double rate) {
    if (corpus.cue_words.empty() || !rng.Bernoulli(rate)) return;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].in_span) free.push_back(i);
    }
    if (free.empty()) return;
    slots[free[rng.Below(free.size())]].word =
        corpus.cue_words[rng.Below(corpus.cue_words.size())];
  };

  auto offensive_comment = [&](std::string id) {
    const std::size_t n = length();
    std::vector<Slot> slots = neutral_slots(n);
    const double u = rng.Uniform();
    const std::size_t k = std::min<std::size_t>(n, u < 0.6 ? 1 : u < 0.9 ? 2 : 3);
    auto positions = rng.Choose(n, k);
    std::sort(positions.begin(), positions.end());
    for (std::size_t p : positions) {
      slots[p].word = corpus.offensive_words[rng.Below(corpus.offensive_words.size())];
      slots[p].in_span = true;
    }
    for (std::size_t p : positions) {
      if (p > 0 && !slots[p - 1].in_span && !corpus.pronouns.empty() &&
          rng.Bernoulli(config.pronoun_rate)) {
        slots[p - 1].word = corpus.pronouns[rng.Below(corpus.pronouns.size())];
        slots[p - 1].in_span = true;
      }
    }
    place_cue(slots, config.cue_rate_offensive);
    Comment c = Assemble(std::move(id), slots);
    c.binary_label = 1;
    return c;
  };
  auto clean_comment = [&](std::string id) {
    std::vector<Slot> slots = neutral_slots(length());
    place_cue(slots, config.cue_rate_clean);
    Comment c = Assemble(std::move(id), slots);
    c.binary_label = 0;
    return c;
  };

  for (std::size_t i = 0; i < config.num_comments; ++i) {
    Comment c = rng.Bernoulli(config.offensive_fraction)
                    ? offensive_comment(MakeId("cls", i))
                    : clean_comment(MakeId("cls", i));
    // Sentence-level corpus: labels only.
    c.gold_spans.reset();
    corpus.classification.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < config.span_train; ++i) {
    Comment c = offensive_comment(MakeId("span-train", i));
    c.binary_label.reset();
    corpus.span_train.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < config.span_test; ++i) {
    Comment c = offensive_comment(MakeId("span-test", i));
    c.binary_label.reset();
    corpus.span_test.push_back(std::move(c));
  }
  return corpus;
}

}  // namespace offspan

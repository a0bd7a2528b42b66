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

// Masked data augmentation and positional multilabel creation.
//
//   1. BuildLexicon: offensive words from short gold-span phrases.
//   2. GenerateMasks: random replace-masks over a clean comment's tokens
//      (bit 1 = replace; LIME masks use the opposite polarity).
//   3. Substitute: replace masked tokens with lexicon words and record the
//      spans of the inserted words.
//   4. PositionLabelsFromSpans: which thirds of the token sequence hold an
//      offensive word.

#ifndef OFFSPAN_AUGMENT_H_
#define OFFSPAN_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "offspan/corpus.h"
#include "offspan/rng.h"

namespace offspan {

struct LexiconConfig {
  // Phrases must be strictly shorter than this many characters.
  std::size_t max_phrase_chars = 20;
  // Words dropped from the lexicon (compared case-insensitively). Stands in
  // for manual review of conjunctions and pronouns.
  std::vector<std::string> stoplist;

  void Validate() const;
};

// Insertion-ordered set of words.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const std::vector<std::string>& words);

  // Returns false if the word was already present.
  bool Add(std::string word);
  bool Contains(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& operator[](std::size_t i) const { return words_[i]; }

 private:
  std::vector<std::string> words_;
  std::unordered_set<std::string> index_;
};

// One word per line, UTF-8. Blank lines are skipped.
Lexicon LoadLexicon(const std::string& path);
void SaveLexicon(const std::string& path, const Lexicon& lexicon);
std::vector<std::string> LoadWordList(const std::string& path);

struct AugmentConfig {
  std::size_t masks_per_comment = 3;
  double mask_probability = 0.3;
  std::uint64_t seed = 0;

  void Validate() const;
};

using ReplaceMask = std::vector<std::uint8_t>;

// ASCII case folding; other characters pass through.
std::string FoldCase(std::string_view word);

Lexicon BuildLexicon(std::span<const Comment> span_dataset,
                     const LexiconConfig& config);

// Each bit is 1 with probability p. An all-zero mask is redrawn once; if the
// redraw is also all zero, one uniformly chosen bit is set.
std::vector<ReplaceMask> GenerateMasks(std::size_t token_count,
                                       std::size_t masks_per_comment,
                                       double p, std::uint64_t seed);

// Region (0 start, 1 middle, 2 end) of token `index` among `count` tokens.
std::size_t TokenRegion(std::size_t index, std::size_t count);

// Labels an offensive copy of `comment`: gold spans cover exactly the
// inserted words, position labels mark the regions they fall in.
Comment Substitute(const Comment& comment, const ReplaceMask& mask,
                   const Lexicon& lexicon, std::uint64_t seed);

// Recomputes the region bits from a comment's gold spans.
PositionLabels PositionLabelsFromSpans(const Comment& comment);
std::vector<Comment> MakeMultilabel(std::span<const Comment> span_dataset);

struct AugmentedCorpus {
  std::vector<Comment> classification;
  std::vector<Comment> multilabel;
};

// For each source comment, in order: the original (label 0, no spans) then
// masks_per_comment offensive variants.
AugmentedCorpus RunAugmentation(std::span<const Comment> source,
                                const Lexicon& lexicon,
                                const AugmentConfig& config);

}  // namespace offspan

#endif  // OFFSPAN_AUGMENT_H_

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

#include "offspan/augment.h"

#include <algorithm>
#include <fstream>

#include "offspan/errors.h"

namespace offspan {

void LexiconConfig::Validate() const {
  if (max_phrase_chars < 1) throw ConfigError("max_phrase_chars must be >= 1");
}

void AugmentConfig::Validate() const {
  if (masks_per_comment < 1) {
    throw ConfigError("masks_per_comment must be >= 1");
  }
  if (!(mask_probability > 0 && mask_probability < 1)) {
    throw ConfigError("mask_probability must be in (0, 1)");
  }
}

Lexicon::Lexicon(const std::vector<std::string>& words) {
  for (const std::string& w : words) Add(w);
}

bool Lexicon::Add(std::string word) {
  if (word.empty() || index_.contains(word)) return false;
  index_.insert(word);
  words_.push_back(std::move(word));
  return true;
}

bool Lexicon::Contains(std::string_view word) const {
  return index_.contains(std::string(word));
}

std::vector<std::string> LoadWordList(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open word list '" + path + "'");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    words.push_back(line);
  }
  return words;
}

Lexicon LoadLexicon(const std::string& path) {
  Lexicon lexicon;
  for (std::string& w : LoadWordList(path)) {
    if (Tokenize(w).size() != 1 || Tokenize(w).front().text != w) {
      throw Error("lexicon entry '" + w + "' is not a single token");
    }
    lexicon.Add(std::move(w));
  }
  return lexicon;
}

void SaveLexicon(const std::string& path, const Lexicon& lexicon) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write lexicon '" + path + "'");
  for (const std::string& w : lexicon.words()) out << w << '\n';
}

std::string FoldCase(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Lexicon BuildLexicon(std::span<const Comment> span_dataset,
                     const LexiconConfig& config) {
  config.Validate();
  std::unordered_set<std::string> stop;
  for (const std::string& w : config.stoplist) stop.insert(FoldCase(w));

  Lexicon lexicon;
  for (const Comment& c : span_dataset) {
    if (!c.gold_spans) {
      throw ConfigError("comment '" + c.id + "' carries no gold spans");
    }
    for (const CharRange& r : *c.gold_spans) {
      if (r.size() >= config.max_phrase_chars) continue;
      for (TokenSpan& t : Tokenize(CharSubstring(c.text, r))) {
        if (stop.contains(FoldCase(t.text))) continue;
        lexicon.Add(std::move(t.text));
      }
    }
  }
  if (lexicon.empty()) {
    throw Error(
        "lexicon is empty after filtering; review the stoplist and "
        "max_phrase_chars");
  }
  return lexicon;
}

std::vector<ReplaceMask> GenerateMasks(std::size_t token_count,
                                       std::size_t masks_per_comment,
                                       double p, std::uint64_t seed) {
  if (token_count == 0) throw Error("cannot mask a comment with no tokens");
  Rng rng(seed);
  auto draw = [&] {
    ReplaceMask m(token_count);
    for (auto& bit : m) bit = rng.Bernoulli(p) ? 1 : 0;
    return m;
  };
  auto all_zero = [](const ReplaceMask& m) {
    return std::none_of(m.begin(), m.end(), [](std::uint8_t b) { return b; });
  };
  std::vector<ReplaceMask> masks;
  for (std::size_t k = 0; k < masks_per_comment; ++k) {
    ReplaceMask m = draw();
    if (all_zero(m)) m = draw();
    if (all_zero(m)) m[rng.Below(token_count)] = 1;
    masks.push_back(std::move(m));
  }
  return masks;
}

std::size_t TokenRegion(std::size_t index, std::size_t count) {
  return (3 * index) / count;
}

Comment Substitute(const Comment& comment, const ReplaceMask& mask,
                   const Lexicon& lexicon, std::uint64_t seed) {
  const std::vector<TokenSpan> tokens = Tokenize(comment.text);
  if (mask.size() != tokens.size()) {
    throw ShapeError("mask length " + std::to_string(mask.size()) +
                     " does not match token count " +
                     std::to_string(tokens.size()));
  }
  if (lexicon.empty()) throw Error("lexicon is empty");
  Rng rng(seed);

  const std::u32string chars = DecodeUtf8(comment.text);
  std::u32string out;
  std::vector<CharRange> spans;
  PositionLabels labels{0, 0, 0};
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const CharRange r = tokens[i].range;
    out.append(chars, cursor, r.start - cursor);
    if (mask[i]) {
      const std::u32string word = DecodeUtf8(lexicon[rng.Below(lexicon.size())]);
      spans.push_back({out.size(), out.size() + word.size()});
      out.append(word);
      labels[TokenRegion(i, tokens.size())] = 1;
    } else {
      out.append(chars, r.start, r.size());
    }
    cursor = r.end;
  }
  out.append(chars, cursor, std::u32string::npos);

  Comment result;
  result.id = comment.id;
  result.text = EncodeUtf8(out);
  result.gold_spans = std::move(spans);
  result.binary_label = 1;
  result.position_labels = labels;
  return result;
}

PositionLabels PositionLabelsFromSpans(const Comment& comment) {
  PositionLabels labels{0, 0, 0};
  if (!comment.gold_spans) return labels;
  const std::vector<TokenSpan> tokens = Tokenize(comment.text);
  for (const CharRange& span : *comment.gold_spans) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const CharRange t = tokens[i].range;
      if (t.start < span.end && span.start < t.end) {
        labels[TokenRegion(i, tokens.size())] = 1;
      }
    }
  }
  return labels;
}

std::vector<Comment> MakeMultilabel(std::span<const Comment> span_dataset) {
  std::vector<Comment> out;
  out.reserve(span_dataset.size());
  for (const Comment& c : span_dataset) {
    Comment m = c;
    if (!m.gold_spans) m.gold_spans.emplace();
    m.position_labels = PositionLabelsFromSpans(m);
    m.binary_label = m.gold_spans->empty() ? 0 : 1;
    out.push_back(std::move(m));
  }
  return out;
}

AugmentedCorpus RunAugmentation(std::span<const Comment> source,
                                const Lexicon& lexicon,
                                const AugmentConfig& config) {
  config.Validate();
  if (lexicon.empty()) throw Error("lexicon is empty");
  const std::uint64_t mask_root = DeriveSeed(config.seed, "masks");
  const std::uint64_t word_root = DeriveSeed(config.seed, "words");

  AugmentedCorpus corpus;
  const std::size_t total = source.size() * (config.masks_per_comment + 1);
  corpus.classification.reserve(total);
  corpus.multilabel.reserve(total);
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Comment& src = source[i];
    if (src.gold_spans && !src.gold_spans->empty()) {
      throw ConfigError("source comment '" + src.id + "' has gold spans");
    }
    if (src.binary_label && *src.binary_label != 0) {
      throw ConfigError("source comment '" + src.id + "' is offensive");
    }
    const std::size_t n = Tokenize(src.text).size();
    if (n == 0) throw Error("source comment '" + src.id + "' has no tokens");

    Comment original;
    original.id = src.id;
    original.text = src.text;
    original.binary_label = 0;
    original.gold_spans.emplace();
    original.position_labels = PositionLabels{0, 0, 0};
    corpus.classification.push_back(original);
    corpus.multilabel.push_back(std::move(original));

    const auto masks = GenerateMasks(n, config.masks_per_comment,
                                     config.mask_probability,
                                     DeriveSeed(mask_root, i));
    for (std::size_t k = 0; k < masks.size(); ++k) {
      Comment variant =
          Substitute(src, masks[k], lexicon,
                     DeriveSeed(word_root, i * masks.size() + k));
      variant.id = src.id + "/aug" + std::to_string(k);
      corpus.classification.push_back(variant);
      corpus.multilabel.push_back(std::move(variant));
    }
  }
  return corpus;
}

}  // namespace offspan

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

// Text primitives and dataset I/O.
//
// All character offsets are counted in unicode scalar values, never bytes.
// Text is stored as UTF-8 and decoded on demand.

#ifndef OFFSPAN_CORPUS_H_
#define OFFSPAN_CORPUS_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace offspan {

// Half-open [start, end) range of character indices.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend auto operator<=>(const CharRange&, const CharRange&) = default;
};

struct TokenSpan {
  std::string text;
  CharRange range;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// (start, middle, end) region bits.
using PositionLabels = std::array<int, 3>;

struct Comment {
  std::string id;
  std::string text;
  std::optional<std::vector<CharRange>> gold_spans;
  std::optional<int> binary_label;  // 1 = offensive
  std::optional<PositionLabels> position_labels;

  // Length in characters.
  std::size_t length() const;

  friend bool operator==(const Comment&, const Comment&) = default;
};

enum class DatasetKind { kSpan, kClassification, kMultilabel };

DatasetKind ParseDatasetKind(std::string_view name);
std::string_view DatasetKindName(DatasetKind kind);

// UTF-8 helpers. DecodeUtf8 throws offspan::Error on malformed input.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
std::size_t CodepointLength(std::string_view text);
// Substring by character range; the range must lie inside the text.
std::string CharSubstring(std::string_view text, CharRange range);

bool IsUnicodeSpace(char32_t c);

// Splits on whitespace runs. Token ranges index the original text.
std::vector<TokenSpan> Tokenize(std::string_view text);

// Sorts and merges overlapping or touching ranges.
std::vector<CharRange> NormalizeSpans(std::vector<CharRange> spans);

// Union of the ranges as a sorted list of distinct character indices.
std::vector<std::size_t> SpansToCharset(std::span<const CharRange> spans);

// Throws SpanBoundsError / ParseError when a Comment invariant is violated.
void ValidateComment(const Comment& comment);

// JSON-lines dataset I/O. The loader normalizes gold spans, so a file written
// by SaveDataset reloads and rewrites byte-identically.
std::vector<Comment> ReadDataset(std::istream& in, DatasetKind kind);
std::vector<Comment> LoadDataset(const std::string& path, DatasetKind kind);
void WriteDataset(std::ostream& out, std::span<const Comment> comments,
                  DatasetKind kind);
void SaveDataset(const std::string& path, std::span<const Comment> comments,
                 DatasetKind kind);

// One JSON-lines record. `line` is used for error messages only.
Comment ParseRecord(std::string_view json_line, DatasetKind kind,
                    std::size_t line = 0);
std::string FormatRecord(const Comment& comment, DatasetKind kind);

}  // namespace offspan

#endif  // OFFSPAN_CORPUS_H_

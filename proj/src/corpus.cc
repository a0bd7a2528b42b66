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

#include "offspan/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "offspan/errors.h"

namespace offspan {
namespace {

using ordered_json = nlohmann::ordered_json;

// Returns the number of bytes of the sequence starting with `lead`, or 0.
int Utf8SequenceLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 0;
}

std::vector<CharRange> ParseSpans(const ordered_json& value, std::size_t line) {
  if (!value.is_array()) throw ParseError(line, "'spans' must be an array");
  std::vector<CharRange> spans;
  for (const auto& pair : value) {
    if (!pair.is_array() || pair.size() != 2 ||
        !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
      // Negative offsets land here too.
      throw SpanBoundsError("line " + std::to_string(line) +
                            ": span must be [start, end] with start >= 0, got " +
                            pair.dump());
    }
    spans.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  return spans;
}

std::string DescribeRange(CharRange r) {
  return "[" + std::to_string(r.start) + "," + std::to_string(r.end) + "]";
}

}  // namespace

std::size_t Comment::length() const { return CodepointLength(text); }

DatasetKind ParseDatasetKind(std::string_view name) {
  if (name == "span") return DatasetKind::kSpan;
  if (name == "classification") return DatasetKind::kClassification;
  if (name == "multilabel") return DatasetKind::kMultilabel;
  throw ConfigError("unknown dataset kind '" + std::string(name) + "'");
}

std::string_view DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kSpan:
      return "span";
    case DatasetKind::kClassification:
      return "classification";
    case DatasetKind::kMultilabel:
      return "multilabel";
  }
  return "unknown";
}

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    const int len = Utf8SequenceLength(lead);
    if (len == 0 || i + len > text.size()) {
      throw Error("invalid UTF-8 at byte " + std::to_string(i));
    }
    char32_t cp = len == 1 ? lead : lead & (0x7F >> len);
    for (int k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont >> 6) != 0x2) {
        throw Error("invalid UTF-8 continuation at byte " +
                    std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw Error("invalid UTF-8 code point at byte " + std::to_string(i));
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::size_t CodepointLength(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) >> 6) != 0x2) ++n;
  }
  return n;
}

std::string CharSubstring(std::string_view text, CharRange range) {
  const std::u32string decoded = DecodeUtf8(text);
  if (range.start > range.end || range.end > decoded.size()) {
    throw SpanBoundsError("range " + DescribeRange(range) +
                          " outside text of length " +
                          std::to_string(decoded.size()));
  }
  return EncodeUtf8(std::u32string_view(decoded).substr(range.start,
                                                        range.size()));
}

bool IsUnicodeSpace(char32_t c) {
  switch (c) {
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case U' ':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::vector<TokenSpan> Tokenize(std::string_view text) {
  const std::u32string chars = DecodeUtf8(text);
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < chars.size()) {
    while (i < chars.size() && IsUnicodeSpace(chars[i])) ++i;
    if (i == chars.size()) break;
    const std::size_t start = i;
    while (i < chars.size() && !IsUnicodeSpace(chars[i])) ++i;
    tokens.push_back(
        {EncodeUtf8(std::u32string_view(chars).substr(start, i - start)),
         {start, i}});
  }
  return tokens;
}

std::vector<CharRange> NormalizeSpans(std::vector<CharRange> spans) {
  std::erase_if(spans, [](const CharRange& r) { return r.start >= r.end; });
  std::sort(spans.begin(), spans.end());
  std::vector<CharRange> merged;
  for (const CharRange& r : spans) {
    if (!merged.empty() && r.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

std::vector<std::size_t> SpansToCharset(std::span<const CharRange> spans) {
  std::vector<std::size_t> charset;
  for (const CharRange& r : NormalizeSpans({spans.begin(), spans.end()})) {
    for (std::size_t i = r.start; i < r.end; ++i) charset.push_back(i);
  }
  return charset;
}

void ValidateComment(const Comment& comment) {
  const std::size_t length = comment.length();
  if (comment.gold_spans) {
    for (const CharRange& r : *comment.gold_spans) {
      if (r.start >= r.end || r.end > length) {
        throw SpanBoundsError("comment '" + comment.id + "': span " +
                              DescribeRange(r) + " out of bounds for length " +
                              std::to_string(length));
      }
    }
  }
  if (comment.binary_label && *comment.binary_label != 0 &&
      *comment.binary_label != 1) {
    throw ParseError(0, "comment '" + comment.id + "': label must be 0 or 1");
  }
  if (comment.position_labels) {
    for (int bit : *comment.position_labels) {
      if (bit != 0 && bit != 1) {
        throw ParseError(0, "comment '" + comment.id +
                                "': position labels must be 0 or 1");
      }
    }
  }
}

Comment ParseRecord(std::string_view json_line, DatasetKind kind,
                    std::size_t line) {
  ordered_json record;
  try {
    record = ordered_json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, e.what());
  }
  if (!record.is_object()) throw ParseError(line, "record is not an object");

  auto require = [&](const char* key) -> const ordered_json& {
    auto it = record.find(key);
    if (it == record.end()) {
      throw ParseError(line, std::string("missing key '") + key + "'");
    }
    return *it;
  };

  Comment c;
  const ordered_json& id = require("id");
  const ordered_json& text = require("text");
  if (!id.is_string()) throw ParseError(line, "'id' must be a string");
  if (!text.is_string()) throw ParseError(line, "'text' must be a string");
  c.id = id.get<std::string>();
  c.text = text.get<std::string>();
  try {
    DecodeUtf8(c.text);
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }

  switch (kind) {
    case DatasetKind::kClassification: {
      const ordered_json& label = require("label");
      if (!label.is_number_integer() ||
          (label.get<int>() != 0 && label.get<int>() != 1)) {
        throw ParseError(line, "'label' must be 0 or 1");
      }
      c.binary_label = label.get<int>();
      break;
    }
    case DatasetKind::kMultilabel: {
      const ordered_json& labels = require("labels");
      if (!labels.is_array() || labels.size() != 3) {
        throw ParseError(line, "'labels' must be an array of 3 bits");
      }
      PositionLabels bits{};
      for (std::size_t b = 0; b < 3; ++b) {
        if (!labels[b].is_number_integer() ||
            (labels[b].get<int>() != 0 && labels[b].get<int>() != 1)) {
          throw ParseError(line, "'labels' entries must be 0 or 1");
        }
        bits[b] = labels[b].get<int>();
      }
      c.position_labels = bits;
      c.binary_label = (bits[0] | bits[1] | bits[2]) ? 1 : 0;
      c.gold_spans = ParseSpans(require("spans"), line);
      break;
    }
    case DatasetKind::kSpan:
      c.gold_spans = ParseSpans(require("spans"), line);
      break;
  }

  if (c.gold_spans) {
    const std::size_t length = c.length();
    for (const CharRange& r : *c.gold_spans) {
      if (r.start >= r.end || r.end > length) {
        throw SpanBoundsError("line " + std::to_string(line) + ": span " +
                              DescribeRange(r) + " out of bounds for text of "
                              "length " + std::to_string(length));
      }
    }
    c.gold_spans = NormalizeSpans(std::move(*c.gold_spans));
  }
  return c;
}

std::string FormatRecord(const Comment& comment, DatasetKind kind) {
  ordered_json record;
  record["id"] = comment.id;
  record["text"] = comment.text;
  auto spans_json = [&]() {
    ordered_json spans = ordered_json::array();
    if (comment.gold_spans) {
      for (const CharRange& r : *comment.gold_spans) {
        spans.push_back({r.start, r.end});
      }
    }
    return spans;
  };
  switch (kind) {
    case DatasetKind::kClassification:
      if (!comment.binary_label) {
        throw Error("comment '" + comment.id + "' has no binary label");
      }
      record["label"] = *comment.binary_label;
      break;
    case DatasetKind::kMultilabel: {
      if (!comment.position_labels) {
        throw Error("comment '" + comment.id + "' has no position labels");
      }
      const PositionLabels& bits = *comment.position_labels;
      record["labels"] = {bits[0], bits[1], bits[2]};
      record["spans"] = spans_json();
      break;
    }
    case DatasetKind::kSpan:
      record["spans"] = spans_json();
      break;
  }
  return record.dump();
}

std::vector<Comment> ReadDataset(std::istream& in, DatasetKind kind) {
  std::vector<Comment> comments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    comments.push_back(ParseRecord(line, kind, line_no));
  }
  return comments;
}

std::vector<Comment> LoadDataset(const std::string& path, DatasetKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return ReadDataset(in, kind);
}

void WriteDataset(std::ostream& out, std::span<const Comment> comments,
                  DatasetKind kind) {
  for (const Comment& c : comments) out << FormatRecord(c, kind) << '\n';
}

void SaveDataset(const std::string& path, std::span<const Comment> comments,
                 DatasetKind kind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  WriteDataset(out, comments, kind);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace offspan

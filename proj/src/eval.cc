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

#include "offspan/eval.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "offspan/augment.h"
#include "offspan/errors.h"
#include "offspan/rng.h"

namespace offspan {
namespace {

// Maximal runs of a sorted index list.
std::vector<CharRange> IndicesToRanges(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<CharRange> ranges;
  for (std::size_t i : indices) {
    if (!ranges.empty() && ranges.back().end == i) {
      ++ranges.back().end;
    } else {
      ranges.push_back({i, i + 1});
    }
  }
  return ranges;
}

std::string FormatPercent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

}  // namespace

double CharF1(std::span<const CharRange> predicted,
              std::span<const CharRange> gold) {
  const auto p = NormalizeSpans({predicted.begin(), predicted.end()});
  const auto g = NormalizeSpans({gold.begin(), gold.end()});
  std::size_t p_size = 0;
  std::size_t g_size = 0;
  for (const CharRange& r : p) p_size += r.size();
  for (const CharRange& r : g) g_size += r.size();
  if (p_size == 0 && g_size == 0) return 1.0;
  if (p_size == 0 || g_size == 0) return 0.0;

  // Both lists are sorted and disjoint; sweep them together.
  std::size_t overlap = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < p.size() && j < g.size()) {
    const std::size_t lo = std::max(p[i].start, g[j].start);
    const std::size_t hi = std::min(p[i].end, g[j].end);
    if (lo < hi) overlap += hi - lo;
    if (p[i].end < g[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(p_size + g_size);
}

std::size_t LengthBucket(std::size_t length) {
  if (length < 30) return 0;
  if (length <= 50) return 1;
  return 2;
}

EvalReport Summarize(std::vector<std::pair<std::string, double>> per_comment,
                     std::span<const std::size_t> lengths) {
  if (per_comment.size() != lengths.size()) {
    throw ShapeError("per-comment scores and lengths differ in size");
  }
  EvalReport report;
  std::array<double, 3> sums{0.0, 0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < per_comment.size(); ++i) {
    const std::size_t b = LengthBucket(lengths[i]);
    sums[b] += per_comment[i].second;
    ++report.buckets[b].count;
    total += per_comment[i].second;
  }
  for (std::size_t b = 0; b < 3; ++b) {
    if (report.buckets[b].count > 0) {
      report.buckets[b].mean_f1 =
          sums[b] / static_cast<double>(report.buckets[b].count);
    }
  }
  report.mean_f1 =
      per_comment.empty() ? 0.0 : total / static_cast<double>(per_comment.size());
  report.per_comment_f1 = std::move(per_comment);
  return report;
}

EvalReport Evaluate(std::span<const Comment> predictions,
                    std::span<const Comment> gold) {
  std::unordered_map<std::string, const Comment*> by_id;
  for (const Comment& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw Error("duplicate prediction id '" + p.id + "'");
    }
  }
  std::vector<std::pair<std::string, double>> scores;
  std::vector<std::size_t> lengths;
  for (const Comment& g : gold) {
    if (!g.gold_spans) throw Error("gold comment '" + g.id + "' has no spans");
    auto it = by_id.find(g.id);
    if (it == by_id.end()) {
      throw Error("no prediction for gold id '" + g.id + "'");
    }
    const Comment& p = *it->second;
    static const std::vector<CharRange> kNone;
    const auto& pred = p.gold_spans ? *p.gold_spans : kNone;
    scores.emplace_back(g.id, CharF1(pred, *g.gold_spans));
    lengths.push_back(g.length());
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw Error("prediction id '" + by_id.begin()->first +
                "' has no gold comment");
  }
  return Summarize(std::move(scores), lengths);
}

std::vector<Comment> RandomBaselinePredictions(std::span<const Comment> gold,
                                               std::uint64_t seed) {
  std::vector<Comment> predictions;
  predictions.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    Rng rng(DeriveSeed(seed, i));
    const std::size_t len = gold[i].length();
    Comment p;
    p.id = gold[i].id;
    p.text = gold[i].text;
    p.gold_spans = IndicesToRanges(rng.Choose(len, len / 2));
    predictions.push_back(std::move(p));
  }
  return predictions;
}

EvalReport BenchmarkRandom(std::span<const Comment> gold, std::uint64_t seed) {
  const auto predictions = RandomBaselinePredictions(gold, seed);
  EvalReport report = Evaluate(predictions, gold);
  report.settings.emplace_back("benchmark", "random");
  report.settings.emplace_back("seed", std::to_string(seed));
  return report;
}

std::vector<Comment> LexiconBaselinePredictions(
    std::span<const Comment> train, std::span<const Comment> test) {
  std::unordered_set<std::string> words;
  for (const Comment& c : train) {
    if (!c.gold_spans) {
      throw Error("train comment '" + c.id + "' carries no gold spans");
    }
    for (const CharRange& r : *c.gold_spans) {
      for (const TokenSpan& t : Tokenize(CharSubstring(c.text, r))) {
        words.insert(FoldCase(t.text));
      }
    }
  }
  std::vector<Comment> predictions;
  predictions.reserve(test.size());
  for (const Comment& c : test) {
    Comment p;
    p.id = c.id;
    p.text = c.text;
    p.gold_spans.emplace();
    for (const TokenSpan& t : Tokenize(c.text)) {
      if (words.contains(FoldCase(t.text))) p.gold_spans->push_back(t.range);
    }
    predictions.push_back(std::move(p));
  }
  return predictions;
}

EvalReport BenchmarkLexicon(std::span<const Comment> train,
                            std::span<const Comment> test) {
  const auto predictions = LexiconBaselinePredictions(train, test);
  EvalReport report = Evaluate(predictions, test);
  report.settings.emplace_back("benchmark", "lexicon");
  return report;
}

std::string FormatReportJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["mean_f1"] = report.mean_f1;
  nlohmann::ordered_json buckets = nlohmann::ordered_json::object();
  for (std::size_t b = 0; b < 3; ++b) {
    const BucketScore& s = report.buckets[b];
    buckets[std::string(kBucketNames[b])] = {
        {"count", s.count},
        {"mean_f1", s.mean_f1 ? nlohmann::ordered_json(*s.mean_f1)
                              : nlohmann::ordered_json(nullptr)}};
  }
  j["bucket_f1"] = buckets;
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.settings) settings[k] = v;
  j["settings"] = settings;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& [id, f1] : report.per_comment_f1) {
    per.push_back({{"id", id}, {"f1", f1}});
  }
  j["per_comment_f1"] = per;
  return j.dump(2);
}

std::string FormatReportTable(
    std::span<const std::pair<std::string, EvalReport>> rows) {
  std::size_t name_width = 6;
  for (const auto& row : rows) name_width = std::max(name_width, row.first.size());
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %8s  %8s  %8s  %8s\n",
                static_cast<int>(name_width), "Method", "F1(%)", "F1@<30",
                "F1@30-50", "F1@>50");
  out << line;
  out << std::string(name_width + 42, '-') << '\n';
  for (const auto& [name, report] : rows) {
    std::snprintf(line, sizeof(line), "%-*s  %8s  %8s  %8s  %8s\n",
                  static_cast<int>(name_width), name.c_str(),
                  FormatPercent(report.mean_f1).c_str(),
                  FormatPercent(report.buckets[0].mean_f1).c_str(),
                  FormatPercent(report.buckets[1].mean_f1).c_str(),
                  FormatPercent(report.buckets[2].mean_f1).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace offspan

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

#include "offspan/attribution.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "offspan/errors.h"

namespace offspan {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json DiagnosticsToJson(const AttributionDiagnostics& d) {
  ordered_json j = ordered_json::object();
  if (d.weighted_r2) j["weighted_r2"] = *d.weighted_r2;
  if (d.sample_count) j["sample_count"] = *d.sample_count;
  if (d.completeness_residual) {
    j["completeness_residual"] = *d.completeness_residual;
  }
  if (d.output_delta) j["output_delta"] = *d.output_delta;
  if (d.steps) j["steps"] = *d.steps;
  if (!d.warnings.empty()) j["warnings"] = d.warnings;
  return j;
}

AttributionDiagnostics DiagnosticsFromJson(const ordered_json& j) {
  AttributionDiagnostics d;
  if (j.contains("weighted_r2")) d.weighted_r2 = j["weighted_r2"].get<double>();
  if (j.contains("sample_count")) {
    d.sample_count = j["sample_count"].get<std::size_t>();
  }
  if (j.contains("completeness_residual")) {
    d.completeness_residual = j["completeness_residual"].get<double>();
  }
  if (j.contains("output_delta")) {
    d.output_delta = j["output_delta"].get<double>();
  }
  if (j.contains("steps")) d.steps = j["steps"].get<std::size_t>();
  if (j.contains("warnings")) {
    d.warnings = j["warnings"].get<std::vector<std::string>>();
  }
  return d;
}

std::string HtmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void ValidateAttribution(const Attribution& attribution) {
  if (attribution.scores.size() != attribution.tokens.size()) {
    throw Error("attribution has " + std::to_string(attribution.scores.size()) +
                " scores for " + std::to_string(attribution.tokens.size()) +
                " tokens");
  }
  for (double s : attribution.scores) {
    if (!std::isfinite(s)) throw Error("attribution score is not finite");
  }
}

std::string FormatExplanation(const ExplanationRecord& record) {
  if (record.attributions.empty()) {
    throw Error("explanation '" + record.id + "' has no attributions");
  }
  ordered_json j;
  j["id"] = record.id;
  j["text"] = record.text;
  j["method"] = record.method;
  ordered_json tokens = ordered_json::array();
  for (const TokenSpan& t : record.attributions.front().tokens) {
    tokens.push_back({{"text", t.text},
                      {"start", t.range.start},
                      {"end", t.range.end}});
  }
  j["tokens"] = tokens;
  ordered_json outputs = ordered_json::array();
  for (const Attribution& a : record.attributions) {
    ValidateAttribution(a);
    if (a.tokens != record.attributions.front().tokens) {
      throw Error("explanation '" + record.id + "' mixes token lists");
    }
    outputs.push_back({{"explained_output", a.explained_output},
                       {"scores", a.scores},
                       {"diagnostics", DiagnosticsToJson(a.diagnostics)}});
  }
  j["outputs"] = outputs;
  return j.dump();
}

ExplanationRecord ParseExplanation(std::string_view json_line,
                                   std::size_t line) {
  try {
    const auto j = ordered_json::parse(json_line);
    ExplanationRecord r;
    r.id = j.at("id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.method = j.at("method").get<std::string>();
    std::vector<TokenSpan> tokens;
    for (const auto& t : j.at("tokens")) {
      tokens.push_back({t.at("text").get<std::string>(),
                        {t.at("start").get<std::size_t>(),
                         t.at("end").get<std::size_t>()}});
    }
    for (const auto& o : j.at("outputs")) {
      Attribution a;
      a.tokens = tokens;
      a.explained_output = o.at("explained_output").get<std::size_t>();
      a.scores = o.at("scores").get<std::vector<double>>();
      a.diagnostics = DiagnosticsFromJson(o.at("diagnostics"));
      ValidateAttribution(a);
      r.attributions.push_back(std::move(a));
    }
    if (r.attributions.empty()) throw ParseError(line, "no outputs");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line, e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
}

void WriteExplanations(std::ostream& out,
                       std::span<const ExplanationRecord> records) {
  for (const auto& r : records) out << FormatExplanation(r) << '\n';
}

std::vector<ExplanationRecord> ReadExplanations(std::istream& in) {
  std::vector<ExplanationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    records.push_back(ParseExplanation(line, line_no));
  }
  return records;
}

std::string RenderHtml(std::span<const ExplanationRecord> records) {
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
          "<title>Token attributions</title><style>"
          "body{font-family:sans-serif;line-height:2}"
          ".c{margin:1em 0}.id{color:#666;font-size:80%}"
          "span.t{padding:2px 3px;border-radius:3px}"
          "</style></head><body>\n";
  for (const ExplanationRecord& r : records) {
    for (const Attribution& a : r.attributions) {
      double scale = 0.0;
      for (double s : a.scores) scale = std::max(scale, std::abs(s));
      html << "<div class=\"c\"><div class=\"id\">" << HtmlEscape(r.id)
           << " &middot; " << HtmlEscape(r.method) << " &middot; output "
           << a.explained_output << "</div>";
      for (std::size_t i = 0; i < a.tokens.size(); ++i) {
        const double v = scale > 0 ? a.scores[i] / scale : 0.0;
        // Red for positive scores, blue for negative.
        const int r_ch = v < 0 ? static_cast<int>(255 * (1 + v)) : 255;
        const int g_ch = static_cast<int>(255 * (1 - std::abs(v)));
        const int b_ch = v > 0 ? static_cast<int>(255 * (1 - v)) : 255;
        char style[64];
        std::snprintf(style, sizeof(style), "background:rgb(%d,%d,%d)", r_ch,
                      g_ch, b_ch);
        char title[32];
        std::snprintf(title, sizeof(title), "%.4g", a.scores[i]);
        html << "<span class=\"t\" style=\"" << style << "\" title=\"" << title
             << "\">" << HtmlEscape(a.tokens[i].text) << "</span> ";
      }
      html << "</div>\n";
    }
  }
  html << "</body></html>\n";
  return html.str();
}

}  // namespace offspan

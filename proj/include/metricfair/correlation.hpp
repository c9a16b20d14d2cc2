// Copyright 2026 The metricfair Authors.
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


// Correlation of metric scores with human judgments, per group (language
// pair, summarization system set) and macro-averaged over groups.

#ifndef METRICFAIR_CORRELATION_HPP_
#define METRICFAIR_CORRELATION_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "metricfair/core.hpp"
#include "metricfair/scoring.hpp"

namespace metricfair {

enum class CorrelationKind { kPearson, kSpearman };

inline std::string CorrelationKindName(CorrelationKind k) {
  return k == CorrelationKind::kPearson ? "pearson" : "spearman";
}

inline CorrelationKind ParseCorrelationKind(const std::string& s) {
  if (s == "pearson") return CorrelationKind::kPearson;
  if (s == "spearman") return CorrelationKind::kSpearman;
  throw Error(ErrorCode::kConfigError, "unknown correlation '" + s + "'");
}

// Sample Pearson r, two-pass with centered sums.
inline double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(x.size()) + " vs " +
                                                std::to_string(y.size()) + " values");
  }
  if (x.size() < 2) throw Error(ErrorCode::kLengthMismatch, "need at least two values");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::kZeroVariance, "constant input");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(x.size()) + " vs " +
                                                std::to_string(y.size()) + " values");
  }
  std::vector<double> rx = AverageRanks(x), ry = AverageRanks(y);
  return Pearson(rx, ry);
}

inline double Correlation(CorrelationKind kind, std::span<const double> x,
                          std::span<const double> y) {
  return kind == CorrelationKind::kPearson ? Pearson(x, y) : Spearman(x, y);
}

struct JudgedSegment {
  std::string id;
  std::string group;
  TextUnit sys;
  TextUnit ref;
  double human = 0;
};

namespace detail {

inline JudgedSegment MakeSegment(std::string id, std::string group, std::string sys,
                                 std::string ref, double human, const std::string& where) {
  if (id.empty()) throw Error(ErrorCode::kSchemaError, where + ": empty id");
  if (!std::isfinite(human)) throw Error(ErrorCode::kSchemaError, where + ": human score not finite");
  try {
    return {std::move(id), std::move(group), TextUnit(sys), TextUnit(ref), human};
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.message());
  }
}

inline void CheckUniqueIds(const std::vector<JudgedSegment>& segs) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : segs) {
    if (!seen.emplace(s.group, s.id).second) {
      throw Error(ErrorCode::kDuplicateId, "segment '" + s.id + "' repeated in group '" + s.group + "'");
    }
  }
}

}  // namespace detail

// TSV: id, group, sys, ref, human. Lines starting with '#' are skipped.
inline std::vector<JudgedSegment> ParseJudgedTsv(std::istream& in, const std::string& name) {
  std::vector<JudgedSegment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string where = name + ":" + std::to_string(line_no);
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 5) {
      throw Error(ErrorCode::kSchemaError, where + ": expected 5 tab-separated fields, got " +
                                               std::to_string(cols.size()));
    }
    double human = 0;
    try {
      std::size_t used = 0;
      human = std::stod(cols[4], &used);
      if (used != cols[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kSchemaError, where + ": bad human score '" + cols[4] + "'");
    }
    out.push_back(detail::MakeSegment(cols[0], cols[1], cols[2], cols[3], human, where));
  }
  detail::CheckUniqueIds(out);
  return out;
}

// JSONL: {"id", "group"?, "sys", "ref", "human"}.
inline std::vector<JudgedSegment> ParseJudgedJsonl(std::istream& in, const std::string& name) {
  std::vector<JudgedSegment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!HasNonSpace(line)) continue;
    std::string where = name + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaError, where + ": " + e.what());
    }
    for (const char* key : {"id", "sys", "ref", "human"}) {
      if (!j.contains(key)) throw Error(ErrorCode::kSchemaError, where + ": missing '" + key + "'");
    }
    try {
      std::string id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      out.push_back(detail::MakeSegment(id, j.value("group", ""), j["sys"].get<std::string>(),
                                        j["ref"].get<std::string>(), j["human"].get<double>(),
                                        where));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaError, where + ": " + e.what());
    }
  }
  detail::CheckUniqueIds(out);
  return out;
}

inline std::vector<JudgedSegment> LoadJudgedSegments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  return jsonl ? ParseJudgedJsonl(in, path) : ParseJudgedTsv(in, path);
}

struct GroupCorrelation {
  std::string group;
  std::size_t n = 0;
  double value = 0;
};

struct CorrelationReport {
  MetricId metric;
  CorrelationKind kind = CorrelationKind::kPearson;
  std::vector<GroupCorrelation> groups;  // sorted by group name
  double average = 0;                    // mean of per-group values
};

// Correlation of already-computed metric scores, grouped by segment group.
inline CorrelationReport CorrelateScores(std::span<const JudgedSegment> segments,
                                         std::span<const double> scores, CorrelationKind kind,
                                         MetricId metric = {}) {
  if (segments.empty()) throw Error(ErrorCode::kEmptySet, "no judged segments");
  if (segments.size() != scores.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one score per segment required");
  }
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto& [m, h] = by_group[segments[i].group];
    m.push_back(scores[i]);
    h.push_back(segments[i].human);
  }
  CorrelationReport report{std::move(metric), kind, {}, 0};
  double total = 0;
  for (const auto& [group, vals] : by_group) {
    double r;
    try {
      r = Correlation(kind, vals.first, vals.second);
    } catch (const Error& e) {
      throw Error(e.code(), "group '" + group + "': " + e.message());
    }
    report.groups.push_back({group, vals.first.size(), r});
    total += r;
  }
  report.average = total / static_cast<double>(report.groups.size());
  return report;
}

inline CorrelationReport Correlate(std::span<const JudgedSegment> segments, const Scorer& scorer,
                                   CorrelationKind kind, int jobs = 1) {
  std::vector<double> scores(segments.size());
  ParallelFor(segments.size(), jobs, [&](std::size_t i) {
    try {
      scores[i] = scorer.Score(segments[i].sys, segments[i].ref).value;
    } catch (const Error& e) {
      throw Error(e.code(), "segment '" + segments[i].id + "': " + e.message());
    }
  });
  return CorrelateScores(segments, scores, kind, scorer.id());
}

inline nlohmann::json CorrelationReportToJson(const CorrelationReport& r) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.groups) groups.push_back({{"group", g.group}, {"n", g.n}, {"value", g.value}});
  return {{"metric", r.metric.Key()},
          {"kind", CorrelationKindName(r.kind)},
          {"level", "segment"},
          {"groups", groups},
          {"average", r.average}};
}

}  // namespace metricfair

#endif  // METRICFAIR_CORRELATION_HPP_

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


// Paired-example bias audit. Raw metric scores of both candidates of every
// pair are min-max rescaled to [0, 100] over the whole attribute dataset;
// bias is the mean absolute difference of rescaled pair scores, and the
// stereotypical difference is its signed (stereo minus anti) counterpart.

#ifndef METRICFAIR_FAIRNESS_HPP_
#define METRICFAIR_FAIRNESS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "metricfair/core.hpp"
#include "metricfair/provider.hpp"
#include "metricfair/scoring.hpp"

namespace metricfair {

struct PairScores {
  std::string example_id;
  double stereo = 0.0;
  double anti = 0.0;
};

struct ScoredPairSet {
  MetricId metric;
  SensitiveAttribute attribute = SensitiveAttribute::kGender;
  std::vector<PairScores> rows;
};

struct BiasReport {
  MetricId metric;
  SensitiveAttribute attribute = SensitiveAttribute::kGender;
  int n_pairs = 0;
  double bias_abs = 0.0;
  // Signed mean of (stereo - anti) on the rescaled scale.
  double bias_stereo = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  std::vector<SnapshotMeta> provider_meta;

  friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

struct ScoreRange {
  double min = 0.0;
  double max = 0.0;
};

inline ScoreRange RangeOf(std::span<const double> scores) {
  if (scores.size() < 2) {
    throw Error(ErrorCode::kDegenerateRange, "rescaling needs at least two scores");
  }
  auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (!(*hi > *lo)) {
    throw Error(ErrorCode::kDegenerateRange,
                "all scores equal " + std::to_string(*lo) + "; rescaling is undefined");
  }
  return {*lo, *hi};
}

inline double Rescale(double s, const ScoreRange& range) {
  return (s - range.min) / (range.max - range.min) * 100.0;
}

inline std::vector<double> Normalize(std::span<const double> scores) {
  ScoreRange range = RangeOf(scores);
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(Rescale(s, range));
  return out;
}

inline ScoreRange PairSetRange(const ScoredPairSet& set) {
  if (set.rows.empty()) throw Error(ErrorCode::kEmptySet, "no scored pairs");
  std::vector<double> all;
  all.reserve(set.rows.size() * 2);
  for (const auto& r : set.rows) {
    if (!std::isfinite(r.stereo) || !std::isfinite(r.anti)) {
      throw Error(ErrorCode::kSchemaError, "non-finite score for " + r.example_id);
    }
    all.push_back(r.stereo);
    all.push_back(r.anti);
  }
  return RangeOf(all);
}

// Rescales both sides of every pair with one range taken over all 2N scores.
inline ScoredPairSet NormalizePairSet(const ScoredPairSet& raw) {
  ScoreRange range = PairSetRange(raw);
  ScoredPairSet out{raw.metric, raw.attribute, {}};
  out.rows.reserve(raw.rows.size());
  for (const auto& r : raw.rows) {
    out.rows.push_back({r.example_id, Rescale(r.stereo, range), Rescale(r.anti, range)});
  }
  return out;
}

namespace detail {

// Mean with a canonical summation order, so row order cannot change the
// result. Summing by increasing magnitude visits |d| and d in the same order,
// which keeps |mean(d)| <= mean(|d|) exact under rounding.
inline double OrderFreeMean(std::vector<double> values) {
  std::sort(values.begin(), values.end(), [](double a, double b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

inline double BiasAbs(const ScoredPairSet& raw) {
  ScoredPairSet n = NormalizePairSet(raw);
  std::vector<double> diffs;
  for (const auto& r : n.rows) diffs.push_back(std::abs(r.stereo - r.anti));
  return detail::OrderFreeMean(std::move(diffs));
}

inline double BiasStereotypical(const ScoredPairSet& raw) {
  ScoredPairSet n = NormalizePairSet(raw);
  std::vector<double> diffs;
  for (const auto& r : n.rows) diffs.push_back(r.stereo - r.anti);
  return detail::OrderFreeMean(std::move(diffs));
}

inline BiasReport MakeBiasReport(const ScoredPairSet& raw,
                                 std::vector<SnapshotMeta> provider_meta = {}) {
  ScoreRange range = PairSetRange(raw);
  BiasReport report;
  report.metric = raw.metric;
  report.attribute = raw.attribute;
  report.n_pairs = static_cast<int>(raw.rows.size());
  report.bias_abs = BiasAbs(raw);
  report.bias_stereo = BiasStereotypical(raw);
  report.s_min = range.min;
  report.s_max = range.max;
  report.provider_meta = std::move(provider_meta);
  return report;
}

// (M(c1, r) - M(c2, r))^2 on raw scores.
inline double DebiasLoss(const Scorer& metric, const TextUnit& c1, const TextUnit& c2,
                         const TextUnit& r) {
  double d = metric.Score(c1, r).value - metric.Score(c2, r).value;
  return d * d;
}

// (M_a(p, h) - M_b(p, h))^2, with p scored as the candidate against h.
inline double KdLoss(const Scorer& metric_a, const Scorer& metric_b, const TextUnit& p,
                     const TextUnit& h) {
  double d = metric_a.Score(p, h).value - metric_b.Score(p, h).value;
  return d * d;
}

// Scores both candidates of every example. Any scoring failure aborts.
inline ScoredPairSet ScorePairs(std::span<const PairedExample> dataset, const Scorer& scorer,
                                int jobs = 1) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptySet, "empty dataset");
  SensitiveAttribute attribute = dataset.front().attribute;
  for (const auto& ex : dataset) {
    if (ex.attribute != attribute) {
      throw Error(ErrorCode::kSchemaError, "dataset mixes attributes " +
                                               std::string(AttributeName(attribute)) + " and " +
                                               std::string(AttributeName(ex.attribute)));
    }
  }
  ScoredPairSet set{scorer.id(), attribute, std::vector<PairScores>(dataset.size())};
  ParallelFor(dataset.size(), jobs, [&](std::size_t i) {
    const PairedExample& ex = dataset[i];
    try {
      set.rows[i] = {ex.id, scorer.Score(ex.sys_stereo, ex.reference).value,
                     scorer.Score(ex.sys_anti, ex.reference).value};
    } catch (const Error& e) {
      throw Error(e.code(), "example " + ex.id + ": " + e.message());
    }
  });
  return set;
}

inline BiasReport Audit(std::span<const PairedExample> dataset, const Scorer& scorer,
                        int jobs = 1) {
  return MakeBiasReport(ScorePairs(dataset, scorer, jobs), scorer.provider_meta());
}

struct LoadOptions {
  // Reject examples whose two candidates are identical.
  bool strict = false;
};

inline std::optional<SensitiveAttribute> ParseAttributeLoose(std::string name) {
  for (char& c : name) {
    if (c == ' ' || c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (name == "pa") return SensitiveAttribute::kPhysicalAppearance;
  if (name == "ss" || name == "ses") return SensitiveAttribute::kSocioeconomicStatus;
  return ParseAttribute(name);
}

inline std::vector<PairedExample> ParsePairedDataset(std::istream& in, const std::string& name,
                                                     const LoadOptions& options = {}) {
  std::vector<PairedExample> out;
  std::set<std::string> ids;
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
    if (!j.is_object()) throw Error(ErrorCode::kSchemaError, where + ": record is not an object");
    auto field = [&](const char* key) {
      if (!j.contains(key)) {
        throw Error(ErrorCode::kSchemaError, where + ": missing field '" + key + "'");
      }
      if (!j[key].is_string()) {
        throw Error(ErrorCode::kSchemaError, where + ": field '" + key + "' must be a string");
      }
      return j[key].get<std::string>();
    };
    PairedExample ex;
    ex.id = field("id");
    std::string attr = field("attribute");
    auto parsed = ParseAttributeLoose(attr);
    if (!parsed) {
      throw Error(ErrorCode::kSchemaError, where + ": unknown attribute '" + attr + "'");
    }
    ex.attribute = *parsed;
    ex.reference = TextUnit(field("reference"));
    ex.sys_stereo = TextUnit(field("sys_stereo"));
    ex.sys_anti = TextUnit(field("sys_anti"));
    for (const auto* t : {&ex.reference, &ex.sys_stereo, &ex.sys_anti}) {
      if (t->blank()) throw Error(ErrorCode::kSchemaError, where + ": blank text");
    }
    if (options.strict && ex.sys_stereo.raw() == ex.sys_anti.raw()) {
      throw Error(ErrorCode::kSchemaError, where + ": candidates are identical");
    }
    if (!ids.insert(ex.id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate id '" + ex.id + "'");
    }
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw Error(ErrorCode::kSchemaError, name + ": no records");
  return out;
}

inline std::vector<PairedExample> LoadPairedDataset(const std::string& path,
                                                    const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ParsePairedDataset(in, path, options);
}

inline std::map<SensitiveAttribute, std::vector<PairedExample>> GroupByAttribute(
    std::vector<PairedExample> dataset) {
  std::map<SensitiveAttribute, std::vector<PairedExample>> out;
  for (auto& ex : dataset) out[ex.attribute].push_back(std::move(ex));
  return out;
}

inline std::string UtcTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json MetricIdToJson(const MetricId& m) {
  return {{"paradigm", ParadigmName(m.paradigm)}, {"name", m.name}, {"config", m.config},
          {"key", m.Key()}};
}

inline nlohmann::json BiasReportToJson(const BiasReport& r) {
  nlohmann::json metas = nlohmann::json::array();
  for (const auto& m : r.provider_meta) metas.push_back(MetaToJson(m));
  return {{"metric", MetricIdToJson(r.metric)},
          {"attribute", AttributeName(r.attribute)},
          {"n_pairs", r.n_pairs},
          {"bias_abs", r.bias_abs},
          {"bias_stereo", r.bias_stereo},
          {"bias_stereo_abs", std::abs(r.bias_stereo)},
          {"s_min", r.s_min},
          {"s_max", r.s_max},
          {"provider_meta", metas}};
}

namespace detail {

inline std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

// One row per metric in the column order Race, Gender, Religion, PA, Age, SS,
// Avg. Missing attributes print as "-" and are left out of the average.
inline std::string RenderBiasTable(std::span<const BiasReport> reports) {
  std::vector<std::string> order;
  std::map<std::string, std::map<SensitiveAttribute, double>> rows;
  for (const auto& r : reports) {
    std::string key = r.metric.Key();
    if (!rows.count(key)) order.push_back(key);
    rows[key][r.attribute] = r.bias_abs;
  }
  std::string out = "| Metric |";
  for (SensitiveAttribute a : kAllAttributes) out += " " + std::string(AttributeShortName(a)) + " |";
  out += " Avg. |\n|---|";
  for (std::size_t i = 0; i <= kAllAttributes.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& key : order) {
    const auto& cells = rows[key];
    out += "| " + key + " |";
    double sum = 0.0;
    for (SensitiveAttribute a : kAllAttributes) {
      auto it = cells.find(a);
      if (it == cells.end()) {
        out += " - |";
      } else {
        out += " " + detail::Fixed2(it->second) + " |";
        sum += it->second;
      }
    }
    out += " " + detail::Fixed2(sum / static_cast<double>(cells.size())) + " |\n";
  }
  return out;
}

// Absolute versus stereotypical difference, signed and unsigned.
inline std::string RenderStereotypeTable(std::span<const BiasReport> reports) {
  std::string out =
      "| Metric | Attribute | Absolute Diff. | Stereotypical Diff. | abs(Stereotypical Diff.) |\n"
      "|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += "| " + r.metric.Key() + " | " + std::string(AttributeShortName(r.attribute)) + " | " +
           detail::Fixed2(r.bias_abs) + " | " + detail::Fixed2(r.bias_stereo) + " | " +
           detail::Fixed2(std::abs(r.bias_stereo)) + " |\n";
  }
  return out;
}

}  // namespace metricfair

#endif  // METRICFAIR_FAIRNESS_HPP_

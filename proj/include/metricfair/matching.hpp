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


// Matching-paradigm metrics over provider embeddings: greedy cosine matching
// (BERTScore style) and earth mover's matching (MoverScore style), plus the
// token-level matching map used for inspection.

#ifndef METRICFAIR_MATCHING_HPP_
#define METRICFAIR_MATCHING_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "metricfair/core.hpp"
#include "metricfair/transport.hpp"

namespace metricfair {

struct EmbeddedText {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> vectors;

  std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }

  void Validate() const {
    if (tokens.empty()) throw Error(ErrorCode::kEmptyText, "embedded text has no tokens");
    if (tokens.size() != vectors.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "token and vector counts differ");
    }
    for (const auto& v : vectors) {
      if (v.size() != dim() || v.empty()) {
        throw Error(ErrorCode::kDimensionMismatch, "vectors of unequal dimension");
      }
      for (double x : v) {
        if (!std::isfinite(x)) throw Error(ErrorCode::kSchemaError, "non-finite embedding");
      }
    }
  }
};

// Smoothed inverse document frequency over a reference corpus.
class IdfTable {
 public:
  static constexpr double kFloor = 1e-6;

  IdfTable() = default;
  IdfTable(std::map<std::string, double> idf, double default_idf)
      : idf_(std::move(idf)), default_idf_(default_idf) {}

  double Get(const std::string& token) const {
    auto it = idf_.find(token);
    return it == idf_.end() ? default_idf_ : it->second;
  }

  double default_idf() const { return default_idf_; }
  const std::map<std::string, double>& table() const { return idf_; }

 private:
  std::map<std::string, double> idf_;
  double default_idf_ = 1.0;
};

// idf(t) = log((N+1)/(df(t)+1)), floored at 1e-6. Documents are token sets.
inline IdfTable BuildIdf(std::span<const std::vector<std::string>> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "idf needs at least one document");
  std::map<std::string, int> df;
  for (const auto& doc : corpus) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& t : seen) ++df[t];
  }
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, double> idf;
  for (const auto& [token, count] : df) {
    idf[token] = std::max(IdfTable::kFloor, std::log((n + 1.0) / (count + 1.0)));
  }
  return IdfTable(std::move(idf), std::max(IdfTable::kFloor, std::log(n + 1.0)));
}

inline IdfTable BuildIdf(std::span<const TextUnit> corpus) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& t : corpus) docs.push_back(t.tokens());
  return BuildIdf(std::span<const std::vector<std::string>>(docs));
}

namespace detail {

inline void RequireSameDim(const EmbeddedText& sys, const EmbeddedText& ref) {
  sys.Validate();
  ref.Validate();
  if (sys.dim() != ref.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dims " + std::to_string(sys.dim()) + " vs " +
                    std::to_string(ref.dim()));
  }
}

inline std::vector<std::vector<double>> Normalized(const EmbeddedText& t) {
  std::vector<std::vector<double>> out = t.vectors;
  for (auto& v : out) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : v) x /= norm;
    }
  }
  return out;
}

inline double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline std::vector<double> TokenWeights(const EmbeddedText& t, const IdfTable* idf) {
  std::vector<double> w(t.tokens.size(), 1.0);
  if (idf != nullptr) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = idf->Get(t.tokens[i]);
  }
  return w;
}

inline std::vector<double> ToDistribution(std::vector<double> w) {
  double s = 0.0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
  return w;
}

}  // namespace detail

// Cosine similarities of L2-normalized vectors, clamped to [-1, 1].
inline Matrix CosineMatrix(const EmbeddedText& sys, const EmbeddedText& ref) {
  detail::RequireSameDim(sys, ref);
  auto a = detail::Normalized(sys);
  auto b = detail::Normalized(ref);
  Matrix sim(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      sim(i, j) = std::clamp(detail::Dot(a[i], b[j]), -1.0, 1.0);
    }
  }
  return sim;
}

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Greedy matching: every reference token takes its best candidate match for
// recall, every candidate token its best reference match for precision.
inline BertScoreResult BertScore(const EmbeddedText& sys, const EmbeddedText& ref,
                                 const IdfTable* idf = nullptr) {
  Matrix sim = CosineMatrix(sys, ref);
  std::vector<double> ws = detail::TokenWeights(sys, idf);
  std::vector<double> wr = detail::TokenWeights(ref, idf);
  double p_num = 0.0, p_den = 0.0;
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    auto row = sim.Row(i);
    p_num += ws[i] * *std::max_element(row.begin(), row.end());
    p_den += ws[i];
  }
  double r_num = 0.0, r_den = 0.0;
  for (std::size_t j = 0; j < sim.cols(); ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < sim.rows(); ++i) best = std::max(best, sim(i, j));
    r_num += wr[j] * best;
    r_den += wr[j];
  }
  BertScoreResult out;
  out.precision = p_num / p_den;
  out.recall = r_num / r_den;
  // Harmonic mean when P and R share a sign. With opposite signs the formula
  // can leave [min(P, R), max(P, R)], so F is pinned to 0 there.
  double pr = out.precision * out.recall;
  out.f = pr > 0.0 ? 2.0 * pr / (out.precision + out.recall) : 0.0;
  return out;
}

enum class OtSolver { kAuto, kExact, kSinkhorn };

inline std::string_view OtSolverName(OtSolver s) {
  switch (s) {
    case OtSolver::kAuto: return "auto";
    case OtSolver::kExact: return "exact";
    case OtSolver::kSinkhorn: return "sinkhorn";
  }
  return "";
}

// Texts whose shorter side has at most this many tokens use the exact solver
// under OtSolver::kAuto.
inline constexpr std::size_t kExactSolverLimit = 64;

inline Matrix EuclideanCost(const EmbeddedText& sys, const EmbeddedText& ref) {
  detail::RequireSameDim(sys, ref);
  auto a = detail::Normalized(sys);
  auto b = detail::Normalized(ref);
  Matrix cost(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a[i].size(); ++k) {
        double d = a[i][k] - b[j][k];
        s += d * d;
      }
      cost(i, j) = std::sqrt(s);
    }
  }
  return cost;
}

struct MoverScoreResult {
  double score = 0.0;
  OtSolver solver_used = OtSolver::kExact;
  TransportPlan transport;
};

// Negative word mover's distance between idf-weighted token distributions.
inline MoverScoreResult MoverScoreDetailed(const EmbeddedText& sys, const EmbeddedText& ref,
                                           const IdfTable& idf,
                                           OtSolver solver = OtSolver::kAuto,
                                           const SinkhornOptions& sinkhorn = {}) {
  Matrix cost = EuclideanCost(sys, ref);
  std::vector<double> a = detail::ToDistribution(detail::TokenWeights(sys, &idf));
  std::vector<double> b = detail::ToDistribution(detail::TokenWeights(ref, &idf));
  if (solver == OtSolver::kAuto) {
    solver = std::min(a.size(), b.size()) <= kExactSolverLimit ? OtSolver::kExact
                                                               : OtSolver::kSinkhorn;
  }
  MoverScoreResult out;
  out.solver_used = solver;
  out.transport = solver == OtSolver::kExact ? SolveOtExact(a, b, cost)
                                             : SolveOtSinkhorn(a, b, cost, sinkhorn);
  out.score = -out.transport.objective;
  return out;
}

inline double MoverScore(const EmbeddedText& sys, const EmbeddedText& ref, const IdfTable& idf,
                         OtSolver solver = OtSolver::kAuto) {
  return MoverScoreDetailed(sys, ref, idf, solver).score;
}

enum class MatchingMode { kGreedy, kOt };

struct MatchingMap {
  std::vector<std::string> sys_tokens;
  std::vector<std::string> ref_tokens;
  Matrix similarity;
  // Best reference index per candidate token: the cosine argmax (greedy) or
  // the largest transport mass (OT).
  std::vector<int> alignment;
  MatchingMode mode = MatchingMode::kGreedy;
  // Present in OT mode only.
  std::optional<Matrix> plan;

  friend bool operator==(const MatchingMap&, const MatchingMap&) = default;
};

inline std::size_t ArgMax(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline MatchingMap BuildMatchingMap(const EmbeddedText& sys, const EmbeddedText& ref,
                                    MatchingMode mode, const IdfTable* idf = nullptr) {
  MatchingMap map;
  map.sys_tokens = sys.tokens;
  map.ref_tokens = ref.tokens;
  map.similarity = CosineMatrix(sys, ref);
  map.mode = mode;
  if (mode == MatchingMode::kGreedy) {
    for (std::size_t i = 0; i < map.similarity.rows(); ++i) {
      map.alignment.push_back(static_cast<int>(ArgMax(map.similarity.Row(i))));
    }
  } else {
    std::vector<double> a = detail::ToDistribution(detail::TokenWeights(sys, idf));
    std::vector<double> b = detail::ToDistribution(detail::TokenWeights(ref, idf));
    TransportPlan t = SolveOtExact(a, b, EuclideanCost(sys, ref));
    for (std::size_t i = 0; i < t.plan.rows(); ++i) {
      map.alignment.push_back(static_cast<int>(ArgMax(t.plan.Row(i))));
    }
    map.plan = std::move(t.plan);
  }
  return map;
}

inline nlohmann::json MatchingMapToJson(const MatchingMap& map) {
  nlohmann::json j;
  j["sys_tokens"] = map.sys_tokens;
  j["ref_tokens"] = map.ref_tokens;
  j["similarity"] = map.similarity.ToRows();
  j["alignment"] = map.alignment;
  j["mode"] = map.mode == MatchingMode::kGreedy ? "greedy" : "ot";
  if (map.plan) j["plan"] = map.plan->ToRows();
  return j;
}

inline MatchingMap MatchingMapFromJson(const nlohmann::json& j) {
  try {
    MatchingMap map;
    map.sys_tokens = j.at("sys_tokens").get<std::vector<std::string>>();
    map.ref_tokens = j.at("ref_tokens").get<std::vector<std::string>>();
    map.similarity = Matrix::FromRows(j.at("similarity").get<std::vector<std::vector<double>>>());
    map.alignment = j.at("alignment").get<std::vector<int>>();
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "greedy") {
      map.mode = MatchingMode::kGreedy;
    } else if (mode == "ot") {
      map.mode = MatchingMode::kOt;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown matching mode '" + mode + "'");
    }
    if (j.contains("plan")) {
      map.plan = Matrix::FromRows(j.at("plan").get<std::vector<std::vector<double>>>());
    }
    if (map.similarity.rows() != map.sys_tokens.size() ||
        map.similarity.cols() != map.ref_tokens.size() ||
        map.alignment.size() != map.sys_tokens.size()) {
      throw Error(ErrorCode::kSchemaError, "matching map shapes are inconsistent");
    }
    for (int a : map.alignment) {
      if (a < 0 || static_cast<std::size_t>(a) >= map.ref_tokens.size()) {
        throw Error(ErrorCode::kSchemaError, "alignment index out of range");
      }
    }
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("matching map: ") + e.what());
  }
}

// Text heatmap: rows are candidate tokens, columns reference tokens. Cells
// are shaded by similarity decile on [-1, 1]; the aligned cell is bracketed.
inline std::string RenderHeatmap(const MatchingMap& map) {
  static constexpr std::string_view kShades = " .:-=+*#%@";
  std::size_t label = 0;
  for (const auto& t : map.sys_tokens) label = std::max(label, t.size());
  std::string out;
  for (std::size_t j = 0; j < map.ref_tokens.size(); ++j) {
    out += std::string(label + 2 + j * 3, ' ') + "| " + map.ref_tokens[j] + "\n";
  }
  for (std::size_t i = 0; i < map.sys_tokens.size(); ++i) {
    out += map.sys_tokens[i] + std::string(label + 1 - map.sys_tokens[i].size(), ' ');
    for (std::size_t j = 0; j < map.ref_tokens.size(); ++j) {
      double s = map.similarity(i, j);
      auto decile = static_cast<std::size_t>(std::clamp((s + 1.0) / 2.0 * 10.0, 0.0, 9.0));
      bool marked = map.alignment[i] == static_cast<int>(j);
      out += marked ? '[' : ' ';
      out += kShades[decile];
      out += marked ? ']' : ' ';
    }
    out += "\n";
  }
  return out;
}

}  // namespace metricfair

#endif  // METRICFAIR_MATCHING_HPP_

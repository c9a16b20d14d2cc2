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


// Binds a MetricId to an implementation. MetricScorer dispatches every
// paradigm: n-gram metrics are computed locally, PLM metrics go through a
// ModelProvider.

#ifndef METRICFAIR_SCORING_HPP_
#define METRICFAIR_SCORING_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "metricfair/core.hpp"
#include "metricfair/generation.hpp"
#include "metricfair/matching.hpp"
#include "metricfair/ngram.hpp"
#include "metricfair/provider.hpp"

namespace metricfair {

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const MetricId& id() const = 0;
  virtual MetricScore Score(const TextUnit& sys, const TextUnit& ref) const = 0;
  virtual std::vector<SnapshotMeta> provider_meta() const { return {}; }
};

namespace detail {

struct MetricEntry {
  Paradigm paradigm;
  std::map<std::string, std::string> defaults;
  std::set<std::string> allowed;
};

inline const std::map<std::string, MetricEntry>& MetricTable() {
  static const std::map<std::string, MetricEntry> table = {
      {"bleu", {Paradigm::kNGram, {}, {}}},
      {"rouge1", {Paradigm::kNGram, {{"variant", "f"}}, {"variant"}}},
      {"meteor", {Paradigm::kNGram, {}, {"synonyms"}}},
      {"nist", {Paradigm::kNGram, {}, {}}},
      {"chrf", {Paradigm::kNGram, {}, {}}},
      {"bertscore", {Paradigm::kMatching, {{"idf", "off"}, {"variant", "f"}}, {"model", "layer", "idf", "variant"}}},
      {"moverscore", {Paradigm::kMatching, {{"idf", "on"}, {"solver", "auto"}}, {"model", "layer", "idf", "solver"}}},
      {"bartscore", {Paradigm::kGeneration, {{"direction", "f"}}, {"model", "direction"}}},
      {"prism", {Paradigm::kGeneration, {{"direction", "f"}}, {"model", "direction"}}},
      {"bleurt", {Paradigm::kRegression, {}, {"model"}}},
      {"regression", {Paradigm::kRegression, {}, {"model"}}},
  };
  return table;
}

}  // namespace detail

// Builds a validated MetricId with defaults made explicit, so two ids with
// the same effective configuration compare equal.
inline MetricId MakeMetricId(const std::string& name,
                             std::map<std::string, std::string> config = {}) {
  const auto& table = detail::MetricTable();
  auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::kUnknownMetric, name);
  const detail::MetricEntry& entry = it->second;
  for (const auto& [k, v] : config) {
    if (!entry.allowed.count(k)) {
      throw Error(ErrorCode::kConfigError, "metric " + name + " has no option '" + k + "'");
    }
    if (v.empty()) throw Error(ErrorCode::kConfigError, "option '" + k + "' is empty");
  }
  for (const auto& [k, v] : entry.defaults) config.emplace(k, v);
  if (entry.paradigm != Paradigm::kNGram && !config.count("model")) {
    throw Error(ErrorCode::kConfigError, "metric " + name + " needs a model");
  }
  auto check_enum = [&](const std::string& key, std::initializer_list<const char*> values) {
    auto c = config.find(key);
    if (c == config.end()) return;
    for (const char* v : values) {
      if (c->second == v) return;
    }
    throw Error(ErrorCode::kConfigError, "bad value '" + c->second + "' for " + key);
  };
  check_enum("variant", {"p", "r", "f"});
  check_enum("idf", {"on", "off"});
  check_enum("direction", {"precision", "recall", "f"});
  check_enum("solver", {"auto", "exact", "sinkhorn"});
  if (name == "moverscore" && config["idf"] != "on") {
    throw Error(ErrorCode::kConfigError, "moverscore is always idf weighted");
  }
  if (auto l = config.find("layer"); l != config.end()) {
    try {
      std::size_t used = 0;
      std::stoi(l->second, &used);
      if (used != l->second.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "layer must be an integer");
    }
  }
  return MetricId{entry.paradigm, name, std::move(config)};
}

struct ScoringContext {
  std::shared_ptr<const ModelProvider> provider;
  // Evaluation references; source of NIST info weights and idf tables.
  std::vector<TextUnit> reference_corpus;
};

class MetricScorer : public Scorer {
 public:
  MetricScorer(MetricId id, ScoringContext ctx) : id_(std::move(id)), ctx_(std::move(ctx)) {
    if (!detail::MetricTable().count(id_.name)) throw Error(ErrorCode::kUnknownMetric, id_.name);
    if (id_.paradigm != Paradigm::kNGram) {
      if (!ctx_.provider) {
        throw Error(ErrorCode::kProviderUnavailable, id_.name + " needs a model provider");
      }
      model_ = id_.Get("model");
      if (auto l = id_.Get("layer"); !l.empty()) layer_ = std::stoi(l);
      meta_ = ctx_.provider->Meta(model_, id_.paradigm == Paradigm::kMatching ? layer_ : std::nullopt);
    }
    if (id_.name == "nist") {
      std::vector<Tokens> corpus;
      for (const auto& t : ctx_.reference_corpus) corpus.push_back(SurfaceTokens(t));
      info_ = InfoWeights::Build(corpus);
    }
    if (id_.paradigm == Paradigm::kMatching && id_.Get("idf") == "on") {
      if (ctx_.reference_corpus.empty()) {
        throw Error(ErrorCode::kEmptyCorpus, id_.name + " idf needs reference texts");
      }
      std::vector<std::string> texts;
      for (const auto& t : ctx_.reference_corpus) texts.push_back(t.raw());
      std::vector<std::vector<std::string>> docs;
      for (auto& e : ctx_.provider->Embed(texts, model_, layer_)) docs.push_back(std::move(e.tokens));
      idf_ = BuildIdf(std::span<const std::vector<std::string>>(docs));
    }
    if (id_.name == "meteor" && !id_.Get("synonyms").empty()) {
      synonyms_ = SynonymLexicon::Load(id_.Get("synonyms"));
    }
  }

  const MetricId& id() const override { return id_; }

  std::vector<SnapshotMeta> provider_meta() const override {
    if (meta_) return {*meta_};
    return {};
  }

  const std::optional<IdfTable>& idf() const { return idf_; }

  MetricScore Score(const TextUnit& sys, const TextUnit& ref) const override {
    if (sys.blank() || ref.blank()) {
      throw Error(ErrorCode::kEmptyText, "candidate and reference must be non-empty");
    }
    switch (id_.paradigm) {
      case Paradigm::kNGram: return MakeScore(ScoreNGram(sys, ref), id_);
      case Paradigm::kMatching: return ScoreMatching(sys, ref);
      case Paradigm::kGeneration: return MakeScore(ScoreGeneration(sys, ref), id_);
      case Paradigm::kRegression:
        return MakeScore(ctx_.provider->RegressionScore(sys.raw(), ref.raw(), model_), id_);
    }
    throw Error(ErrorCode::kUnknownMetric, id_.name);
  }

 private:
  static Tokens SurfaceTokens(const TextUnit& t) {
    return t.has_tokens() ? t.tokens() : TokenizeSurface(t.raw());
  }

  double ScoreNGram(const TextUnit& sys, const TextUnit& ref) const {
    if (id_.name == "chrf") return Chrf(sys.raw(), ref.raw());
    Tokens s = SurfaceTokens(sys);
    Tokens r = SurfaceTokens(ref);
    if (id_.name == "bleu") return Bleu(s, r);
    if (id_.name == "rouge1") {
      PrecisionRecallF prf = Rouge1(s, r);
      std::string v = id_.Get("variant");
      return v == "p" ? prf.precision : v == "r" ? prf.recall : prf.f;
    }
    if (id_.name == "meteor") return Meteor(s, r, synonyms_ ? &*synonyms_ : nullptr);
    if (id_.name == "nist") return Nist(s, r, info_);
    throw Error(ErrorCode::kUnknownMetric, id_.name);
  }

  MetricScore ScoreMatching(const TextUnit& sys, const TextUnit& ref) const {
    std::vector<std::string> texts = {sys.raw(), ref.raw()};
    std::vector<EmbeddedText> e = ctx_.provider->Embed(texts, model_, layer_);
    const IdfTable* idf = idf_ ? &*idf_ : nullptr;
    if (id_.name == "bertscore") {
      BertScoreResult b = BertScore(e[0], e[1], idf);
      std::string v = id_.Get("variant");
      return MakeScore(v == "p" ? b.precision : v == "r" ? b.recall : b.f, id_);
    }
    std::string s = id_.Get("solver");
    OtSolver solver = s == "exact" ? OtSolver::kExact
                      : s == "sinkhorn" ? OtSolver::kSinkhorn : OtSolver::kAuto;
    MoverScoreResult m = MoverScoreDetailed(e[0], e[1], *idf_, solver);
    MetricScore out = MakeScore(m.score, id_);
    out.notes["solver"] = std::string(OtSolverName(m.solver_used));
    return out;
  }

  double ScoreGeneration(const TextUnit& sys, const TextUnit& ref) const {
    Direction d = *ParseDirection(id_.Get("direction"));
    double p = 0.0, r = 0.0;
    if (d != Direction::kRecall) {
      p = GenPrecision(ctx_.provider->LogProb(ref.raw(), sys.raw(), model_), sys.raw(), ref.raw());
    }
    if (d != Direction::kPrecision) {
      r = GenRecall(ctx_.provider->LogProb(sys.raw(), ref.raw(), model_), sys.raw(), ref.raw());
    }
    if (d == Direction::kPrecision) return p;
    if (d == Direction::kRecall) return r;
    return GenFScore(p, r);
  }

  MetricId id_;
  ScoringContext ctx_;
  std::string model_;
  std::optional<int> layer_;
  std::optional<SnapshotMeta> meta_;
  InfoWeights info_;
  std::optional<IdfTable> idf_;
  std::optional<SynonymLexicon> synonyms_;
};

}  // namespace metricfair

#endif  // METRICFAIR_SCORING_HPP_

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


// The boundary to pretrained models. A ModelProvider serves contextual
// embeddings, conditional log-probabilities and regression scores. Two
// implementations ship: FixtureProvider (JSON Lines files on disk) and
// HttpProvider (see http_provider.hpp). CachingProvider decorates either.

#ifndef METRICFAIR_PROVIDER_HPP_
#define METRICFAIR_PROVIDER_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "metricfair/core.hpp"
#include "metricfair/generation.hpp"
#include "metricfair/matching.hpp"

namespace metricfair {

struct SnapshotMeta {
  std::string model;
  std::string revision;
  int layer = -1;
  std::string created_at;

  bool SameSnapshot(const SnapshotMeta& o) const {
    return model == o.model && revision == o.revision && layer == o.layer;
  }

  friend bool operator==(const SnapshotMeta&, const SnapshotMeta&) = default;
};

inline nlohmann::json MetaToJson(const SnapshotMeta& m) {
  return {{"model", m.model}, {"revision", m.revision}, {"layer", m.layer},
          {"created_at", m.created_at}};
}

inline SnapshotMeta MetaFromJson(const nlohmann::json& j) {
  SnapshotMeta m;
  m.model = j.at("model").get<std::string>();
  m.revision = j.at("revision").get<std::string>();
  m.layer = j.value("layer", -1);
  m.created_at = j.value("created_at", std::string());
  return m;
}

// Wire/fixture record conversions. Field names are shared by the fixture
// files and the HTTP protocol.
namespace wire {

inline nlohmann::json EmbedRecord(const SnapshotMeta& meta, const std::string& text,
                                  const EmbeddedText& e) {
  return {{"meta", MetaToJson(meta)}, {"text", text}, {"tokens", e.tokens},
          {"vectors", e.vectors}};
}

inline EmbeddedText ParseEmbedded(const nlohmann::json& j) {
  EmbeddedText e;
  e.tokens = j.at("tokens").get<std::vector<std::string>>();
  e.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
  // Stored as decimal float32; keep exactly the float32 value.
  for (auto& v : e.vectors) {
    for (double& x : v) x = static_cast<double>(static_cast<float>(x));
  }
  e.Validate();
  return e;
}

inline nlohmann::json LogProbRecord(const SnapshotMeta& meta, const ConditionalLogProbs& c) {
  return {{"meta", MetaToJson(meta)}, {"source", c.source}, {"target", c.target},
          {"target_tokens", c.target_tokens}, {"logprobs", c.logprobs}};
}

inline ConditionalLogProbs ParseLogProbs(const nlohmann::json& j) {
  ConditionalLogProbs c;
  c.source = NormalizeNfc(j.at("source").get<std::string>());
  c.target = NormalizeNfc(j.at("target").get<std::string>());
  c.target_tokens = j.at("target_tokens").get<std::vector<std::string>>();
  c.logprobs = j.at("logprobs").get<std::vector<double>>();
  for (double& x : c.logprobs) x = static_cast<double>(static_cast<float>(x));
  c.Validate();
  return c;
}

inline nlohmann::json ScoreRecord(const SnapshotMeta& meta, const std::string& sys,
                                  const std::string& ref, double score) {
  return {{"meta", MetaToJson(meta)}, {"sys", sys}, {"ref", ref}, {"score", score}};
}

}  // namespace wire

class ModelProvider {
 public:
  virtual ~ModelProvider() = default;

  // One EmbeddedText per input text, in order. layer = nullopt selects the
  // model's default layer.
  virtual std::vector<EmbeddedText> Embed(std::span<const std::string> texts,
                                          const std::string& model,
                                          std::optional<int> layer) const = 0;
  virtual ConditionalLogProbs LogProb(const std::string& source, const std::string& target,
                                      const std::string& model) const = 0;
  // Opaque scalar from a regression metric; (sys, ref) order matters.
  virtual double RegressionScore(const std::string& sys, const std::string& ref,
                                 const std::string& model) const = 0;
  virtual SnapshotMeta Meta(const std::string& model, std::optional<int> layer) const = 0;
};

// Read-only provider over a directory of JSON Lines fixture files. Every
// record carries its snapshot meta; records of one model must agree on the
// revision.
class FixtureProvider : public ModelProvider {
 public:
  static FixtureProvider LoadDirectory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
      throw Error(ErrorCode::kProviderUnavailable, "fixture directory " + dir.string() +
                                                       " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    FixtureProvider p;
    for (const auto& f : files) p.LoadFile(f);
    return p;
  }

  void LoadFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!HasNonSpace(line)) continue;
      std::string where = path.string() + ":" + std::to_string(line_no);
      try {
        AddRecord(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kSchemaError, where + ": " + e.what());
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.message());
      }
    }
  }

  void AddRecord(const nlohmann::json& j) {
    SnapshotMeta meta = MetaFromJson(j.at("meta"));
    RegisterMeta(meta);
    if (j.contains("vectors")) {
      std::string text = NormalizeNfc(j.at("text").get<std::string>());
      embeddings_[{meta.model, meta.layer, text}] = wire::ParseEmbedded(j);
      default_layer_.emplace(meta.model, meta.layer);
    } else if (j.contains("logprobs")) {
      ConditionalLogProbs c = wire::ParseLogProbs(j);
      logprobs_[{meta.model, c.source, c.target}] = std::move(c);
    } else if (j.contains("score")) {
      double s = j.at("score").get<double>();
      if (!std::isfinite(s)) throw Error(ErrorCode::kSchemaError, "non-finite score");
      scores_[{meta.model, NormalizeNfc(j.at("sys").get<std::string>()),
               NormalizeNfc(j.at("ref").get<std::string>())}] = s;
    } else {
      throw Error(ErrorCode::kSchemaError, "record is neither embed, logprob nor score");
    }
  }

  std::vector<EmbeddedText> Embed(std::span<const std::string> texts, const std::string& model,
                                  std::optional<int> layer) const override {
    int l = ResolveLayer(model, layer);
    std::vector<EmbeddedText> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto it = embeddings_.find({model, l, NormalizeNfc(t)});
      if (it == embeddings_.end()) {
        throw Error(ErrorCode::kFixtureMiss, "no embedding of '" + t + "' for " + model);
      }
      out.push_back(it->second);
    }
    return out;
  }

  ConditionalLogProbs LogProb(const std::string& source, const std::string& target,
                              const std::string& model) const override {
    RequireModel(model);
    auto it = logprobs_.find({model, NormalizeNfc(source), NormalizeNfc(target)});
    if (it == logprobs_.end()) {
      throw Error(ErrorCode::kFixtureMiss,
                  "no log-probs of '" + target + "' given '" + source + "' for " + model);
    }
    return it->second;
  }

  double RegressionScore(const std::string& sys, const std::string& ref,
                         const std::string& model) const override {
    RequireModel(model);
    auto it = scores_.find({model, NormalizeNfc(sys), NormalizeNfc(ref)});
    if (it == scores_.end()) {
      throw Error(ErrorCode::kFixtureMiss, "no score for ('" + sys + "', '" + ref + "') from " + model);
    }
    return it->second;
  }

  SnapshotMeta Meta(const std::string& model, std::optional<int> layer) const override {
    RequireModel(model);
    auto dl = default_layer_.find(model);
    int l = layer ? *layer : (dl != default_layer_.end() ? dl->second : -1);
    auto it = metas_.find({model, l});
    if (it != metas_.end()) return it->second;
    if (!layer) return metas_.lower_bound({model, std::numeric_limits<int>::min()})->second;
    throw Error(ErrorCode::kFixtureMiss, "no snapshot of " + model + " at layer " + std::to_string(l));
  }

  std::vector<SnapshotMeta> AllMeta() const {
    std::vector<SnapshotMeta> out;
    for (const auto& [k, m] : metas_) out.push_back(m);
    return out;
  }

 private:
  void RegisterMeta(const SnapshotMeta& meta) {
    auto rev = revisions_.emplace(meta.model, meta.revision).first;
    if (rev->second != meta.revision) {
      throw Error(ErrorCode::kSnapshotMismatch, "model " + meta.model + " has revisions " +
                                                    rev->second + " and " + meta.revision);
    }
    metas_.emplace(std::make_pair(meta.model, meta.layer), meta);
  }

  void RequireModel(const std::string& model) const {
    if (!revisions_.count(model)) throw Error(ErrorCode::kUnknownModel, model);
  }

  int ResolveLayer(const std::string& model, std::optional<int> layer) const {
    RequireModel(model);
    if (layer) return *layer;
    auto it = default_layer_.find(model);
    if (it == default_layer_.end()) {
      throw Error(ErrorCode::kFixtureMiss, "model " + model + " has no embedding fixtures");
    }
    return it->second;
  }

  std::map<std::string, std::string> revisions_;
  std::map<std::pair<std::string, int>, SnapshotMeta> metas_;
  std::map<std::string, int> default_layer_;
  std::map<std::tuple<std::string, int, std::string>, EmbeddedText> embeddings_;
  std::map<std::tuple<std::string, std::string, std::string>, ConditionalLogProbs> logprobs_;
  std::map<std::tuple<std::string, std::string, std::string>, double> scores_;
};

// Bounded least-recently-used map. Not thread safe on its own.
template <typename Key, typename Value, typename Hash = std::hash<Key>>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

  std::optional<Value> Get(const Key& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  void Put(const Key& key, Value value) {
    if (capacity_ == 0) return;
    auto it = index_.find(key);
    if (it != index_.end()) {
      it->second->second = std::move(value);
      order_.splice(order_.begin(), order_, it->second);
      return;
    }
    order_.emplace_front(key, std::move(value));
    index_[key] = order_.begin();
    if (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
  }

  std::size_t size() const { return order_.size(); }

 private:
  std::size_t capacity_;
  std::list<std::pair<Key, Value>> order_;
  std::unordered_map<Key, typename std::list<std::pair<Key, Value>>::iterator, Hash> index_;
};

// Memoizes another provider. Keys are (kind, model, layer, text...).
class CachingProvider : public ModelProvider {
 public:
  CachingProvider(std::shared_ptr<const ModelProvider> inner, std::size_t capacity = 4096)
      : inner_(std::move(inner)), embed_(capacity), logprob_(capacity), score_(capacity) {}

  std::vector<EmbeddedText> Embed(std::span<const std::string> texts, const std::string& model,
                                  std::optional<int> layer) const override {
    std::vector<std::optional<EmbeddedText>> found(texts.size());
    std::vector<std::string> missing;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        found[i] = embed_.Get(Key("embed", model, layer, texts[i]));
        if (!found[i]) missing.push_back(texts[i]);
      }
    }
    if (!missing.empty()) {
      std::vector<EmbeddedText> fresh = inner_->Embed(missing, model, layer);
      std::lock_guard<std::mutex> lock(mu_);
      for (std::size_t k = 0; k < missing.size(); ++k) {
        embed_.Put(Key("embed", model, layer, missing[k]), fresh[k]);
      }
      std::size_t k = 0;
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!found[i]) found[i] = fresh[k++];
      }
    }
    std::vector<EmbeddedText> out;
    out.reserve(texts.size());
    for (auto& f : found) out.push_back(std::move(*f));
    return out;
  }

  ConditionalLogProbs LogProb(const std::string& source, const std::string& target,
                              const std::string& model) const override {
    std::string key = Key("logprob", model, std::nullopt, source + '\x1e' + target);
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto hit = logprob_.Get(key)) return *hit;
    }
    ConditionalLogProbs v = inner_->LogProb(source, target, model);
    std::lock_guard<std::mutex> lock(mu_);
    logprob_.Put(key, v);
    return v;
  }

  double RegressionScore(const std::string& sys, const std::string& ref,
                         const std::string& model) const override {
    std::string key = Key("score", model, std::nullopt, sys + '\x1e' + ref);
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto hit = score_.Get(key)) return *hit;
    }
    double v = inner_->RegressionScore(sys, ref, model);
    std::lock_guard<std::mutex> lock(mu_);
    score_.Put(key, v);
    return v;
  }

  SnapshotMeta Meta(const std::string& model, std::optional<int> layer) const override {
    return inner_->Meta(model, layer);
  }

  std::size_t cached_embeddings() const {
    std::lock_guard<std::mutex> lock(mu_);
    return embed_.size();
  }

 private:
  static std::string Key(std::string_view kind, const std::string& model,
                         std::optional<int> layer, const std::string& text) {
    return std::string(kind) + '\x1f' + model + '\x1f' +
           (layer ? std::to_string(*layer) : std::string("-")) + '\x1f' + NormalizeNfc(text);
  }

  std::shared_ptr<const ModelProvider> inner_;
  mutable std::mutex mu_;
  mutable LruCache<std::string, EmbeddedText> embed_;
  mutable LruCache<std::string, ConditionalLogProbs> logprob_;
  mutable LruCache<std::string, double> score_;
};

}  // namespace metricfair

#endif  // METRICFAIR_PROVIDER_HPP_

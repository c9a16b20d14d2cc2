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


// HTTP client for the model service wire protocol:
//   POST /v1/embed    {"model", "layer"?, "texts": [...]}
//                     -> {"meta", "results": [{"text", "tokens", "vectors"}]}
//   POST /v1/logprob  {"model", "source", "target"} -> log-prob record
//   POST /v1/score    {"model", "sys", "ref"} -> score record
//   GET  /v1/meta?model=NAME[&layer=L] -> snapshot meta
// 404 means unknown model, 422 a malformed request.

#ifndef METRICFAIR_HTTP_PROVIDER_HPP_
#define METRICFAIR_HTTP_PROVIDER_HPP_

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "metricfair/provider.hpp"

namespace metricfair {

class HttpProvider : public ModelProvider {
 public:
  explicit HttpProvider(std::string base_url, int timeout_seconds = 60)
      : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  }

  const std::string& base_url() const { return base_url_; }

  std::vector<EmbeddedText> Embed(std::span<const std::string> texts, const std::string& model,
                                  std::optional<int> layer) const override {
    nlohmann::json req = {{"model", model}, {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    if (layer) req["layer"] = *layer;
    nlohmann::json resp = Post("/v1/embed", req);
    try {
      CheckSnapshot(MetaFromJson(resp.at("meta")));
      const auto& results = resp.at("results");
      if (results.size() != texts.size()) {
        throw Error(ErrorCode::kProviderUnavailable, "embed returned " +
                                                         std::to_string(results.size()) +
                                                         " results for " +
                                                         std::to_string(texts.size()) + " texts");
      }
      std::vector<EmbeddedText> out;
      for (const auto& r : results) out.push_back(wire::ParseEmbedded(r));
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable, std::string("bad embed response: ") + e.what());
    }
  }

  ConditionalLogProbs LogProb(const std::string& source, const std::string& target,
                              const std::string& model) const override {
    nlohmann::json resp =
        Post("/v1/logprob", {{"model", model}, {"source", source}, {"target", target}});
    try {
      CheckSnapshot(MetaFromJson(resp.at("meta")));
      return wire::ParseLogProbs(resp);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable, std::string("bad logprob response: ") + e.what());
    }
  }

  double RegressionScore(const std::string& sys, const std::string& ref,
                         const std::string& model) const override {
    nlohmann::json resp = Post("/v1/score", {{"model", model}, {"sys", sys}, {"ref", ref}});
    try {
      CheckSnapshot(MetaFromJson(resp.at("meta")));
      return resp.at("score").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable, std::string("bad score response: ") + e.what());
    }
  }

  SnapshotMeta Meta(const std::string& model, std::optional<int> layer) const override {
    httplib::Params params{{"model", model}};
    if (layer) params.emplace("layer", std::to_string(*layer));
    auto client = MakeClient();
    auto res = client.Get("/v1/meta", params, httplib::Headers{});
    nlohmann::json body = Check(res, "/v1/meta");
    try {
      SnapshotMeta meta = MetaFromJson(body);
      CheckSnapshot(meta);
      return meta;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable, std::string("bad meta response: ") + e.what());
    }
  }

 private:
  httplib::Client MakeClient() const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    return client;
  }

  nlohmann::json Post(const std::string& path, const nlohmann::json& body) const {
    auto client = MakeClient();
    auto res = client.Post(path, body.dump(), "application/json");
    return Check(res, path);
  }

  static nlohmann::json Check(const httplib::Result& res, const std::string& path) {
    if (!res) {
      throw Error(ErrorCode::kProviderUnavailable,
                  path + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 404) throw Error(ErrorCode::kUnknownModel, path + ": " + res->body);
    if (res->status == 422) throw Error(ErrorCode::kMalformedRequest, path + ": " + res->body);
    if (res->status != 200) {
      throw Error(ErrorCode::kProviderUnavailable,
                  path + ": HTTP " + std::to_string(res->status) + " " + res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderUnavailable, path + ": unparsable body: " + e.what());
    }
  }

  // All responses for one (model, layer) must come from a single revision.
  void CheckSnapshot(const SnapshotMeta& meta) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = seen_.emplace(meta.model, meta);
    if (!inserted && it->second.revision != meta.revision) {
      throw Error(ErrorCode::kSnapshotMismatch, "model " + meta.model + " switched from revision " +
                                                    it->second.revision + " to " + meta.revision);
    }
  }

  std::string base_url_;
  int timeout_seconds_;
  mutable std::mutex mu_;
  mutable std::map<std::string, SnapshotMeta> seen_;
};

}  // namespace metricfair

#endif  // METRICFAIR_HTTP_PROVIDER_HPP_

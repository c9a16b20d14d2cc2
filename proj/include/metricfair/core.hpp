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

// Shared domain types: texts, sensitive attributes, metric identities and
// scores, plus the error type every module throws.

#ifndef METRICFAIR_CORE_HPP_
#define METRICFAIR_CORE_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "metricfair/unicode.hpp"

namespace metricfair {

enum class ErrorCode {
  kEmptyText,
  kProviderUnavailable,
  kUnknownMetric,
  kUnknownModel,
  kFixtureMiss,
  kMalformedRequest,
  kSnapshotMismatch,
  kBadLexiconFile,
  kMissingInfoWeights,
  kDimensionMismatch,
  kSolverDiverged,
  kInfeasibleWeights,
  kEmptyCorpus,
  kDirectionMismatch,
  kDegenerateRange,
  kEmptySet,
  kSchemaError,
  kDuplicateId,
  kZeroVariance,
  kLengthMismatch,
  kConfigError,
  kIoError,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kUnknownMetric: return "UnknownMetric";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kFixtureMiss: return "FixtureMiss";
    case ErrorCode::kMalformedRequest: return "MalformedRequest";
    case ErrorCode::kSnapshotMismatch: return "SnapshotMismatch";
    case ErrorCode::kBadLexiconFile: return "BadLexiconFile";
    case ErrorCode::kMissingInfoWeights: return "MissingInfoWeights";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kInfeasibleWeights: return "InfeasibleWeights";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDirectionMismatch: return "DirectionMismatch";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

// All library failures surface as this exception; code() identifies the
// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix, for re-wrapping with context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

enum class SensitiveAttribute {
  kRace,
  kGender,
  kReligion,
  kPhysicalAppearance,
  kAge,
  kSocioeconomicStatus,
};

inline constexpr std::array<SensitiveAttribute, 6> kAllAttributes = {
    SensitiveAttribute::kRace,     SensitiveAttribute::kGender,
    SensitiveAttribute::kReligion, SensitiveAttribute::kPhysicalAppearance,
    SensitiveAttribute::kAge,      SensitiveAttribute::kSocioeconomicStatus,
};

// Wire names used by the paired-dataset format.
inline std::string_view AttributeName(SensitiveAttribute a) {
  switch (a) {
    case SensitiveAttribute::kRace: return "race";
    case SensitiveAttribute::kGender: return "gender";
    case SensitiveAttribute::kReligion: return "religion";
    case SensitiveAttribute::kPhysicalAppearance: return "physical_appearance";
    case SensitiveAttribute::kAge: return "age";
    case SensitiveAttribute::kSocioeconomicStatus: return "socioeconomic_status";
  }
  return "";
}

// Column headers of the bias table.
inline std::string_view AttributeShortName(SensitiveAttribute a) {
  switch (a) {
    case SensitiveAttribute::kRace: return "Race";
    case SensitiveAttribute::kGender: return "Gender";
    case SensitiveAttribute::kReligion: return "Religion";
    case SensitiveAttribute::kPhysicalAppearance: return "PA";
    case SensitiveAttribute::kAge: return "Age";
    case SensitiveAttribute::kSocioeconomicStatus: return "SS";
  }
  return "";
}

inline std::optional<SensitiveAttribute> ParseAttribute(std::string_view name) {
  for (SensitiveAttribute a : kAllAttributes) {
    if (AttributeName(a) == name) return a;
  }
  return std::nullopt;
}

enum class Paradigm { kNGram, kMatching, kRegression, kGeneration };

inline std::string_view ParadigmName(Paradigm p) {
  switch (p) {
    case Paradigm::kNGram: return "ngram";
    case Paradigm::kMatching: return "matching";
    case Paradigm::kRegression: return "regression";
    case Paradigm::kGeneration: return "generation";
  }
  return "";
}

// Identifies one scoring configuration. Reports echo it verbatim.
struct MetricId {
  Paradigm paradigm = Paradigm::kNGram;
  std::string name;
  std::map<std::string, std::string> config;

  std::string Get(const std::string& key, const std::string& fallback = "") const {
    auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
  }

  // Canonical "name[k=v,...]" form; equal ids have equal keys.
  std::string Key() const {
    std::string out = std::string(ParadigmName(paradigm)) + "/" + name;
    if (!config.empty()) {
      out += "[";
      bool first = true;
      for (const auto& [k, v] : config) {
        if (!first) out += ",";
        out += k + "=" + v;
        first = false;
      }
      out += "]";
    }
    return out;
  }

  friend bool operator==(const MetricId&, const MetricId&) = default;
};

struct MetricScore {
  double value = 0.0;
  std::string metric_id;
  // Per-call metadata, e.g. which transport solver ran.
  std::map<std::string, std::string> notes;
};

inline MetricScore MakeScore(double value, const MetricId& metric) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kConfigError,
                "metric " + metric.Key() + " produced a non-finite score");
  }
  return MetricScore{value, metric.Key(), {}};
}

// A piece of text in NFC form, with optional tokens filled by a tokenizer or
// a model provider.
class TextUnit {
 public:
  TextUnit() = default;
  explicit TextUnit(std::string_view raw) : raw_(NormalizeNfc(raw)) {}
  TextUnit(std::string_view raw, std::vector<std::string> tokens)
      : raw_(NormalizeNfc(raw)) {
    SetTokens(std::move(tokens));
  }

  const std::string& raw() const { return raw_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool has_tokens() const { return tokens_set_; }
  bool blank() const { return !HasNonSpace(raw_); }

  void SetTokens(std::vector<std::string> tokens) {
    if (tokens.empty() != blank()) {
      throw Error(ErrorCode::kSchemaError,
                  "token list must be empty exactly when the text is blank: '" +
                      raw_ + "'");
    }
    tokens_ = std::move(tokens);
    tokens_set_ = true;
  }

 private:
  std::string raw_;
  std::vector<std::string> tokens_;
  bool tokens_set_ = false;
};

struct PairedExample {
  std::string id;
  SensitiveAttribute attribute = SensitiveAttribute::kGender;
  TextUnit reference;
  TextUnit sys_stereo;
  TextUnit sys_anti;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn&& fn) {
  std::size_t workers = jobs <= 0 ? std::max(1u, std::thread::hardware_concurrency())
                                  : static_cast<std::size_t>(jobs);
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load()) {
          std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace metricfair

#endif  // METRICFAIR_CORE_HPP_

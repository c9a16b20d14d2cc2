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


// Generation-paradigm scores from conditional token log-probabilities.
// Precision conditions the candidate on the reference, recall the reference
// on the candidate; F is their arithmetic mean.

#ifndef METRICFAIR_GENERATION_HPP_
#define METRICFAIR_GENERATION_HPP_

#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "metricfair/core.hpp"

namespace metricfair {

struct ConditionalLogProbs {
  std::string source;
  std::string target;
  std::vector<std::string> target_tokens;
  std::vector<double> logprobs;

  void Validate() const {
    if (target_tokens.empty() || target_tokens.size() != logprobs.size()) {
      throw Error(ErrorCode::kSchemaError,
                  "log-prob record needs one log-prob per target token (>= 1)");
    }
    for (double lp : logprobs) {
      if (!std::isfinite(lp) || lp > 0.0) {
        throw Error(ErrorCode::kSchemaError, "log-probs must be finite and <= 0");
      }
    }
  }

  double MeanLogProb() const {
    Validate();
    return std::accumulate(logprobs.begin(), logprobs.end(), 0.0) /
           static_cast<double>(logprobs.size());
  }
};

enum class Direction { kPrecision, kRecall, kF };

inline std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kPrecision: return "precision";
    case Direction::kRecall: return "recall";
    case Direction::kF: return "f";
  }
  return "";
}

inline std::optional<Direction> ParseDirection(std::string_view s) {
  if (s == "precision") return Direction::kPrecision;
  if (s == "recall") return Direction::kRecall;
  if (s == "f") return Direction::kF;
  return std::nullopt;
}

// Mean log p(sys | ref). The record must run ref -> sys.
inline double GenPrecision(const ConditionalLogProbs& clp, std::string_view sys,
                           std::string_view ref) {
  if (clp.source != ref || clp.target != sys) {
    throw Error(ErrorCode::kDirectionMismatch, "precision needs a ref -> sys record");
  }
  return clp.MeanLogProb();
}

// Mean log p(ref | sys). The record must run sys -> ref.
inline double GenRecall(const ConditionalLogProbs& clp, std::string_view sys,
                        std::string_view ref) {
  if (clp.source != sys || clp.target != ref) {
    throw Error(ErrorCode::kDirectionMismatch, "recall needs a sys -> ref record");
  }
  return clp.MeanLogProb();
}

inline double GenFScore(double precision, double recall) { return (precision + recall) / 2.0; }

}  // namespace metricfair

#endif  // METRICFAIR_GENERATION_HPP_

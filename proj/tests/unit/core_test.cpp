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


#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "metricfair/core.hpp"

namespace metricfair {
namespace {

TEST(TextUnitTest, NormalizesToNfc) {
  // "e" + combining acute vs precomposed
  TextUnit decomposed("caf\x65\xCC\x81");
  TextUnit composed("caf\xC3\xA9");
  EXPECT_EQ(decomposed.raw(), composed.raw());
}

TEST(TextUnitTest, TokensMustBeEmptyExactlyWhenBlank) {
  EXPECT_THROW(TextUnit("hello", {}), Error);
  EXPECT_THROW(TextUnit("   ", {"x"}), Error);
  EXPECT_NO_THROW(TextUnit("  ", {}));
  TextUnit t("hello world", {"hello", "world"});
  EXPECT_TRUE(t.has_tokens());
  EXPECT_FALSE(t.blank());
}

TEST(CaseMappingTest, HandlesNonAscii) {
  EXPECT_EQ(ToLower("\xC3\x84rger"), "\xC3\xA4rger");
  EXPECT_EQ(ToUpper("stra\xC3\x9F" "e"), "STRASSE");
}

TEST(MetricIdTest, KeyListsConfigInOrder) {
  MetricId id{Paradigm::kMatching, "bertscore", {{"model", "m"}, {"idf", "on"}}};
  EXPECT_EQ(id.Key(), "matching/bertscore[idf=on,model=m]");
  EXPECT_EQ(id.Get("idf"), "on");
  EXPECT_EQ(id.Get("missing"), "");
  MetricId plain{Paradigm::kNGram, "bleu", {}};
  EXPECT_EQ(plain.Key(), "ngram/bleu");
}

TEST(MetricScoreTest, RejectsNonFinite) {
  MetricId id{Paradigm::kNGram, "bleu", {}};
  EXPECT_THROW(MakeScore(std::nan(""), id), Error);
  EXPECT_EQ(MakeScore(0.5, id).value, 0.5);
}

TEST(AttributeTest, NamesRoundTrip) {
  for (SensitiveAttribute a : kAllAttributes) {
    EXPECT_EQ(ParseAttribute(std::string(AttributeName(a))), a);
  }
  EXPECT_FALSE(ParseAttribute("height").has_value());
}

TEST(ErrorTest, CarriesCodeAndMessage) {
  Error e(ErrorCode::kFixtureMiss, "no such text");
  EXPECT_EQ(e.code(), ErrorCode::kFixtureMiss);
  EXPECT_STREQ(e.what(), "FixtureMiss: no such text");
  EXPECT_EQ(e.message(), "no such text");
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  ParallelFor(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelForTest, RethrowsWorkerFailure) {
  EXPECT_THROW(ParallelFor(100, 4,
                           [](std::size_t i) {
                             if (i == 37) throw Error(ErrorCode::kEmptyText, "37");
                           }),
               Error);
}

}  // namespace
}  // namespace metricfair

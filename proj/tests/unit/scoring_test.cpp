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


#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "metricfair/scoring.hpp"

namespace metricfair {
namespace {

std::shared_ptr<const ModelProvider> Tiny() {
  static auto p = std::make_shared<FixtureProvider>(FixtureProvider::LoadDirectory(METRICFAIR_FIXTURE_DIR));
  return p;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

const TextUnit kSys("the cat sat on the mat");
const TextUnit kRef("a cat sat on a mat");

TEST(MakeMetricIdTest, FillsDefaultsAndValidates) {
  MetricId b = MakeMetricId("bertscore", {{"model", "tiny-enc"}});
  EXPECT_EQ(b.Get("idf"), "off");
  EXPECT_EQ(b.Get("variant"), "f");
  EXPECT_EQ(b.paradigm, Paradigm::kMatching);
  EXPECT_EQ(MakeMetricId("bartscore", {{"model", "m"}}).Get("direction"), "f");
  EXPECT_EQ(CodeOf([] { MakeMetricId("bleurt2"); }), ErrorCode::kUnknownMetric);
  EXPECT_EQ(CodeOf([] { MakeMetricId("bertscore"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { MakeMetricId("bleu", {{"model", "x"}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { MakeMetricId("prism", {{"model", "x"}, {"direction", "up"}}); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { MakeMetricId("moverscore", {{"model", "x"}, {"idf", "off"}}); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { MakeMetricId("bertscore", {{"model", "x"}, {"layer", "top"}}); }),
            ErrorCode::kConfigError);
}

TEST(MetricScorerTest, NGramMetricsUseSurfaceTokens) {
  MetricScorer bleu(MakeMetricId("bleu"), {});
  EXPECT_DOUBLE_EQ(bleu.Score(kSys, kRef).value,
                   Bleu(TokenizeSurface(kSys.raw()), TokenizeSurface(kRef.raw())));
  MetricScorer rouge_p(MakeMetricId("rouge1", {{"variant", "p"}}), {});
  EXPECT_DOUBLE_EQ(rouge_p.Score(kSys, kRef).value, 4.0 / 6.0);
  // Pre-set tokens win over the built-in tokenizer.
  TextUnit tokenized("THE CAT", {"the", "cat"});
  EXPECT_DOUBLE_EQ(bleu.Score(tokenized, TextUnit("the cat")).value, 1.0);
}

TEST(MetricScorerTest, NistNeedsReferenceCorpus) {
  EXPECT_EQ(CodeOf([] { MetricScorer(MakeMetricId("nist"), {}).Score(kSys, kRef); }),
            ErrorCode::kMissingInfoWeights);
  MetricScorer nist(MakeMetricId("nist"), {nullptr, {kRef}});
  EXPECT_GT(nist.Score(kSys, kRef).value, 0.0);
}

TEST(MetricScorerTest, BertScoreGoesThroughProvider) {
  MetricScorer scorer(MakeMetricId("bertscore", {{"model", "tiny-enc"}}), {Tiny(), {}});
  std::vector<std::string> texts = {kSys.raw(), kRef.raw()};
  auto e = Tiny()->Embed(texts, "tiny-enc", std::nullopt);
  EXPECT_DOUBLE_EQ(scorer.Score(kSys, kRef).value, BertScore(e[0], e[1]).f);
  EXPECT_DOUBLE_EQ(scorer.Score(kSys, kSys).value, 1.0);
  ASSERT_EQ(scorer.provider_meta().size(), 1u);
  EXPECT_EQ(scorer.provider_meta()[0].revision, "tiny-r1");
}

TEST(MetricScorerTest, IdfTableComesFromProviderTokens) {
  MetricScorer scorer(MakeMetricId("bertscore", {{"model", "tiny-enc"}, {"idf", "on"}}),
                      {Tiny(), {kRef, TextUnit("the dog barked")}});
  ASSERT_TRUE(scorer.idf().has_value());
  EXPECT_NEAR(scorer.idf()->Get("cat"), std::log(3.0 / 2.0), 1e-15);
  EXPECT_NEAR(scorer.idf()->Get("unseen"), std::log(3.0), 1e-15);
}

TEST(MetricScorerTest, MoverScoreRecordsSolver) {
  MetricScorer scorer(MakeMetricId("moverscore", {{"model", "tiny-enc"}}), {Tiny(), {kRef}});
  MetricScore s = scorer.Score(kSys, kRef);
  EXPECT_LT(s.value, 0.0);
  EXPECT_EQ(s.notes.at("solver"), "exact");
  EXPECT_EQ(CodeOf([] { MetricScorer(MakeMetricId("moverscore", {{"model", "tiny-enc"}}), {Tiny(), {}}); }),
            ErrorCode::kEmptyCorpus);
}

TEST(MetricScorerTest, GenerationDirections) {
  auto make = [](const char* dir) {
    return MetricScorer(MakeMetricId("bartscore", {{"model", "tiny-gen"}, {"direction", dir}}),
                        {Tiny(), {}});
  };
  double p = make("precision").Score(kSys, kRef).value;
  double r = make("recall").Score(kSys, kRef).value;
  double f = make("f").Score(kSys, kRef).value;
  EXPECT_DOUBLE_EQ(p, Tiny()->LogProb(kRef.raw(), kSys.raw(), "tiny-gen").MeanLogProb());
  EXPECT_DOUBLE_EQ(r, Tiny()->LogProb(kSys.raw(), kRef.raw(), "tiny-gen").MeanLogProb());
  EXPECT_DOUBLE_EQ(f, (p + r) / 2.0);
  EXPECT_NE(p, r);
}

TEST(MetricScorerTest, RegressionScoreIsOpaque) {
  MetricScorer scorer(MakeMetricId("bleurt", {{"model", "tiny-reg"}}), {Tiny(), {}});
  EXPECT_DOUBLE_EQ(scorer.Score(kSys, kRef).value,
                   Tiny()->RegressionScore(kSys.raw(), kRef.raw(), "tiny-reg"));
}

TEST(MetricScorerTest, IdentityScoresHighest) {
  std::vector<TextUnit> texts;
  for (const char* file : {"/candidates.txt", "/references.txt"}) {
    std::ifstream in(std::string(METRICFAIR_TEST_DATA_DIR) + file);
    for (std::string line; std::getline(in, line);) texts.emplace_back(line);
  }
  ASSERT_EQ(texts.size(), 8u);
  for (const std::string name : {"bleu", "rouge1", "meteor", "nist", "chrf", "bertscore", "moverscore"}) {
    std::map<std::string, std::string> config;
    if (name == "bertscore" || name == "moverscore") config["model"] = "tiny-enc";
    MetricScorer scorer(MakeMetricId(name, config), {Tiny(), texts});
    for (const auto& x : texts) {
      double self = scorer.Score(x, x).value;
      for (const auto& y : texts) {
        EXPECT_GE(self + 1e-12, scorer.Score(y, x).value) << name << ": " << y.raw() << " | " << x.raw();
      }
    }
  }
}

TEST(MetricScorerTest, ErrorPaths) {
  EXPECT_EQ(CodeOf([] { MetricScorer(MakeMetricId("bertscore", {{"model", "tiny-enc"}}), {}); }),
            ErrorCode::kProviderUnavailable);
  EXPECT_EQ(CodeOf([] { MetricScorer(MakeMetricId("bertscore", {{"model", "huge"}}), {Tiny(), {}}); }),
            ErrorCode::kUnknownModel);
  MetricScorer bleu(MakeMetricId("bleu"), {});
  EXPECT_EQ(CodeOf([&] { bleu.Score(TextUnit(" "), kRef); }), ErrorCode::kEmptyText);
  MetricScorer bert(MakeMetricId("bertscore", {{"model", "tiny-enc"}}), {Tiny(), {}});
  EXPECT_EQ(CodeOf([&] { bert.Score(TextUnit("unseen text"), kRef); }), ErrorCode::kFixtureMiss);
}

}  // namespace
}  // namespace metricfair

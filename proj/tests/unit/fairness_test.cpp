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


#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "metricfair/fairness.hpp"

namespace metricfair {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

ScoredPairSet Pairs(std::vector<std::pair<double, double>> rows) {
  ScoredPairSet set{MetricId{Paradigm::kNGram, "bleu", {}}, SensitiveAttribute::kGender, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    set.rows.push_back({"p" + std::to_string(i), rows[i].first, rows[i].second});
  }
  return set;
}

TEST(BiasTest, HandComputedThreePairs) {
  // Range [0, 1]; rescaled rows (0, 50), (50, 50), (100, 25).
  BiasReport r = MakeBiasReport(Pairs({{0.0, 0.5}, {0.5, 0.5}, {1.0, 0.25}}));
  EXPECT_EQ(r.n_pairs, 3);
  EXPECT_EQ(r.bias_abs, 125.0 / 3.0);
  EXPECT_EQ(r.bias_stereo, 25.0 / 3.0);
  EXPECT_EQ(r.s_min, 0.0);
  EXPECT_EQ(r.s_max, 1.0);
}

TEST(BiasTest, RangeSpansBothCandidates) {
  // The minimum only occurs on the anti side.
  BiasReport r = MakeBiasReport(Pairs({{0.5, 0.0}, {1.0, 0.5}}));
  EXPECT_EQ(r.s_min, 0.0);
  EXPECT_EQ(r.bias_abs, 50.0);
  EXPECT_EQ(r.bias_stereo, 50.0);
}

TEST(BiasTest, EqualCandidatesHaveNoBias) {
  BiasReport r = MakeBiasReport(Pairs({{0.1, 0.1}, {0.7, 0.7}, {0.3, 0.3}}));
  EXPECT_EQ(r.bias_abs, 0.0);
  EXPECT_EQ(r.bias_stereo, 0.0);
}

TEST(BiasTest, BalancedPreferenceCancelsInStereotypicalDifference) {
  BiasReport r = MakeBiasReport(Pairs({{0.5, 0.25}, {0.25, 0.5}, {1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_EQ(r.bias_abs, 62.5);
  EXPECT_EQ(r.bias_stereo, 0.0);
}

TEST(BiasTest, DegenerateRangeThrows) {
  EXPECT_EQ(CodeOf([] { MakeBiasReport(Pairs({{0.4, 0.4}, {0.4, 0.4}})); }),
            ErrorCode::kDegenerateRange);
  EXPECT_EQ(CodeOf([] { MakeBiasReport(Pairs({})); }), ErrorCode::kEmptySet);
}

TEST(NormalizeTest, MapsOntoZeroToHundred) {
  std::vector<double> s = {2.0, 4.0, 3.0};
  EXPECT_EQ(Normalize(s), (std::vector<double>{0.0, 100.0, 50.0}));
}

// Scores on a dyadic grid and dyadic a, b keep every operation exact.
TEST(BiasPropertyTest, AffineInvarianceIsExactOnDyadicScores) {
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<int> grid(0, 1 << 20), scale(1, 1 << 8), shift(-(1 << 20), 1 << 20);
  std::uniform_int_distribution<int> size(2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> rows(static_cast<std::size_t>(size(rng)));
    for (auto& [s, a] : rows) {
      s = std::ldexp(grid(rng), -10);
      a = std::ldexp(grid(rng), -10);
    }
    double a = std::ldexp(scale(rng), -4);
    double b = std::ldexp(shift(rng), -6);
    auto moved = rows;
    for (auto& [s, t] : moved) {
      s = a * s + b;
      t = a * t + b;
    }
    BiasReport x = MakeBiasReport(Pairs(rows));
    BiasReport y = MakeBiasReport(Pairs(moved));
    EXPECT_EQ(x.bias_abs, y.bias_abs);
    EXPECT_EQ(x.bias_stereo, y.bias_stereo);
    EXPECT_EQ(x.n_pairs, y.n_pairs);
    EXPECT_EQ(y.s_min, a * x.s_min + b);
    EXPECT_EQ(y.s_max, a * x.s_max + b);
  }
}

TEST(BiasPropertyTest, AffineInvarianceHoldsForArbitraryScores) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0), scale(0.01, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> rows(8);
    for (auto& [s, t] : rows) {
      s = u(rng);
      t = u(rng);
    }
    double a = scale(rng), b = u(rng) * 100;
    auto moved = rows;
    for (auto& [s, t] : moved) {
      s = a * s + b;
      t = a * t + b;
    }
    EXPECT_NEAR(BiasAbs(Pairs(rows)), BiasAbs(Pairs(moved)), 1e-9);
    EXPECT_NEAR(BiasStereotypical(Pairs(rows)), BiasStereotypical(Pairs(moved)), 1e-9);
  }
}

TEST(BiasPropertyTest, StereotypicalNeverExceedsAbsolute) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<double, double>> rows(1 + trial % 9);
    for (auto& [s, t] : rows) {
      s = u(rng);
      t = u(rng);
    }
    if (rows.size() == 1 && rows[0].first == rows[0].second) continue;
    BiasReport r = MakeBiasReport(Pairs(rows));
    EXPECT_LE(std::abs(r.bias_stereo), r.bias_abs);
    // Continuous draws never tie, so some pair always differs.
    EXPECT_GT(r.bias_abs, 0.0);
    EXPECT_GE(r.bias_abs, 0.0);
    EXPECT_LE(r.bias_abs, 100.0);
  }
}

TEST(BiasPropertyTest, RowOrderDoesNotMatter) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, double>> rows(15);
    for (auto& [s, t] : rows) {
      s = u(rng);
      t = u(rng);
    }
    BiasReport x = MakeBiasReport(Pairs(rows));
    std::shuffle(rows.begin(), rows.end(), rng);
    BiasReport y = MakeBiasReport(Pairs(rows));
    EXPECT_EQ(x.bias_abs, y.bias_abs);
    EXPECT_EQ(x.bias_stereo, y.bias_stereo);
  }
}

// Looks scores up by (sys, ref) text.
class TableScorer : public Scorer {
 public:
  explicit TableScorer(std::map<std::pair<std::string, std::string>, double> table)
      : table_(std::move(table)) {}
  const MetricId& id() const override { return id_; }
  MetricScore Score(const TextUnit& sys, const TextUnit& ref) const override {
    auto it = table_.find({sys.raw(), ref.raw()});
    if (it == table_.end()) throw Error(ErrorCode::kFixtureMiss, sys.raw());
    return MakeScore(it->second, id_);
  }

 private:
  MetricId id_{Paradigm::kRegression, "table", {}};
  std::map<std::pair<std::string, std::string>, double> table_;
};

TEST(LossTest, SquaredDifferences) {
  TableScorer m({{{"he ran", "they ran"}, 0.75}, {{"she ran", "they ran"}, 0.25}});
  TextUnit c1("he ran"), c2("she ran"), r("they ran");
  EXPECT_EQ(DebiasLoss(m, c1, c2, r), 0.25);
  EXPECT_EQ(DebiasLoss(m, c2, c1, r), 0.25);
  TableScorer teacher({{{"he ran", "they ran"}, 0.5}});
  EXPECT_EQ(KdLoss(m, teacher, c1, r), 0.0625);
  EXPECT_EQ(DebiasLoss(m, c1, c1, r), 0.0);
}

PairedExample Example(std::string id, SensitiveAttribute attr, std::string ref, std::string s,
                      std::string a) {
  return {std::move(id), attr, TextUnit(ref), TextUnit(s), TextUnit(a)};
}

TEST(AuditTest, ScoresBothCandidatesAgainstReference) {
  TableScorer m({{{"he ran", "they ran"}, 1.0},
                 {{"she ran", "they ran"}, 0.0},
                 {{"he sat", "they sat"}, 0.5},
                 {{"she sat", "they sat"}, 0.5}});
  std::vector<PairedExample> data = {
      Example("1", SensitiveAttribute::kGender, "they ran", "he ran", "she ran"),
      Example("2", SensitiveAttribute::kGender, "they sat", "he sat", "she sat")};
  BiasReport r = Audit(data, m, 2);
  EXPECT_EQ(r.bias_abs, 50.0);
  EXPECT_EQ(r.bias_stereo, 50.0);
}

TEST(AuditTest, FailuresNameTheExample) {
  TableScorer m({});
  std::vector<PairedExample> data = {
      Example("ex-42", SensitiveAttribute::kGender, "they ran", "he ran", "she ran")};
  try {
    Audit(data, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMiss);
    EXPECT_NE(std::string(e.what()).find("ex-42"), std::string::npos);
  }
  data.push_back(Example("2", SensitiveAttribute::kRace, "a", "b", "c"));
  EXPECT_EQ(CodeOf([&] { ScorePairs(data, m); }), ErrorCode::kSchemaError);
}

TEST(DatasetTest, ParsesRecords) {
  std::istringstream in(
      R"({"id":"1","attribute":"Physical Appearance","reference":"r","sys_stereo":"s","sys_anti":"a"})"
      "\n\n"
      R"({"id":"2","attribute":"ss","reference":"r","sys_stereo":"s","sys_anti":"a"})"
      "\n");
  auto data = ParsePairedDataset(in, "mem");
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].attribute, SensitiveAttribute::kPhysicalAppearance);
  EXPECT_EQ(data[1].attribute, SensitiveAttribute::kSocioeconomicStatus);
}

TEST(DatasetTest, SchemaErrorsNameLineAndField) {
  std::istringstream in(
      R"({"id":"1","attribute":"gender","reference":"r","sys_stereo":"s","sys_anti":"a"})"
      "\n"
      R"({"id":"2","attribute":"gender","reference":"r","sys_stereo":"s"})"
      "\n");
  try {
    ParsePairedDataset(in, "mem");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
    EXPECT_NE(std::string(e.what()).find("mem:2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("sys_anti"), std::string::npos);
  }
}

TEST(DatasetTest, RejectsDuplicatesEmptyAndStrictEquality) {
  const std::string rec =
      R"({"id":"1","attribute":"gender","reference":"r","sys_stereo":"s","sys_anti":"s"})";
  std::istringstream dup(rec + "\n" + rec + "\n");
  EXPECT_EQ(CodeOf([&] { ParsePairedDataset(dup, "mem"); }), ErrorCode::kDuplicateId);
  std::istringstream empty("\n");
  EXPECT_EQ(CodeOf([&] { ParsePairedDataset(empty, "mem"); }), ErrorCode::kSchemaError);
  std::istringstream strict(rec + "\n");
  EXPECT_EQ(CodeOf([&] { ParsePairedDataset(strict, "mem", {.strict = true}); }),
            ErrorCode::kSchemaError);
  std::istringstream lenient(rec + "\n");
  EXPECT_EQ(ParsePairedDataset(lenient, "mem").size(), 1u);
}

TEST(RenderTest, BiasTableHasAttributeColumns) {
  BiasReport race{MetricId{Paradigm::kNGram, "bleu", {}}, SensitiveAttribute::kRace, 3, 1.0, 0.5, 0, 1, {}};
  BiasReport gender = race;
  gender.attribute = SensitiveAttribute::kGender;
  gender.bias_abs = 3.0;
  std::vector<BiasReport> reports = {race, gender};
  std::string table = RenderBiasTable(reports);
  EXPECT_NE(table.find("| Metric | Race | Gender | Religion | PA | Age | SS | Avg. |"), std::string::npos);
  EXPECT_NE(table.find("| ngram/bleu | 1.00 | 3.00 | - | - | - | - | 2.00 |"), std::string::npos);
  std::string stereo = RenderStereotypeTable(reports);
  EXPECT_NE(stereo.find("| ngram/bleu | Race | 1.00 | 0.50 | 0.50 |"), std::string::npos);
}

TEST(RenderTest, JsonCarriesProviderMeta) {
  BiasReport r{MetricId{Paradigm::kMatching, "bertscore", {{"model", "m"}}},
               SensitiveAttribute::kAge, 2, 10.0, -4.0, 0.1, 0.9,
               {SnapshotMeta{"m", "rev", 3, ""}}};
  nlohmann::json j = BiasReportToJson(r);
  EXPECT_EQ(j["attribute"], "age");
  EXPECT_EQ(j["bias_stereo_abs"], 4.0);
  EXPECT_EQ(j["provider_meta"][0]["revision"], "rev");
  EXPECT_EQ(j["metric"]["key"], "matching/bertscore[model=m]");
}

}  // namespace
}  // namespace metricfair

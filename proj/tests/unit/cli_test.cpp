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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "metricfair/cli.hpp"

namespace metricfair {
namespace {

const std::string kData = METRICFAIR_TEST_DATA_DIR;
const std::string kFixtures = METRICFAIR_FIXTURE_DIR;
const std::string kLexicons = std::string(METRICFAIR_SOURCE_DIR) + "/data/lexicons";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string TempFile(const std::string& name, const std::string& content) {
  std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << content;
  return path;
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(CliScoreTest, OneScorePerLine) {
  Result r = Cli({"score", "--metric", "bleu", "--candidates", kData + "/candidates.txt",
                  "--references", kData + "/references.txt", "--format", "markdown"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(std::stod(lines[0]), 1.0);
  EXPECT_EQ(std::stod(lines[1]), 0.0);

  Result j = Cli({"score", "--metric", "rouge1", "--variant", "p", "--candidates",
                  kData + "/candidates.txt", "--references", kData + "/references.txt"});
  ASSERT_EQ(j.code, 0) << j.err;
  auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["metric"]["key"], "ngram/rouge1[variant=p]");
  EXPECT_EQ(doc["scores"].size(), 4u);
  EXPECT_EQ(doc["scores"][0]["line"], 1);
}

TEST(CliScoreTest, GenerationDirectionFromFlag) {
  std::vector<std::string> base = {"score", "--metric", "bartscore", "--fixtures", kFixtures,
                                   "--model", "tiny-gen", "--candidates",
                                   kData + "/candidates.txt", "--references",
                                   kData + "/references.txt", "--format", "markdown"};
  auto run = [&](const std::string& dir) {
    auto args = base;
    args.insert(args.end(), {"--direction", dir});
    Result r = Cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    std::vector<double> v;
    for (const auto& l : Lines(r.out)) v.push_back(std::stod(l));
    return v;
  };
  auto p = run("precision"), rc = run("recall"), f = run("f");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_NE(p, rc);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_DOUBLE_EQ(f[i], (p[i] + rc[i]) / 2);
}

TEST(CliScoreTest, UsageErrors) {
  EXPECT_EQ(Cli({"score", "--metric", "bleu", "--candidates", kData + "/candidates.txt",
                 "--references", kData + "/references_short.txt"})
                .code,
            2);
  EXPECT_EQ(Cli({"score", "--metric", "bleu9", "--candidates", kData + "/candidates.txt",
                 "--references", kData + "/references.txt"})
                .code,
            2);
  EXPECT_EQ(Cli({"score", "--metric", "bleu", "--metric", "nist", "--candidates",
                 kData + "/candidates.txt", "--references", kData + "/references.txt"})
                .code,
            2);
  EXPECT_EQ(Cli({"score", "--metric", "bleu", "--model", "tiny-enc", "--candidates",
                 kData + "/candidates.txt", "--references", kData + "/references.txt"})
                .code,
            2);
  EXPECT_EQ(Cli({"score", "--metric", "bertscore", "--model", "tiny-enc", "--fixtures",
                 kFixtures, "--provider-url", "http://127.0.0.1:9", "--candidates",
                 kData + "/candidates.txt", "--references", kData + "/references.txt"})
                .code,
            2);
  EXPECT_EQ(Cli({"score", "--metric", "bleu", "--candidates", kData + "/candidates.txt",
                 "--references", kData + "/references.txt", "--format", "xml"})
                .code,
            2);
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST(CliScoreTest, ProviderFailuresAreRuntimeErrors) {
  Result r = Cli({"score", "--metric", "bertscore", "--model", "tiny-enc", "--provider-url",
                  "http://127.0.0.1:9", "--candidates", kData + "/candidates.txt",
                  "--references", kData + "/references.txt"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ProviderUnavailable"), std::string::npos);
}

TEST(CliAuditTest, MatchesLibraryAudit) {
  Result r = Cli({"audit", "--metric", "bertscore", "--metric", "bleu", "--model", "tiny-enc",
                  "--fixtures", kFixtures, "--dataset", kData + "/gender_pairs.jsonl",
                  "--deterministic"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["reports"].size(), 2u);
  EXPECT_FALSE(doc.contains("generated_at"));

  auto data = LoadPairedDataset(kData + "/gender_pairs.jsonl");
  std::vector<TextUnit> refs;
  for (const auto& ex : data) refs.push_back(ex.reference);
  auto provider = std::make_shared<FixtureProvider>(FixtureProvider::LoadDirectory(kFixtures));
  MetricScorer bert(MakeMetricId("bertscore", {{"model", "tiny-enc"}}), {provider, refs});
  BiasReport expected = Audit(data, bert);
  const auto& got = doc["reports"][0];
  EXPECT_EQ(got["metric"]["name"], "bertscore");
  EXPECT_EQ(got["bias_abs"].get<double>(), expected.bias_abs);
  EXPECT_EQ(got["bias_stereo"].get<double>(), expected.bias_stereo);
  EXPECT_EQ(got["n_pairs"], 6);
}

TEST(CliAuditTest, MarkdownTablesAndTimestamps) {
  Result r = Cli({"audit", "--metric", "bleu", "--dataset", kData + "/mixed_pairs.jsonl",
                  "--format", "markdown"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| Metric | Race | Gender | Religion | PA | Age | SS | Avg. |"),
            std::string::npos);
  EXPECT_NE(r.out.find("Stereotypical Diff."), std::string::npos);
  Result j = Cli({"audit", "--metric", "bleu", "--dataset", kData + "/mixed_pairs.jsonl"});
  EXPECT_TRUE(nlohmann::json::parse(j.out).contains("generated_at"));
}

TEST(CliAuditTest, EqualCandidatesGiveZero) {
  Result r = Cli({"audit", "--metric", "bertscore", "--model", "tiny-enc", "--fixtures",
                  kFixtures, "--dataset", kData + "/equal_pairs.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rep = nlohmann::json::parse(r.out)["reports"][0];
  EXPECT_EQ(rep["bias_abs"], 0.0);
  EXPECT_EQ(rep["bias_stereo"], 0.0);
}

TEST(CliAuditTest, DegenerateRangeAndBadDataset) {
  std::string one = TempFile(
      "one_pair.jsonl",
      R"({"id":"1","attribute":"gender","reference":"a b","sys_stereo":"a b","sys_anti":"a b"})"
      "\n");
  Result r = Cli({"audit", "--metric", "bleu", "--dataset", one});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("DegenerateRange"), std::string::npos);
  std::string bad = TempFile("bad_pairs.jsonl", "{\"id\":\"1\"}\n");
  EXPECT_EQ(Cli({"audit", "--metric", "bleu", "--dataset", bad}).code, 2);
}

TEST(CliAuditTest, DeterministicOutputDoesNotDependOnJobs) {
  auto run = [](const std::string& jobs) {
    return Cli({"audit", "--metric", "moverscore", "--metric", "bertscore", "--model",
                "tiny-enc", "--fixtures", kFixtures, "--dataset", kData + "/mixed_pairs.jsonl",
                "--deterministic", "--jobs", jobs})
        .out;
  };
  std::string one = run("1");
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(one, run("4"));
  EXPECT_EQ(one, run("0"));
}

TEST(CliCdaTest, WritesTriples) {
  Result r = Cli({"cda", "--lexicon", kLexicons + "/gender.tsv", "--input",
                  kData + "/sentences.txt"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  auto first = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(first["c1"], "he needed help");
  EXPECT_EQ(first["c2"], "she needed help");
  EXPECT_EQ(first["r"], "the person needed help");
  EXPECT_EQ(nlohmann::json::parse(lines[3])["c2"], "SHE LEFT. He stayed.");
  auto stats = nlohmann::json::parse(r.err);
  EXPECT_EQ(stats["skipped"], 1);
  EXPECT_EQ(stats["pairs"], 4);
}

TEST(CliCdaTest, BadLexiconIsUsageError) {
  std::string lex = TempFile("bad.tsv", "swap\the\n");
  Result r = Cli({"cda", "--lexicon", lex, "--input", kData + "/sentences.txt"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.tsv:1"), std::string::npos);
}

TEST(CliCorrelateTest, GroupsAndErrors) {
  Result r = Cli({"correlate", "--metric", "chrf", "--input", kData + "/judged.tsv", "--kind",
                  "spearman", "--deterministic"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out)["correlations"][0];
  EXPECT_EQ(doc["kind"], "spearman");
  EXPECT_EQ(doc["groups"].size(), 2u);
  std::string flat = TempFile("flat.tsv", "a\tg\tx y\tx y\t1\nb\tg\tx z\tx y\t1\n");
  EXPECT_EQ(Cli({"correlate", "--metric", "bleu", "--input", flat}).code, 3);
  EXPECT_EQ(Cli({"correlate", "--metric", "bleu", "--input", kData + "/judged.tsv", "--kind",
                 "kendall"})
                .code,
            2);
}

TEST(CliMatchmapTest, IdenticalTextsAlignOnDiagonal) {
  Result r = Cli({"matchmap", "--fixtures", kFixtures, "--model", "tiny-enc", "--sys",
                  "the cat sat on the mat", "--ref", "the cat sat on the mat"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = nlohmann::json::parse(r.out);
  EXPECT_EQ(m["alignment"], nlohmann::json({0, 1, 2, 3, 4, 5}));
  Result ot = Cli({"matchmap", "--fixtures", kFixtures, "--model", "tiny-enc", "--sys",
                   "the cat sat on the mat", "--ref", "a cat sat on a mat", "--mode", "ot",
                   "--format", "markdown"});
  ASSERT_EQ(ot.code, 0) << ot.err;
  EXPECT_NE(ot.out.find("```"), std::string::npos);
  EXPECT_EQ(Cli({"matchmap", "--fixtures", kFixtures, "--sys", "a", "--ref", "b"}).code, 2);
  EXPECT_EQ(Cli({"matchmap", "--fixtures", kFixtures, "--model", "tiny-enc", "--sys", "a",
                 "--ref", "b", "--mode", "beam"})
                .code,
            2);
}

TEST(CliOutputTest, WritesToFile) {
  std::string path = ::testing::TempDir() + "/scores.json";
  Result r = Cli({"score", "--metric", "bleu", "--candidates", kData + "/candidates.txt",
                  "--references", kData + "/references.txt", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  EXPECT_EQ(nlohmann::json::parse(in)["scores"].size(), 4u);
}

}  // namespace
}  // namespace metricfair

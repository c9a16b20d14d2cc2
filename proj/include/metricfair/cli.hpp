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


// Command-line front end. Run() is the whole program minus process setup so
// it can be driven from tests. Exit codes: 0 success, 2 usage or
// configuration error, 3 failure while running.

#ifndef METRICFAIR_CLI_HPP_
#define METRICFAIR_CLI_HPP_

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "metricfair/cda.hpp"
#include "metricfair/core.hpp"
#include "metricfair/correlation.hpp"
#include "metricfair/fairness.hpp"
#include "metricfair/http_provider.hpp"
#include "metricfair/matching.hpp"
#include "metricfair/provider.hpp"
#include "metricfair/scoring.hpp"

namespace metricfair::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kProviderUrlEnv = "METRICFAIR_PROVIDER_URL";

// Errors raised while validating inputs, before any scoring starts.
struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::string> metrics;
  std::string provider_url;
  std::string fixtures;
  std::string model;
  std::optional<int> layer;
  std::string idf;
  std::string direction;
  std::string variant;
  std::string solver;
  std::string synonyms;
  std::string format = "json";
  std::string output;
  int jobs = 0;
  bool deterministic = false;

  // Paths and command-specific values.
  std::string candidates;
  std::string references;
  std::string dataset;
  std::vector<std::string> lexicons;
  std::string input;
  std::string kind = "pearson";
  std::string sys;
  std::string ref;
  std::string mode = "greedy";
};

namespace detail {

inline std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SetupError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Resolves --fixtures / --provider-url / environment into one provider.
// Returns nullptr when none is configured.
inline std::shared_ptr<const ModelProvider> MakeProvider(const RunConfig& cfg) {
  std::string url = cfg.provider_url;
  if (!cfg.fixtures.empty() && !url.empty()) {
    throw SetupError("--fixtures and --provider-url are mutually exclusive");
  }
  if (cfg.fixtures.empty() && url.empty()) {
    if (const char* env = std::getenv(kProviderUrlEnv); env != nullptr) url = env;
  }
  std::shared_ptr<const ModelProvider> inner;
  if (!cfg.fixtures.empty()) {
    inner = std::make_shared<FixtureProvider>(FixtureProvider::LoadDirectory(cfg.fixtures));
  } else if (!url.empty()) {
    inner = std::make_shared<HttpProvider>(url);
  } else {
    return nullptr;
  }
  return std::make_shared<CachingProvider>(inner);
}

// Applies the shared option flags to every metric that accepts them. A flag
// that no requested metric accepts is a usage error.
inline std::vector<MetricId> MakeMetricIds(const RunConfig& cfg) {
  if (cfg.metrics.empty()) throw SetupError("--metric is required");
  std::map<std::string, std::string> options;
  if (!cfg.model.empty()) options["model"] = cfg.model;
  if (cfg.layer) options["layer"] = std::to_string(*cfg.layer);
  if (!cfg.idf.empty()) options["idf"] = cfg.idf;
  if (!cfg.direction.empty()) options["direction"] = cfg.direction;
  if (!cfg.variant.empty()) options["variant"] = cfg.variant;
  if (!cfg.solver.empty()) options["solver"] = cfg.solver;
  if (!cfg.synonyms.empty()) options["synonyms"] = cfg.synonyms;
  std::set<std::string> used;
  std::vector<MetricId> ids;
  for (const auto& name : cfg.metrics) {
    auto entry = metricfair::detail::MetricTable().find(name);
    if (entry == metricfair::detail::MetricTable().end()) {
      throw Error(ErrorCode::kUnknownMetric, name);
    }
    std::map<std::string, std::string> config;
    for (const auto& [k, v] : options) {
      if (entry->second.allowed.count(k)) {
        config[k] = v;
        used.insert(k);
      }
    }
    ids.push_back(MakeMetricId(name, config));
  }
  for (const auto& [k, v] : options) {
    if (!used.count(k)) throw SetupError("no requested metric takes --" + k);
  }
  return ids;
}

inline std::vector<std::unique_ptr<MetricScorer>> MakeScorers(
    const RunConfig& cfg, const std::vector<TextUnit>& reference_corpus) {
  std::vector<MetricId> ids = MakeMetricIds(cfg);
  std::shared_ptr<const ModelProvider> provider = MakeProvider(cfg);
  std::vector<std::unique_ptr<MetricScorer>> out;
  for (auto& id : ids) {
    out.push_back(std::make_unique<MetricScorer>(std::move(id),
                                                 ScoringContext{provider, reference_corpus}));
  }
  return out;
}

inline void CheckFormat(const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "markdown") {
    throw SetupError("--format must be json or markdown");
  }
}

// Writes to --output when given, otherwise to out.
inline void Emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + cfg.output);
  f << text;
}

inline nlohmann::json Stamp(const RunConfig& cfg, nlohmann::json j) {
  if (!cfg.deterministic) j["generated_at"] = UtcTimestamp();
  return j;
}

inline int CmdScore(const RunConfig& cfg, std::ostream& out) {
  CheckFormat(cfg);
  if (cfg.metrics.size() != 1) throw SetupError("score takes exactly one --metric");
  if (cfg.candidates.empty() || cfg.references.empty()) {
    throw SetupError("score needs --candidates and --references");
  }
  std::vector<std::string> sys = ReadLines(cfg.candidates);
  std::vector<std::string> ref = ReadLines(cfg.references);
  if (sys.size() != ref.size()) {
    throw SetupError(cfg.candidates + " has " + std::to_string(sys.size()) + " lines but " +
                     cfg.references + " has " + std::to_string(ref.size()));
  }
  std::vector<TextUnit> refs;
  for (const auto& r : ref) {
    if (HasNonSpace(r)) refs.emplace_back(r);
  }
  auto scorers = MakeScorers(cfg, refs);
  const Scorer& scorer = *scorers.front();
  std::vector<MetricScore> scores(sys.size());
  ParallelFor(sys.size(), cfg.jobs, [&](std::size_t i) {
    try {
      scores[i] = scorer.Score(TextUnit(sys[i]), TextUnit(ref[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(i + 1) + ": " + e.message());
    }
  });
  std::string text;
  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      nlohmann::json row = {{"line", i + 1}, {"score", scores[i].value}};
      if (!scores[i].notes.empty()) row["notes"] = scores[i].notes;
      rows.push_back(row);
    }
    text = Stamp(cfg, {{"metric", MetricIdToJson(scorer.id())}, {"scores", rows}}).dump(2) + "\n";
  } else {
    char buf[64];
    for (const auto& s : scores) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", s.value);
      text += buf;
    }
  }
  Emit(cfg, out, text);
  return kExitOk;
}

inline int CmdAudit(const RunConfig& cfg, std::ostream& out) {
  CheckFormat(cfg);
  if (cfg.dataset.empty()) throw SetupError("audit needs --dataset");
  std::vector<PairedExample> dataset;
  try {
    dataset = LoadPairedDataset(cfg.dataset);
  } catch (const Error& e) {
    throw SetupError(e.what());
  }
  std::vector<TextUnit> refs;
  std::set<std::string> seen;
  for (const auto& ex : dataset) {
    if (seen.insert(ex.reference.raw()).second) refs.push_back(ex.reference);
  }
  auto scorers = MakeScorers(cfg, refs);
  auto groups = GroupByAttribute(std::move(dataset));
  std::vector<BiasReport> reports;
  for (const auto& scorer : scorers) {
    for (const auto& [attribute, examples] : groups) {
      reports.push_back(Audit(examples, *scorer, cfg.jobs));
    }
  }
  std::string text;
  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(BiasReportToJson(r));
    text = Stamp(cfg, {{"dataset", cfg.dataset}, {"reports", arr}}).dump(2) + "\n";
  } else {
    text = RenderBiasTable(reports) + "\n" + RenderStereotypeTable(reports);
  }
  Emit(cfg, out, text);
  return kExitOk;
}

inline int CmdCda(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.lexicons.empty()) throw SetupError("cda needs --lexicon");
  if (cfg.input.empty()) throw SetupError("cda needs --input");
  TermLexicon lex;
  try {
    for (const auto& path : cfg.lexicons) {
      TermLexicon part = TermLexicon::Load(path);
      for (const auto& [a, b] : part.swap_pairs()) lex.AddSwap(a, b);
      for (const auto& [a, b] : part.name_pairs()) lex.AddSwap(a, b, true);
      for (const auto& [t, n] : part.neutral_map()) lex.AddNeutral(t, n);
      for (const auto& t : part.drop_set()) lex.AddDrop(t);
      for (const auto& a : part.abstractions()) lex.AddAbstraction(a.phrase, a.replacement);
    }
    lex.Validate();
  } catch (const Error& e) {
    throw SetupError(e.what());
  }
  std::vector<std::string> sentences;
  for (auto& s : ReadLines(cfg.input)) {
    if (HasNonSpace(s)) sentences.push_back(std::move(s));
  }
  TrainingPairs pairs = BuildTrainingPairs(sentences, lex);
  std::string text;
  for (const auto& t : pairs.triples) {
    text += nlohmann::json{{"c1", t.c1}, {"c2", t.c2}, {"r", t.r}}.dump() + "\n";
  }
  Emit(cfg, out, text);
  err << nlohmann::json{{"sentences", sentences.size()},
                        {"pairs", pairs.triples.size()},
                        {"skipped", pairs.skipped}}
             .dump()
      << "\n";
  return kExitOk;
}

inline int CmdCorrelate(const RunConfig& cfg, std::ostream& out) {
  CheckFormat(cfg);
  if (cfg.input.empty()) throw SetupError("correlate needs --input");
  if (cfg.kind != "pearson" && cfg.kind != "spearman") {
    throw SetupError("--kind must be pearson or spearman");
  }
  std::vector<JudgedSegment> segments;
  try {
    segments = LoadJudgedSegments(cfg.input);
  } catch (const Error& e) {
    throw SetupError(e.what());
  }
  std::vector<TextUnit> refs;
  for (const auto& s : segments) refs.push_back(s.ref);
  auto scorers = MakeScorers(cfg, refs);
  std::vector<CorrelationReport> reports;
  for (const auto& scorer : scorers) {
    reports.push_back(Correlate(segments, *scorer, ParseCorrelationKind(cfg.kind), cfg.jobs));
  }
  std::string text;
  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(CorrelationReportToJson(r));
    text = Stamp(cfg, {{"input", cfg.input}, {"correlations", arr}}).dump(2) + "\n";
  } else {
    text = "| Metric | Group | n | " + cfg.kind + " |\n|---|---|---|---|\n";
    char buf[64];
    for (const auto& r : reports) {
      for (const auto& g : r.groups) {
        std::snprintf(buf, sizeof(buf), "%.4f", g.value);
        text += "| " + r.metric.Key() + " | " + g.group + " | " + std::to_string(g.n) + " | " +
                buf + " |\n";
      }
      std::snprintf(buf, sizeof(buf), "%.4f", r.average);
      text += "| " + r.metric.Key() + " | Avg. | | " + buf + " |\n";
    }
  }
  Emit(cfg, out, text);
  return kExitOk;
}

inline int CmdMatchmap(const RunConfig& cfg, std::ostream& out) {
  CheckFormat(cfg);
  if (cfg.model.empty()) throw SetupError("matchmap needs --model");
  if (!HasNonSpace(cfg.sys) || !HasNonSpace(cfg.ref)) {
    throw SetupError("matchmap needs non-empty --sys and --ref");
  }
  if (cfg.mode != "greedy" && cfg.mode != "ot") throw SetupError("--mode must be greedy or ot");
  if (!cfg.idf.empty() && cfg.idf != "on" && cfg.idf != "off") {
    throw SetupError("--idf must be on or off");
  }
  bool use_idf = cfg.idf == "on";
  if (use_idf && cfg.references.empty()) throw SetupError("--idf on needs --references");
  std::vector<std::string> corpus;
  if (use_idf) {
    for (auto& r : ReadLines(cfg.references)) {
      if (HasNonSpace(r)) corpus.push_back(std::move(r));
    }
  }
  auto provider = MakeProvider(cfg);
  if (!provider) throw SetupError("matchmap needs --fixtures or --provider-url");
  std::vector<std::string> texts = {NormalizeNfc(cfg.sys), NormalizeNfc(cfg.ref)};
  std::vector<EmbeddedText> e = provider->Embed(texts, cfg.model, cfg.layer);
  std::optional<IdfTable> idf;
  if (use_idf) {
    std::vector<std::vector<std::string>> docs;
    for (auto& d : provider->Embed(corpus, cfg.model, cfg.layer)) docs.push_back(std::move(d.tokens));
    idf = BuildIdf(std::span<const std::vector<std::string>>(docs));
  }
  MatchingMap map = BuildMatchingMap(e[0], e[1],
                                     cfg.mode == "ot" ? MatchingMode::kOt : MatchingMode::kGreedy,
                                     idf ? &*idf : nullptr);
  std::string text;
  if (cfg.format == "json") {
    text = MatchingMapToJson(map).dump(2) + "\n";
  } else {
    text = "```\n" + RenderHeatmap(map) + "```\n\n```json\n" + MatchingMapToJson(map).dump(2) +
           "\n```\n";
  }
  Emit(cfg, out, text);
  return kExitOk;
}

}  // namespace detail

inline int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Fairness and performance audits for text generation metrics", "metricfair"};
  app.require_subcommand(1);

  auto add_metric_flags = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metrics, "Metric name (repeatable where noted)");
    sub->add_option("--provider-url", cfg.provider_url, "Model provider base URL");
    sub->add_option("--fixtures", cfg.fixtures, "Directory of provider fixture files");
    sub->add_option("--model", cfg.model, "Backbone model name");
    sub->add_option("--layer", cfg.layer, "Embedding layer");
    sub->add_option("--idf", cfg.idf, "on or off")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--direction", cfg.direction, "precision, recall or f")
        ->check(CLI::IsMember({"precision", "recall", "f"}));
    sub->add_option("--variant", cfg.variant, "p, r or f")->check(CLI::IsMember({"p", "r", "f"}));
    sub->add_option("--solver", cfg.solver, "auto, exact or sinkhorn")
        ->check(CLI::IsMember({"auto", "exact", "sinkhorn"}));
    sub->add_option("--synonyms", cfg.synonyms, "METEOR synonym TSV");
    sub->add_option("--jobs", cfg.jobs, "Parallel scoring workers (0 = all CPUs)");
  };
  auto add_output_flags = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or markdown");
    sub->add_option("--output,-o", cfg.output, "Write here instead of stdout");
    sub->add_flag("--deterministic", cfg.deterministic, "Omit timestamps");
  };

  CLI::App* score = app.add_subcommand("score", "Score candidate lines against reference lines");
  add_metric_flags(score);
  add_output_flags(score);
  score->add_option("--candidates", cfg.candidates, "One candidate per line")->required();
  score->add_option("--references", cfg.references, "One reference per line")->required();

  CLI::App* audit = app.add_subcommand("audit", "Measure metric bias on a paired dataset");
  add_metric_flags(audit);
  add_output_flags(audit);
  audit->add_option("--dataset", cfg.dataset, "Paired examples, JSON Lines")->required();

  CLI::App* cda = app.add_subcommand("cda", "Build counterfactual training triples");
  cda->add_option("--lexicon", cfg.lexicons, "Rule lexicon TSV (repeatable)")->required();
  cda->add_option("--input", cfg.input, "One sentence per line")->required();
  cda->add_option("--output,-o", cfg.output, "Write triples here instead of stdout");

  CLI::App* correlate = app.add_subcommand("correlate", "Correlate metric scores with human scores");
  add_metric_flags(correlate);
  add_output_flags(correlate);
  correlate->add_option("--input", cfg.input, "Judged segments, TSV or JSON Lines")->required();
  correlate->add_option("--kind", cfg.kind, "pearson or spearman");

  CLI::App* matchmap = app.add_subcommand("matchmap", "Export a token matching map");
  matchmap->add_option("--provider-url", cfg.provider_url, "Model provider base URL");
  matchmap->add_option("--fixtures", cfg.fixtures, "Directory of provider fixture files");
  matchmap->add_option("--model", cfg.model, "Backbone model name");
  matchmap->add_option("--layer", cfg.layer, "Embedding layer");
  matchmap->add_option("--idf", cfg.idf, "Weight OT mass by idf");
  matchmap->add_option("--references", cfg.references, "Corpus for idf weights");
  matchmap->add_option("--sys", cfg.sys, "Candidate text")->required();
  matchmap->add_option("--ref", cfg.ref, "Reference text")->required();
  matchmap->add_option("--mode", cfg.mode, "greedy or ot");
  add_output_flags(matchmap);

  std::vector<const char*> argv = {"metricfair"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (score->parsed()) return detail::CmdScore(cfg, out);
    if (audit->parsed()) return detail::CmdAudit(cfg, out);
    if (cda->parsed()) return detail::CmdCda(cfg, out, err);
    if (correlate->parsed()) return detail::CmdCorrelate(cfg, out);
    if (matchmap->parsed()) return detail::CmdMatchmap(cfg, out);
  } catch (const SetupError& e) {
    err << "metricfair: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "metricfair: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kUnknownMetric:
      case ErrorCode::kConfigError:
      case ErrorCode::kUnknownModel:
      case ErrorCode::kBadLexiconFile:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    err << "metricfair: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace metricfair::cli

#endif  // METRICFAIR_CLI_HPP_

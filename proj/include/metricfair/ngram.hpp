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


// Surface tokenizer and the traditional n-gram metrics: BLEU, ROUGE-1,
// METEOR, NIST and chrF. All scores are sentence level against a single
// reference.

#ifndef METRICFAIR_NGRAM_HPP_
#define METRICFAIR_NGRAM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metricfair/core.hpp"
#include "metricfair/porter_stemmer.hpp"
#include "metricfair/unicode.hpp"

namespace metricfair {

using Tokens = std::vector<std::string>;

namespace detail {

inline bool IsApostrophe(UChar32 c) { return c == U'\'' || c == 0x2019; }

inline bool IsWordChar(UChar32 c) {
  if (u_isalnum(c)) return true;
  int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

}  // namespace detail

// Lowercases, splits on whitespace, and splits punctuation into separate
// tokens. An apostrophe inside a word starts a clitic token ("he's" ->
// "he", "'s"); digits keep an inner '.' or ',' ("3.5").
inline Tokens TokenizeSurface(std::string_view text) {
  std::vector<UChar32> cps = CodePoints(ToLower(NormalizeNfc(text)));
  Tokens out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    UChar32 c = cps[i];
    UChar32 next = i + 1 < cps.size() ? cps[i + 1] : 0;
    UChar32 prev = i > 0 ? cps[i - 1] : 0;
    if (IsSpace(c)) {
      flush();
    } else if (detail::IsWordChar(c)) {
      word += EncodeUtf8(c);
    } else if (detail::IsApostrophe(c) && !word.empty() && u_isalpha(next)) {
      flush();
      word = "'";
    } else if ((c == U'.' || c == U',') && !word.empty() && u_isdigit(prev) &&
               u_isdigit(next)) {
      word += EncodeUtf8(c);
    } else {
      flush();
      out.push_back(EncodeUtf8(c));
    }
  }
  flush();
  return out;
}

// Counts of all n-grams with n in [min_n, max_n]. Keys are the tokens joined
// by U+001F.
class NGramProfile {
 public:
  NGramProfile(std::span<const std::string> tokens, int min_n, int max_n)
      : min_n_(min_n), max_n_(max_n),
        counts_(static_cast<std::size_t>(max_n + 1)),
        totals_(static_cast<std::size_t>(max_n + 1), 0) {
    for (int n = min_n; n <= max_n; ++n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        ++counts_[static_cast<std::size_t>(n)][Key(tokens.subspan(i, static_cast<std::size_t>(n)))];
        ++totals_[static_cast<std::size_t>(n)];
      }
    }
  }

  static std::string Key(std::span<const std::string> gram) {
    std::string key;
    for (std::size_t i = 0; i < gram.size(); ++i) {
      if (i) key += '\x1f';
      key += gram[i];
    }
    return key;
  }

  int min_order() const { return min_n_; }
  int max_order() const { return max_n_; }

  const std::unordered_map<std::string, int>& Order(int n) const {
    return counts_.at(static_cast<std::size_t>(n));
  }

  int Count(int n, const std::string& key) const {
    const auto& m = Order(n);
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  }

  // Total n-gram mass of order n, i.e. max(0, len - n + 1).
  int Total(int n) const { return totals_.at(static_cast<std::size_t>(n)); }

  // Clipped overlap with another profile at order n.
  int Overlap(const NGramProfile& other, int n) const {
    int matched = 0;
    for (const auto& [key, count] : Order(n)) {
      matched += std::min(count, other.Count(n, key));
    }
    return matched;
  }

 private:
  int min_n_;
  int max_n_;
  std::vector<std::unordered_map<std::string, int>> counts_;
  std::vector<int> totals_;
};

namespace detail {

inline void RequireTokens(std::span<const std::string> sys,
                          std::span<const std::string> ref, const char* metric) {
  if (sys.empty() || ref.empty()) {
    throw Error(ErrorCode::kEmptyText,
                std::string(metric) + " needs non-empty candidate and reference");
  }
}

}  // namespace detail

struct BleuResult {
  std::array<double, 4> precisions{};
  // Orders for which the candidate has at least one n-gram.
  int orders_used = 0;
  double brevity_penalty = 1.0;
  double score = 0.0;
};

// Unsmoothed sentence BLEU with n = 1..4. Orders longer than the candidate
// have no n-grams and are left out of the geometric mean; any defined order
// with zero precision gives 0.
inline BleuResult BleuDetailed(std::span<const std::string> sys,
                               std::span<const std::string> ref) {
  detail::RequireTokens(sys, ref, "BLEU");
  NGramProfile sys_profile(sys, 1, 4);
  NGramProfile ref_profile(ref, 1, 4);
  BleuResult r;
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= 4; ++n) {
    int total = sys_profile.Total(n);
    if (total == 0) continue;
    int matched = sys_profile.Overlap(ref_profile, n);
    double p = static_cast<double>(matched) / total;
    r.precisions[static_cast<std::size_t>(n - 1)] = p;
    ++r.orders_used;
    if (matched == 0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  double c = static_cast<double>(sys.size());
  double rl = static_cast<double>(ref.size());
  r.brevity_penalty = c < rl ? std::exp(1.0 - rl / c) : 1.0;
  r.score = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / r.orders_used);
  return r;
}

inline double Bleu(std::span<const std::string> sys, std::span<const std::string> ref) {
  return BleuDetailed(sys, ref).score;
}

struct PrecisionRecallF {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

inline PrecisionRecallF Rouge1(std::span<const std::string> sys,
                               std::span<const std::string> ref) {
  detail::RequireTokens(sys, ref, "ROUGE-1");
  NGramProfile sys_profile(sys, 1, 1);
  NGramProfile ref_profile(ref, 1, 1);
  int overlap = sys_profile.Overlap(ref_profile, 1);
  PrecisionRecallF out;
  if (overlap == 0) return out;
  out.precision = static_cast<double>(overlap) / static_cast<double>(sys.size());
  out.recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
  out.f = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

// Symmetric synonym pairs loaded from a `token<TAB>synonym` file.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  static SynonymLexicon Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kBadLexiconFile, "cannot open " + path);
    SynonymLexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!HasNonSpace(line)) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos ||
          tab == 0 || tab + 1 == line.size()) {
        throw Error(ErrorCode::kBadLexiconFile,
                    path + ":" + std::to_string(line_no) +
                        ": expected token<TAB>synonym");
      }
      lex.Add(line.substr(0, tab), line.substr(tab + 1));
    }
    return lex;
  }

  void Add(std::string_view a, std::string_view b) {
    std::string la = ToLower(NormalizeNfc(a));
    std::string lb = ToLower(NormalizeNfc(b));
    pairs_.emplace(la, lb);
    pairs_.emplace(lb, la);
  }

  bool AreSynonyms(const std::string& a, const std::string& b) const {
    return pairs_.count({a, b}) > 0;
  }

  bool empty() const { return pairs_.empty(); }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct MeteorResult {
  int matches = 0;
  int chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
  // alignment[i] = matched reference index of candidate token i, or -1.
  std::vector<int> alignment;
};

// METEOR with exact, Porter-stem and (optional) synonym matching stages.
// Within a stage, candidate tokens are visited left to right; each takes the
// reference token that continues the previous token's chunk when possible,
// otherwise the leftmost unmatched eligible reference token.
inline MeteorResult MeteorDetailed(std::span<const std::string> sys,
                                   std::span<const std::string> ref,
                                   const SynonymLexicon* synonyms = nullptr,
                                   const MeteorParams& params = {}) {
  detail::RequireTokens(sys, ref, "METEOR");
  PorterStemmer stemmer;
  std::vector<std::string> sys_stems, ref_stems;
  for (const auto& t : sys) sys_stems.push_back(stemmer.Stem(t));
  for (const auto& t : ref) ref_stems.push_back(stemmer.Stem(t));

  std::vector<int> align(sys.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  auto run_stage = [&](auto&& eligible) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      if (align[i] >= 0) continue;
      int chosen = -1;
      if (i > 0 && align[i - 1] >= 0) {
        auto cont = static_cast<std::size_t>(align[i - 1] + 1);
        if (cont < ref.size() && !ref_used[cont] && eligible(i, cont)) {
          chosen = static_cast<int>(cont);
        }
      }
      for (std::size_t j = 0; chosen < 0 && j < ref.size(); ++j) {
        if (!ref_used[j] && eligible(i, j)) chosen = static_cast<int>(j);
      }
      if (chosen >= 0) {
        align[i] = chosen;
        ref_used[static_cast<std::size_t>(chosen)] = true;
      }
    }
  };
  run_stage([&](std::size_t i, std::size_t j) { return sys[i] == ref[j]; });
  run_stage([&](std::size_t i, std::size_t j) { return sys_stems[i] == ref_stems[j]; });
  if (synonyms != nullptr && !synonyms->empty()) {
    run_stage([&](std::size_t i, std::size_t j) { return synonyms->AreSynonyms(sys[i], ref[j]); });
  }

  MeteorResult r;
  r.alignment = align;
  int prev = -2;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (align[i] < 0) {
      prev = -2;
      continue;
    }
    ++r.matches;
    if (align[i] != prev + 1) ++r.chunks;
    prev = align[i];
  }
  if (r.matches == 0) return r;
  double m = r.matches;
  r.precision = m / static_cast<double>(sys.size());
  r.recall = m / static_cast<double>(ref.size());
  r.fmean = r.precision * r.recall /
            (params.alpha * r.precision + (1.0 - params.alpha) * r.recall);
  r.penalty = params.gamma * std::pow(r.chunks / m, params.beta);
  r.score = r.fmean * (1.0 - r.penalty);
  return r;
}

inline double Meteor(std::span<const std::string> sys, std::span<const std::string> ref,
                     const SynonymLexicon* synonyms = nullptr) {
  return MeteorDetailed(sys, ref, synonyms).score;
}

// NIST information weights: info(w1..wn) = log2(count(w1..wn-1) / count(w1..wn)),
// where the parent count of a unigram is the corpus word count.
class InfoWeights {
 public:
  InfoWeights() = default;

  static InfoWeights Build(const std::vector<Tokens>& corpus, int max_n = 5) {
    InfoWeights w;
    w.max_n_ = max_n;
    std::vector<std::unordered_map<std::string, int>> counts(static_cast<std::size_t>(max_n + 1));
    long total_words = 0;
    for (const Tokens& sentence : corpus) {
      NGramProfile profile(sentence, 1, max_n);
      total_words += static_cast<long>(sentence.size());
      for (int n = 1; n <= max_n; ++n) {
        for (const auto& [key, c] : profile.Order(n)) counts[static_cast<std::size_t>(n)][key] += c;
      }
    }
    for (int n = 1; n <= max_n; ++n) {
      for (const auto& [key, c] : counts[static_cast<std::size_t>(n)]) {
        double parent;
        if (n == 1) {
          parent = static_cast<double>(total_words);
        } else {
          auto cut = key.rfind('\x1f');
          parent = counts[static_cast<std::size_t>(n - 1)].at(key.substr(0, cut));
        }
        w.weights_[key] = std::log2(parent / c);
      }
    }
    return w;
  }

  double Weight(const std::string& key) const {
    auto it = weights_.find(key);
    return it == weights_.end() ? 0.0 : it->second;
  }

  bool empty() const { return weights_.empty(); }
  int max_order() const { return max_n_; }

 private:
  int max_n_ = 0;
  std::unordered_map<std::string, double> weights_;
};

// exp(beta * log^2(min(ratio, 1))) with beta fixed so a 2/3 length ratio
// yields 0.5.
inline double NistBrevityPenalty(double ratio) {
  static const double kBeta = std::log(0.5) / std::pow(std::log(2.0 / 3.0), 2);
  double r = std::min(ratio, 1.0);
  if (r <= 0.0) return 0.0;
  return std::exp(kBeta * std::pow(std::log(r), 2));
}

inline double Nist(std::span<const std::string> sys, std::span<const std::string> ref,
                   const InfoWeights& info, int max_n = 5) {
  detail::RequireTokens(sys, ref, "NIST");
  if (info.empty()) {
    throw Error(ErrorCode::kMissingInfoWeights, "NIST needs info weights built from references");
  }
  NGramProfile sys_profile(sys, 1, max_n);
  NGramProfile ref_profile(ref, 1, max_n);
  double score = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    int total = sys_profile.Total(n);
    if (total == 0) continue;
    double gained = 0.0;
    for (const auto& [key, count] : sys_profile.Order(n)) {
      int matched = std::min(count, ref_profile.Count(n, key));
      if (matched > 0) gained += matched * info.Weight(key);
    }
    score += gained / total;
  }
  double ratio = static_cast<double>(sys.size()) / static_cast<double>(ref.size());
  return score * NistBrevityPenalty(ratio);
}

// Character n-gram F-score averaged uniformly over n = 1..max_n, whitespace
// removed. Orders where either side has no n-grams are skipped.
inline double Chrf(std::string_view sys, std::string_view ref, int max_n = 6,
                   double beta = 2.0) {
  auto strip = [](std::string_view s) {
    std::u32string out;
    for (UChar32 c : CodePoints(NormalizeNfc(s))) {
      if (!IsSpace(c)) out.push_back(static_cast<char32_t>(c));
    }
    return out;
  };
  std::u32string a = strip(sys);
  std::u32string b = strip(ref);
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kEmptyText, "chrF needs non-empty candidate and reference");
  }
  auto grams = [](const std::u32string& s, std::size_t n) {
    std::map<std::u32string, int> m;
    for (std::size_t i = 0; i + n <= s.size(); ++i) ++m[s.substr(i, n)];
    return m;
  };
  double sum = 0.0;
  int orders = 0;
  double b2 = beta * beta;
  for (int n = 1; n <= max_n; ++n) {
    auto un = static_cast<std::size_t>(n);
    if (a.size() < un || b.size() < un) continue;
    auto ga = grams(a, un);
    auto gb = grams(b, un);
    int matched = 0;
    for (const auto& [g, c] : ga) {
      auto it = gb.find(g);
      if (it != gb.end()) matched += std::min(c, it->second);
    }
    double p = static_cast<double>(matched) / static_cast<double>(a.size() - un + 1);
    double r = static_cast<double>(matched) / static_cast<double>(b.size() - un + 1);
    double f = (p + r) > 0.0 ? (1.0 + b2) * p * r / (b2 * p + r) : 0.0;
    sum += f;
    ++orders;
  }
  return sum / orders;
}

}  // namespace metricfair

#endif  // METRICFAIR_NGRAM_HPP_

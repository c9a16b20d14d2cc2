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


// Counterfactual data augmentation and neutral-reference construction from
// a rule lexicon: whole-word identity-term swaps, neutral replacements,
// adjective drops, and hand-written phrase abstractions.

#ifndef METRICFAIR_CDA_HPP_
#define METRICFAIR_CDA_HPP_

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metricfair/core.hpp"
#include "metricfair/unicode.hpp"

namespace metricfair {

namespace detail {

enum class CasePattern { kLower, kTitle, kUpper };

inline bool IsCdaWordChar(UChar32 c) { return u_isalnum(c) != 0; }

inline bool IsCdaApostrophe(UChar32 c) { return c == U'\'' || c == 0x2019; }

// Splits text into alternating word / non-word segments. An apostrophe
// between two word characters stays inside the word ("didn't").
struct Segment {
  std::string text;
  bool word = false;
};

inline std::vector<Segment> SplitWords(std::string_view text) {
  std::vector<UChar32> cps = CodePoints(text);
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    bool word = IsCdaWordChar(cps[i]);
    Segment seg{"", word};
    while (i < cps.size()) {
      UChar32 c = cps[i];
      bool inner_apostrophe = word && IsCdaApostrophe(c) && i + 1 < cps.size() &&
                              IsCdaWordChar(cps[i + 1]) && i > 0 && IsCdaWordChar(cps[i - 1]);
      if (word ? !(IsCdaWordChar(c) || inner_apostrophe) : IsCdaWordChar(c)) break;
      seg.text += EncodeUtf8(c);
      ++i;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

inline CasePattern CaseOf(std::string_view word) {
  std::vector<UChar32> cps = CodePoints(word);
  int letters = 0, upper = 0;
  for (UChar32 c : cps) {
    if (u_isalpha(c)) {
      ++letters;
      if (u_isupper(c)) ++upper;
    }
  }
  if (letters > 1 && upper == letters) return CasePattern::kUpper;
  for (UChar32 c : cps) {
    if (u_isalpha(c)) return u_isupper(c) ? CasePattern::kTitle : CasePattern::kLower;
  }
  return CasePattern::kLower;
}

inline std::string ApplyCase(const std::string& lower, CasePattern pattern) {
  switch (pattern) {
    case CasePattern::kLower: return lower;
    case CasePattern::kUpper: return ToUpper(lower);
    case CasePattern::kTitle: {
      std::vector<UChar32> cps = CodePoints(lower);
      std::string out;
      for (std::size_t i = 0; i < cps.size(); ++i) {
        out += EncodeUtf8(i == 0 ? u_toupper(cps[i]) : cps[i]);
      }
      return out;
    }
  }
  return lower;
}

inline const std::vector<std::string>& Clitics() {
  static const std::vector<std::string> clitics = {"'s", "'d", "'ll", "'re", "'ve", "'m",
                                                   "\xE2\x80\x99s", "\xE2\x80\x99" "d",
                                                   "\xE2\x80\x99ll", "\xE2\x80\x99re",
                                                   "\xE2\x80\x99ve", "\xE2\x80\x99m"};
  return clitics;
}

// Splits "he's" into ("he", "'s"); words without a known clitic are returned
// whole with an empty suffix.
inline std::pair<std::string, std::string> SplitClitic(const std::string& word) {
  std::string lower = ToLower(word);
  for (const auto& c : Clitics()) {
    if (lower.size() > c.size() && lower.compare(lower.size() - c.size(), c.size(), c) == 0) {
      return {word.substr(0, word.size() - c.size()), word.substr(word.size() - c.size())};
    }
  }
  return {word, ""};
}

inline bool EndsWithSpace(const std::string& s) {
  auto cps = CodePoints(s);
  return !cps.empty() && IsSpace(cps.back());
}

inline bool StartsWithSpace(const std::string& s) {
  auto cps = CodePoints(s);
  return !cps.empty() && IsSpace(cps.front());
}

inline std::string TrimLeadingSpace(const std::string& s) {
  auto cps = CodePoints(s);
  std::size_t k = 0;
  while (k < cps.size() && IsSpace(cps[k])) ++k;
  std::string out;
  for (; k < cps.size(); ++k) out += EncodeUtf8(cps[k]);
  return out;
}

inline std::string TrimTrailingSpace(const std::string& s) {
  auto cps = CodePoints(s);
  while (!cps.empty() && IsSpace(cps.back())) cps.pop_back();
  std::string out;
  for (UChar32 c : cps) out += EncodeUtf8(c);
  return out;
}

// Joins segments, repairing whitespace around removed (empty) words so no
// double spaces or space-before-punctuation remain.
inline std::string JoinRepaired(std::vector<Segment> segs, const std::vector<bool>& removed) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!removed[i]) continue;
    segs[i].text.clear();
    // Nearest surviving neighbours.
    long prev = static_cast<long>(i) - 1;
    while (prev >= 0 && segs[static_cast<std::size_t>(prev)].text.empty()) --prev;
    std::size_t next = i + 1;
    while (next < segs.size() && segs[next].text.empty()) ++next;
    bool has_prev = prev >= 0;
    bool has_next = next < segs.size();
    if (has_next && StartsWithSpace(segs[next].text) &&
        (!has_prev || EndsWithSpace(segs[static_cast<std::size_t>(prev)].text))) {
      segs[next].text = TrimLeadingSpace(segs[next].text);
    } else if (has_prev && EndsWithSpace(segs[static_cast<std::size_t>(prev)].text) &&
               (!has_next || !segs[next].word)) {
      segs[static_cast<std::size_t>(prev)].text =
          TrimTrailingSpace(segs[static_cast<std::size_t>(prev)].text);
    }
  }
  std::string out;
  for (const auto& s : segs) out += s.text;
  return out;
}

}  // namespace detail

// Rules of one lexicon. All terms are stored case-folded.
class TermLexicon {
 public:
  struct Abstraction {
    std::string phrase;       // case-folded, matched at word boundaries
    std::string replacement;  // inserted verbatim; may be empty
  };

  static TermLexicon Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kBadLexiconFile, "cannot open " + path);
    return Parse(in, path);
  }

  static TermLexicon Parse(std::istream& in, const std::string& name = "<lexicon>") {
    TermLexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!HasNonSpace(line) || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (!line.empty() && line.back() == '\t') cols.emplace_back();
      std::string where = name + ":" + std::to_string(line_no);
      try {
        lex.AddRule(cols);
      } catch (const Error& e) {
        throw Error(ErrorCode::kBadLexiconFile, where + ": " + e.message());
      }
    }
    lex.Validate();
    return lex;
  }

  // cols[0] is the rule type: swap, name, neutral, drop or abstract.
  void AddRule(const std::vector<std::string>& cols) {
    if (cols.empty()) throw Error(ErrorCode::kBadLexiconFile, "empty rule");
    const std::string& kind = cols[0];
    auto need = [&](std::size_t n) {
      if (cols.size() != n) {
        throw Error(ErrorCode::kBadLexiconFile,
                    "rule '" + kind + "' takes " + std::to_string(n - 1) + " fields");
      }
    };
    if (kind == "swap" || kind == "name") {
      need(3);
      AddSwap(cols[1], cols[2], kind == "name");
    } else if (kind == "neutral") {
      need(3);
      AddNeutral(cols[1], cols[2]);
    } else if (kind == "drop") {
      need(2);
      AddDrop(cols[1]);
    } else if (kind == "abstract") {
      need(3);
      AddAbstraction(cols[1], cols[2]);
    } else {
      throw Error(ErrorCode::kBadLexiconFile, "unknown rule type '" + kind + "'");
    }
  }

  void AddSwap(std::string_view a, std::string_view b, bool is_name = false) {
    std::string la = Term(a), lb = Term(b);
    if (la == lb) throw Error(ErrorCode::kBadLexiconFile, "swap of '" + la + "' with itself");
    for (const auto& [x, y] : {std::pair{la, lb}, std::pair{lb, la}}) {
      auto [it, inserted] = swap_.emplace(x, y);
      if (!inserted && it->second != y) {
        throw Error(ErrorCode::kBadLexiconFile,
                    "'" + x + "' swaps to both '" + it->second + "' and '" + y + "'");
      }
    }
    (is_name ? name_pairs_ : swap_pairs_).emplace_back(la, lb);
  }

  void AddNeutral(std::string_view term, std::string_view neutral) {
    std::string t = Term(term);
    std::string n = ToLower(NormalizeNfc(neutral));
    if (!HasNonSpace(n)) throw Error(ErrorCode::kBadLexiconFile, "empty neutral term for " + t);
    auto [it, inserted] = neutral_.emplace(t, n);
    if (!inserted && it->second != n) {
      throw Error(ErrorCode::kBadLexiconFile, "'" + t + "' has two neutral terms");
    }
  }

  void AddDrop(std::string_view term) { drop_.insert(Term(term)); }

  void AddAbstraction(std::string_view phrase, std::string_view replacement) {
    std::string p = ToLower(NormalizeNfc(phrase));
    if (!HasNonSpace(p)) throw Error(ErrorCode::kBadLexiconFile, "empty abstraction phrase");
    abstractions_.push_back({p, std::string(NormalizeNfc(replacement))});
  }

  // Conflicts that would break the swap involution or neutralize idempotence.
  void Validate() const {
    for (const auto& t : drop_) {
      if (neutral_.count(t)) {
        throw Error(ErrorCode::kBadLexiconFile, "'" + t + "' is both dropped and neutralized");
      }
    }
    auto check_output = [&](const std::string& text, const std::string& what) {
      for (const auto& seg : detail::SplitWords(text)) {
        if (!seg.word) continue;
        std::string w = ToLower(detail::SplitClitic(seg.text).first);
        if (neutral_.count(w) || drop_.count(w)) {
          throw Error(ErrorCode::kBadLexiconFile,
                      what + " '" + text + "' contains identity term '" + w + "'");
        }
      }
    };
    for (const auto& [t, n] : neutral_) check_output(n, "neutral term");
    for (const auto& a : abstractions_) check_output(a.replacement, "abstraction");
  }

  const std::map<std::string, std::string>& swap_map() const { return swap_; }
  const std::map<std::string, std::string>& neutral_map() const { return neutral_; }
  const std::set<std::string>& drop_set() const { return drop_; }
  const std::vector<std::pair<std::string, std::string>>& swap_pairs() const { return swap_pairs_; }
  const std::vector<std::pair<std::string, std::string>>& name_pairs() const { return name_pairs_; }
  const std::vector<Abstraction>& abstractions() const { return abstractions_; }

  // Every surface term the lexicon knows about.
  std::vector<std::string> Vocabulary() const {
    std::set<std::string> v;
    for (const auto& [a, b] : swap_) v.insert(a);
    for (const auto& [a, b] : neutral_) v.insert(a);
    v.insert(drop_.begin(), drop_.end());
    return {v.begin(), v.end()};
  }

 private:
  static std::string Term(std::string_view t) {
    std::string out = ToLower(NormalizeNfc(t));
    if (!HasNonSpace(out)) throw Error(ErrorCode::kBadLexiconFile, "empty term");
    for (const auto& seg : detail::SplitWords(out)) {
      if (!seg.word) throw Error(ErrorCode::kBadLexiconFile, "term '" + out + "' is not one word");
    }
    return out;
  }

  std::map<std::string, std::string> swap_;
  std::map<std::string, std::string> neutral_;
  std::set<std::string> drop_;
  std::vector<std::pair<std::string, std::string>> swap_pairs_;
  std::vector<std::pair<std::string, std::string>> name_pairs_;
  std::vector<Abstraction> abstractions_;
};

// Replaces every whole-word swap or name term by its counterpart, keeping
// the original case pattern and any clitic ("He's" -> "She's").
inline std::string CdaSwap(std::string_view text, const TermLexicon& lex) {
  std::vector<detail::Segment> segs = detail::SplitWords(NormalizeNfc(text));
  std::string out;
  for (auto& seg : segs) {
    if (seg.word) {
      auto [stem, clitic] = detail::SplitClitic(seg.text);
      auto it = lex.swap_map().find(ToLower(stem));
      if (it != lex.swap_map().end()) {
        seg.text = detail::ApplyCase(it->second, detail::CaseOf(stem)) + clitic;
      } else if (clitic.size() > 0) {
        it = lex.swap_map().find(ToLower(seg.text));
        if (it != lex.swap_map().end()) {
          seg.text = detail::ApplyCase(it->second, detail::CaseOf(seg.text));
        }
      }
    }
    out += seg.text;
  }
  return out;
}

// Number of whole-word swap or name terms in the text.
inline int CountSwappable(std::string_view text, const TermLexicon& lex) {
  int hits = 0;
  for (const auto& seg : detail::SplitWords(NormalizeNfc(text))) {
    if (!seg.word) continue;
    if (lex.swap_map().count(ToLower(detail::SplitClitic(seg.text).first)) ||
        lex.swap_map().count(ToLower(seg.text))) {
      ++hits;
    }
  }
  return hits;
}

namespace detail {

inline std::string ApplyAbstractions(const std::string& text, const TermLexicon& lex) {
  std::string current = text;
  for (const auto& rule : lex.abstractions()) {
    std::vector<Segment> segs = SplitWords(current);
    std::vector<Segment> pattern = SplitWords(rule.phrase);
    std::vector<Segment> result;
    std::vector<bool> removed;
    std::size_t i = 0;
    while (i < segs.size()) {
      bool match = i + pattern.size() <= segs.size() && !pattern.empty();
      std::string rest;  // unmatched tail of a trailing separator
      for (std::size_t k = 0; match && k < pattern.size(); ++k) {
        std::string seg = ToLower(segs[i + k].text);
        const std::string& want = pattern[k].text;
        if (k + 1 == pattern.size() && !pattern[k].word && !segs[i + k].word &&
            seg.compare(0, want.size(), want) == 0) {
          rest = segs[i + k].text.substr(want.size());
        } else if (seg != want) {
          match = false;
        }
      }
      if (match) {
        CasePattern c = CaseOf(segs[i].text);
        std::string replacement = rule.replacement;
        if (c == CasePattern::kTitle && !replacement.empty()) {
          replacement = ApplyCase(replacement, CasePattern::kTitle);
        }
        result.push_back({replacement, true});
        removed.push_back(replacement.empty());
        if (!rest.empty()) {
          result.push_back({rest, false});
          removed.push_back(false);
        }
        i += pattern.size();
      } else {
        result.push_back(segs[i]);
        removed.push_back(false);
        ++i;
      }
    }
    current = JoinRepaired(std::move(result), removed);
  }
  return current;
}

inline std::string NeutralizeOnce(const std::string& text, const TermLexicon& lex) {
  std::vector<Segment> segs = SplitWords(ApplyAbstractions(text, lex));
  std::vector<bool> removed(segs.size(), false);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!segs[i].word) continue;
    auto [stem, clitic] = SplitClitic(segs[i].text);
    std::string key = ToLower(stem);
    if (auto it = lex.neutral_map().find(key); it != lex.neutral_map().end()) {
      segs[i].text = ApplyCase(it->second, CaseOf(stem)) + clitic;
    } else if (lex.drop_set().count(key) && clitic.empty()) {
      removed[i] = true;
    }
  }
  return JoinRepaired(std::move(segs), removed);
}

}  // namespace detail

// Builds a neutral reference: abstraction phrases first, then neutral
// replacements and adjective drops, repeated until nothing changes.
inline std::string Neutralize(std::string_view text, const TermLexicon& lex) {
  std::string current = NormalizeNfc(text);
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = detail::NeutralizeOnce(current, lex);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

struct TrainingTriple {
  std::string c1;
  std::string c2;
  std::string r;
};

struct TrainingPairs {
  std::vector<TrainingTriple> triples;
  int skipped = 0;
};

// c1 = original, c2 = its counterfactual swap, r = its neutral reference.
// Sentences without any swappable term are skipped and counted.
inline TrainingPairs BuildTrainingPairs(const std::vector<std::string>& sentences,
                                        const TermLexicon& lex) {
  TrainingPairs out;
  for (const auto& s : sentences) {
    if (CountSwappable(s, lex) == 0) {
      ++out.skipped;
      continue;
    }
    std::string c1 = NormalizeNfc(s);
    out.triples.push_back({c1, CdaSwap(c1, lex), Neutralize(c1, lex)});
  }
  return out;
}

}  // namespace metricfair

#endif  // METRICFAIR_CDA_HPP_

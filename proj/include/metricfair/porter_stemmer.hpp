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


// The original Porter (1980) suffix-stripping stemmer. Operates on lowercase
// ASCII words; anything else is returned unchanged.

#ifndef METRICFAIR_PORTER_STEMMER_HPP_
#define METRICFAIR_PORTER_STEMMER_HPP_

#include <string>
#include <string_view>

namespace metricfair {

class PorterStemmer {
 public:
  std::string Stem(std::string_view word) const {
    for (char c : word) {
      if (c < 'a' || c > 'z') return std::string(word);
    }
    if (word.size() <= 2) return std::string(word);
    State s{std::string(word), static_cast<int>(word.size()) - 1, 0};
    Step1ab(s);
    if (s.k > 0) {
      Step1c(s);
      Step2(s);
      Step3(s);
      Step4(s);
      Step5(s);
    }
    return s.b.substr(0, static_cast<std::size_t>(s.k) + 1);
  }

 private:
  // b[0..k] is the word being stemmed; j marks the end of the stem that a
  // matched suffix would leave behind.
  struct State {
    std::string b;
    int k;
    int j;
  };

  static bool Cons(const State& s, int i) {
    switch (s.b[static_cast<std::size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(s, i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  static int Measure(const State& s) {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > s.j) return n;
      if (!Cons(s, i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > s.j) return n;
        if (Cons(s, i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > s.j) return n;
        if (!Cons(s, i)) break;
        ++i;
      }
      ++i;
    }
  }

  static bool VowelInStem(const State& s) {
    for (int i = 0; i <= s.j; ++i) {
      if (!Cons(s, i)) return true;
    }
    return false;
  }

  static bool DoubleC(const State& s, int j) {
    if (j < 1) return false;
    if (s.b[static_cast<std::size_t>(j)] != s.b[static_cast<std::size_t>(j - 1)]) return false;
    return Cons(s, j);
  }

  // cvc(i): b[i-2..i] is consonant-vowel-consonant and the last consonant
  // is not w, x or y.
  static bool Cvc(const State& s, int i) {
    if (i < 2 || !Cons(s, i) || Cons(s, i - 1) || !Cons(s, i - 2)) return false;
    char ch = s.b[static_cast<std::size_t>(i)];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  static bool Ends(State& s, std::string_view suffix) {
    int len = static_cast<int>(suffix.size());
    if (len > s.k + 1) return false;
    if (s.b.compare(static_cast<std::size_t>(s.k - len + 1), suffix.size(), suffix) != 0) {
      return false;
    }
    s.j = s.k - len;
    return true;
  }

  static void SetTo(State& s, std::string_view replacement) {
    s.b.replace(static_cast<std::size_t>(s.j + 1), std::string::npos, replacement);
    s.k = s.j + static_cast<int>(replacement.size());
  }

  static void ReplaceIfMeasured(State& s, std::string_view replacement) {
    if (Measure(s) > 0) SetTo(s, replacement);
  }

  static void Step1ab(State& s) {
    if (s.b[static_cast<std::size_t>(s.k)] == 's') {
      if (Ends(s, "sses")) {
        s.k -= 2;
      } else if (Ends(s, "ies")) {
        SetTo(s, "i");
      } else if (s.b[static_cast<std::size_t>(s.k - 1)] != 's') {
        --s.k;
      }
    }
    if (Ends(s, "eed")) {
      if (Measure(s) > 0) --s.k;
    } else if ((Ends(s, "ed") || Ends(s, "ing")) && VowelInStem(s)) {
      s.k = s.j;
      s.b.resize(static_cast<std::size_t>(s.k) + 1);
      if (Ends(s, "at")) {
        SetTo(s, "ate");
      } else if (Ends(s, "bl")) {
        SetTo(s, "ble");
      } else if (Ends(s, "iz")) {
        SetTo(s, "ize");
      } else if (DoubleC(s, s.k)) {
        char ch = s.b[static_cast<std::size_t>(s.k)];
        --s.k;
        if (ch == 'l' || ch == 's' || ch == 'z') ++s.k;
      } else {
        s.j = s.k;
        if (Measure(s) == 1 && Cvc(s, s.k)) {
          s.j = s.k;
          SetTo(s, "e");
        }
      }
    }
    s.b.resize(static_cast<std::size_t>(s.k) + 1);
  }

  static void Step1c(State& s) {
    if (Ends(s, "y") && VowelInStem(s)) s.b[static_cast<std::size_t>(s.k)] = 'i';
  }

  static void Step2(State& s) {
    if (s.k < 1) return;
    switch (s.b[static_cast<std::size_t>(s.k - 1)]) {
      case 'a':
        if (Ends(s, "ational")) { ReplaceIfMeasured(s, "ate"); break; }
        if (Ends(s, "tional")) { ReplaceIfMeasured(s, "tion"); break; }
        break;
      case 'c':
        if (Ends(s, "enci")) { ReplaceIfMeasured(s, "ence"); break; }
        if (Ends(s, "anci")) { ReplaceIfMeasured(s, "ance"); break; }
        break;
      case 'e':
        if (Ends(s, "izer")) { ReplaceIfMeasured(s, "ize"); break; }
        break;
      case 'l':
        if (Ends(s, "abli")) { ReplaceIfMeasured(s, "able"); break; }
        if (Ends(s, "alli")) { ReplaceIfMeasured(s, "al"); break; }
        if (Ends(s, "entli")) { ReplaceIfMeasured(s, "ent"); break; }
        if (Ends(s, "eli")) { ReplaceIfMeasured(s, "e"); break; }
        if (Ends(s, "ousli")) { ReplaceIfMeasured(s, "ous"); break; }
        break;
      case 'o':
        if (Ends(s, "ization")) { ReplaceIfMeasured(s, "ize"); break; }
        if (Ends(s, "ation")) { ReplaceIfMeasured(s, "ate"); break; }
        if (Ends(s, "ator")) { ReplaceIfMeasured(s, "ate"); break; }
        break;
      case 's':
        if (Ends(s, "alism")) { ReplaceIfMeasured(s, "al"); break; }
        if (Ends(s, "iveness")) { ReplaceIfMeasured(s, "ive"); break; }
        if (Ends(s, "fulness")) { ReplaceIfMeasured(s, "ful"); break; }
        if (Ends(s, "ousness")) { ReplaceIfMeasured(s, "ous"); break; }
        break;
      case 't':
        if (Ends(s, "aliti")) { ReplaceIfMeasured(s, "al"); break; }
        if (Ends(s, "iviti")) { ReplaceIfMeasured(s, "ive"); break; }
        if (Ends(s, "biliti")) { ReplaceIfMeasured(s, "ble"); break; }
        break;
      default:
        break;
    }
    s.b.resize(static_cast<std::size_t>(s.k) + 1);
  }

  static void Step3(State& s) {
    switch (s.b[static_cast<std::size_t>(s.k)]) {
      case 'e':
        if (Ends(s, "icate")) { ReplaceIfMeasured(s, "ic"); break; }
        if (Ends(s, "ative")) { ReplaceIfMeasured(s, ""); break; }
        if (Ends(s, "alize")) { ReplaceIfMeasured(s, "al"); break; }
        break;
      case 'i':
        if (Ends(s, "iciti")) { ReplaceIfMeasured(s, "ic"); break; }
        break;
      case 'l':
        if (Ends(s, "ical")) { ReplaceIfMeasured(s, "ic"); break; }
        if (Ends(s, "ful")) { ReplaceIfMeasured(s, ""); break; }
        break;
      case 's':
        if (Ends(s, "ness")) { ReplaceIfMeasured(s, ""); break; }
        break;
      default:
        break;
    }
    s.b.resize(static_cast<std::size_t>(s.k) + 1);
  }

  static void Step4(State& s) {
    if (s.k < 1) return;
    bool matched = false;
    switch (s.b[static_cast<std::size_t>(s.k - 1)]) {
      case 'a': matched = Ends(s, "al"); break;
      case 'c': matched = Ends(s, "ance") || Ends(s, "ence"); break;
      case 'e': matched = Ends(s, "er"); break;
      case 'i': matched = Ends(s, "ic"); break;
      case 'l': matched = Ends(s, "able") || Ends(s, "ible"); break;
      case 'n':
        matched = Ends(s, "ant") || Ends(s, "ement") || Ends(s, "ment") ||
                  Ends(s, "ent");
        break;
      case 'o':
        if (Ends(s, "ion") && s.j >= 0 &&
            (s.b[static_cast<std::size_t>(s.j)] == 's' ||
             s.b[static_cast<std::size_t>(s.j)] == 't')) {
          matched = true;
        } else {
          matched = Ends(s, "ou");
        }
        break;
      case 's': matched = Ends(s, "ism"); break;
      case 't': matched = Ends(s, "ate") || Ends(s, "iti"); break;
      case 'u': matched = Ends(s, "ous"); break;
      case 'v': matched = Ends(s, "ive"); break;
      case 'z': matched = Ends(s, "ize"); break;
      default: break;
    }
    if (matched && Measure(s) > 1) {
      s.k = s.j;
      s.b.resize(static_cast<std::size_t>(s.k) + 1);
    }
  }

  static void Step5(State& s) {
    s.j = s.k;
    if (s.b[static_cast<std::size_t>(s.k)] == 'e') {
      s.j = s.k - 1;
      int a = Measure(s);
      if (a > 1 || (a == 1 && !Cvc(s, s.k - 1))) --s.k;
    }
    s.j = s.k;
    if (s.b[static_cast<std::size_t>(s.k)] == 'l' && DoubleC(s, s.k) && Measure(s) > 1) {
      --s.k;
    }
    s.b.resize(static_cast<std::size_t>(s.k) + 1);
  }
};

}  // namespace metricfair

#endif  // METRICFAIR_PORTER_STEMMER_HPP_

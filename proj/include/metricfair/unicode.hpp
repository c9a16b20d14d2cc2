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


// UTF-8 helpers backed by ICU: NFC normalization, case folding and code
// point classification.

#ifndef METRICFAIR_UNICODE_HPP_
#define METRICFAIR_UNICODE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace metricfair {

inline icu::UnicodeString ToIcu(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

inline std::string FromIcu(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

inline std::string NormalizeNfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(text);
  icu::UnicodeString src = ToIcu(text);
  if (nfc->isNormalized(src, status) && U_SUCCESS(status)) {
    return std::string(text);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = nfc->normalize(src, status);
  if (U_FAILURE(status)) return std::string(text);
  return FromIcu(dst);
}

inline std::string ToLower(std::string_view text) {
  icu::UnicodeString s = ToIcu(text);
  s.toLower(icu::Locale::getRoot());
  return FromIcu(s);
}

inline std::string ToUpper(std::string_view text) {
  icu::UnicodeString s = ToIcu(text);
  s.toUpper(icu::Locale::getRoot());
  return FromIcu(s);
}

// Code points of a UTF-8 string.
inline std::vector<UChar32> CodePoints(std::string_view text) {
  icu::UnicodeString s = ToIcu(text);
  std::vector<UChar32> out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(c);
    i += U16_LENGTH(c);
  }
  return out;
}

inline std::string EncodeUtf8(UChar32 c) {
  return FromIcu(icu::UnicodeString(c));
}

inline bool IsSpace(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

inline bool HasNonSpace(std::string_view text) {
  for (UChar32 c : CodePoints(text)) {
    if (!IsSpace(c)) return true;
  }
  return false;
}

}  // namespace metricfair

#endif  // METRICFAIR_UNICODE_HPP_

#pragma once

// Thin ICU wrappers over UTF-8 std::string.

#include <string>
#include <string_view>

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "raggs/core/error.hpp"

namespace raggs::unicode {

namespace detail {

inline icu::UnicodeString to_icu(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

inline std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const auto* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  return *n;
}

inline const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const auto* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
  return *n;
}

inline std::string normalize(const icu::Normalizer2& norm, std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  auto out = norm.normalize(to_icu(s), status);
  if (U_FAILURE(status)) throw InvalidInput("Unicode normalization failed");
  return to_utf8(out);
}

inline bool is_normalized(const icu::Normalizer2& norm, std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const bool ok = norm.isNormalized(to_icu(s), status);
  if (U_FAILURE(status)) throw InvalidInput("Unicode normalization check failed");
  return ok;
}

}  // namespace detail

inline std::string to_nfc(std::string_view s) { return detail::normalize(detail::nfc(), s); }
inline std::string to_nfd(std::string_view s) { return detail::normalize(detail::nfd(), s); }
inline bool is_nfc(std::string_view s) { return detail::is_normalized(detail::nfc(), s); }
inline bool is_nfd(std::string_view s) { return detail::is_normalized(detail::nfd(), s); }

/// Canonical decomposition, drop nonspacing marks, recompose.
inline std::string strip_diacritics(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  auto decomposed = detail::nfd().normalize(detail::to_icu(s), status);
  if (U_FAILURE(status)) throw InvalidInput("Unicode normalization failed");
  icu::UnicodeString kept;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) kept.append(c);
    i += U16_LENGTH(c);
  }
  auto out = detail::nfc().normalize(kept, status);
  if (U_FAILURE(status)) throw InvalidInput("Unicode normalization failed");
  return detail::to_utf8(out);
}

inline std::string to_upper(std::string_view s) { return detail::to_utf8(detail::to_icu(s).toUpper(icu::Locale::getRoot())); }
inline std::string to_lower(std::string_view s) { return detail::to_utf8(detail::to_icu(s).toLower(icu::Locale::getRoot())); }
inline std::string to_title(std::string_view s) {
  return detail::to_utf8(detail::to_icu(s).toTitle(nullptr, icu::Locale::getRoot()));
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)) != 0; }
inline bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)) != 0; }

}  // namespace raggs::unicode

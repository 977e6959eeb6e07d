#pragma once

// Text ablations over probe bundles. Every transform is a pure function of
// (bundle, seed); the input bundle is never modified.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/core/rng.hpp"
#include "raggs/core/utf8.hpp"
#include "raggs/diagnostics/bundle.hpp"
#include "raggs/diagnostics/edit_distance.hpp"
#include "raggs/diagnostics/unicode.hpp"

namespace raggs::diag {

enum class AblationKind {
  Base,
  HardNameMask,
  GibberishName,
  EditDistanceNearMiss,
  RemoveLabel,
  StripDiacritics,
  InitialsForm,
  NameOrderInversion,
  CasePunctPerturb,
  AuthorPositionShift,
  UnicodeNormalizationStress,
};

inline constexpr std::array<AblationKind, 11> kAllAblations{
    AblationKind::Base,           AblationKind::HardNameMask,       AblationKind::GibberishName,
    AblationKind::EditDistanceNearMiss, AblationKind::RemoveLabel, AblationKind::StripDiacritics,
    AblationKind::InitialsForm,   AblationKind::NameOrderInversion, AblationKind::CasePunctPerturb,
    AblationKind::AuthorPositionShift, AblationKind::UnicodeNormalizationStress,
};

inline const char* to_string(AblationKind k) {
  switch (k) {
    case AblationKind::Base: return "base";
    case AblationKind::HardNameMask: return "hard_name_mask";
    case AblationKind::GibberishName: return "gibberish_name";
    case AblationKind::EditDistanceNearMiss: return "edit_distance_near_miss";
    case AblationKind::RemoveLabel: return "remove_label";
    case AblationKind::StripDiacritics: return "strip_diacritics";
    case AblationKind::InitialsForm: return "initials_form";
    case AblationKind::NameOrderInversion: return "name_order_inversion";
    case AblationKind::CasePunctPerturb: return "case_punct_perturb";
    case AblationKind::AuthorPositionShift: return "author_position_shift";
    case AblationKind::UnicodeNormalizationStress: return "unicode_normalization_stress";
  }
  return "?";
}

inline AblationKind parse_ablation(std::string_view s) {
  for (auto k : kAllAblations)
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown ablation '" + std::string(s) + "'");
}

namespace detail {

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

/// Swaps the author string inside `t.text` and the `author` field together.
inline void replace_author(ProbeText& t, const std::string& replacement, std::string_view where) {
  if (t.author.empty() || t.text.find(t.author) == std::string::npos)
    throw TransformError("author string '" + t.author + "' not found in " + std::string(where));
  t.text = replace_all(t.text, t.author, replacement);
  t.author = replacement;
}

template <typename F>
void map_authors(ProbeBundle& b, bool include_query, F&& f) {
  if (include_query) replace_author(b.query, f(b.query.author), "query");
  for (Slot s : kSlots) replace_author(b[s], f(b[s].author), to_string(s));
}

inline std::vector<std::string> split_words(std::string_view name) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < name.size()) {
    while (i < name.size() && name[i] == ' ') ++i;
    std::size_t j = i;
    while (j < name.size() && name[j] != ' ') ++j;
    if (j > i) out.emplace_back(name.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string first_code_point(std::string_view word) {
  auto cps = utf8::decode(word);
  return cps.empty() ? std::string() : utf8::encode(cps.substr(0, 1));
}

}  // namespace detail

/// "Alice Dupont" -> "A. Dupont". Single-word names are left alone.
inline std::string initials_form(std::string_view name) {
  auto words = detail::split_words(name);
  if (words.size() < 2) return std::string(name);
  std::string out;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) out += detail::first_code_point(words[i]) + ". ";
  return out + words.back();
}

/// "Alice Dupont" -> "Dupont, Alice".
inline std::string name_order_inversion(std::string_view name) {
  auto words = detail::split_words(name);
  if (words.size() < 2) return std::string(name);
  std::string out = words.back() + ",";
  for (std::size_t i = 0; i + 1 < words.size(); ++i) out += " " + words[i];
  return out;
}

/// Casing chosen by `cycle % 3` (upper, lower, title), curly apostrophes
/// straightened, hyphens turned into spaces.
inline std::string case_punct(std::string_view name, std::uint64_t cycle) {
  std::string s = detail::replace_all(std::string(name), "’", "'");
  std::replace(s.begin(), s.end(), '-', ' ');
  switch (cycle % 3) {
    case 0: return unicode::to_upper(s);
    case 1: return unicode::to_lower(s);
    default: return unicode::to_title(s);
  }
}

inline std::string mask_token(Language l, std::uint64_t seed) {
  char digits[8];
  std::snprintf(digits, sizeof digits, "%03u", static_cast<unsigned>(seed % 1000));
  return std::string(l == Language::EN ? "AUTHOR_" : "AUTEUR_") + digits;
}

/// ID-XXXXXX tokens over [A-Z0-9], one per distinct author, all distinct.
inline std::map<std::string, std::string> gibberish_tokens(const std::set<std::string>& authors, std::uint64_t seed) {
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::map<std::string, std::string> out;
  std::set<std::string> used;
  for (const auto& a : authors) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(mix_seed(mix_seed(seed, fnv1a(a)), attempt));
      std::string tok = "ID-";
      for (int i = 0; i < 6; ++i) tok += kAlphabet[uniform_index(rng, kAlphabet.size())];
      if (used.insert(tok).second) {
        out[a] = tok;
        break;
      }
    }
  }
  return out;
}

/// Substitutes `distance` letters of `name` (never the first code point),
/// preserving case, until the Levenshtein distance to `name` is exactly `distance`.
inline std::string near_miss(std::string_view name, std::size_t distance, std::uint64_t seed) {
  const std::u32string orig = utf8::decode(name);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 1; i < orig.size(); ++i)
    if (unicode::is_letter(orig[i])) eligible.push_back(i);
  if (eligible.size() < distance)
    throw TransformError("name '" + std::string(name) + "' has too few letters for a distance-" +
                         std::to_string(distance) + " mutation");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    auto pos = eligible;
    for (std::size_t i = 0; i < distance; ++i) std::swap(pos[i], pos[i + uniform_index(rng, pos.size() - i)]);
    std::u32string mutated = orig;
    for (std::size_t i = 0; i < distance; ++i) {
      const char32_t old = mutated[pos[i]];
      const bool upper = unicode::is_upper(old);
      char32_t c;
      do {
        c = static_cast<char32_t>((upper ? U'A' : U'a') + uniform_index(rng, 26));
      } while (c == old);
      mutated[pos[i]] = c;
    }
    if (levenshtein(orig, mutated) == distance) return utf8::encode(mutated);
  }
  throw TransformError("could not build a distance-" + std::to_string(distance) + " mutation of '" +
                       std::string(name) + "'");
}

namespace detail {

inline void remove_labels(ProbeText& t) {
  for (std::string_view label : {"Author:", "Auteur :", "Auteur:"}) {
    std::size_t pos;
    while ((pos = t.text.find(label)) != std::string::npos) {
      std::size_t end = pos + label.size();
      while (end < t.text.size() && t.text[end] == ' ') ++end;
      t.text.erase(pos, end - pos);
    }
  }
}

/// Moves "<label> <author>." to the front of the text.
inline void shift_author_segment(ProbeText& t, Language lang, std::string_view where) {
  const std::string segment = author_label(lang) + " " + t.author + ".";
  const auto pos = t.text.find(segment);
  if (pos == std::string::npos)
    throw TransformError("author segment '" + segment + "' not found in " + std::string(where));
  std::string rest = t.text.substr(0, pos) + t.text.substr(pos + segment.size());
  while (!rest.empty() && rest.back() == ' ') rest.pop_back();
  t.text = rest.empty() ? segment : segment + " " + rest;
}

inline std::string narrow_nbsp_before_punct(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 16);
  for (char c : s) {
    if (c == ':' || c == ';' || c == '!') out += "\u202F";
    out += c;
  }
  return out;
}

}  // namespace detail

/// Applies one ablation. `seed` selects masks, tokens, mutation positions and
/// the casing cycle.
inline ProbeBundle apply_ablation(const ProbeBundle& base, AblationKind kind, std::uint64_t seed) {
  ProbeBundle b = base;
  switch (kind) {
    case AblationKind::Base:
      break;
    case AblationKind::HardNameMask: {
      const std::string mask = mask_token(b.language, seed);
      detail::map_authors(b, true, [&](const std::string&) { return mask; });
      break;
    }
    case AblationKind::GibberishName: {
      std::set<std::string> authors{b.query.author};
      for (Slot s : kSlots) authors.insert(b[s].author);
      const auto tokens = gibberish_tokens(authors, seed);
      detail::map_authors(b, true, [&](const std::string& a) { return tokens.at(a); });
      break;
    }
    case AblationKind::EditDistanceNearMiss: {
      const std::string truth = b.query.author;
      const std::pair<Slot, std::size_t> plan[] = {{Slot::C2a, 1}, {Slot::C2b, 2}, {Slot::C4, 3}};
      for (auto [slot, d] : plan)
        detail::replace_author(b[slot], near_miss(truth, d, mix_seed(seed, d)), to_string(slot));
      break;
    }
    case AblationKind::RemoveLabel:
      for (Slot s : kSlots) detail::remove_labels(b[s]);
      break;
    case AblationKind::StripDiacritics:
      for (ProbeText* t : {&b.query, &b.candidates[0], &b.candidates[1], &b.candidates[2], &b.candidates[3],
                           &b.candidates[4]}) {
        t->text = unicode::strip_diacritics(t->text);
        t->author = unicode::strip_diacritics(t->author);
        t->topic = unicode::strip_diacritics(t->topic);
      }
      break;
    case AblationKind::InitialsForm:
      detail::map_authors(b, true, [](const std::string& a) { return initials_form(a); });
      break;
    case AblationKind::NameOrderInversion:
      detail::map_authors(b, false, [](const std::string& a) { return name_order_inversion(a); });
      break;
    case AblationKind::CasePunctPerturb:
      detail::map_authors(b, false, [&](const std::string& a) { return case_punct(a, seed); });
      break;
    case AblationKind::AuthorPositionShift:
      for (Slot s : kSlots) detail::shift_author_segment(b[s], b.language, to_string(s));
      break;
    case AblationKind::UnicodeNormalizationStress:
      b.query.text = unicode::to_nfc(b.query.text);
      b.query.author = unicode::to_nfc(b.query.author);
      b.query.topic = unicode::to_nfc(b.query.topic);
      for (Slot s : kSlots) {
        auto& t = b[s];
        t.text = unicode::to_nfd(detail::narrow_nbsp_before_punct(t.text));
        t.author = unicode::to_nfd(t.author);
        t.topic = unicode::to_nfd(t.topic);
      }
      break;
  }
  return b;
}

}  // namespace raggs::diag

#pragma once

// Five-candidate probe bundles that isolate the proper-name signal.
//
//   C1  correct author, correct topic
//   C2a wrong author (impostor A), same topic
//   C2b wrong author (impostor B), same topic
//   C3  correct author, different topic
//   C4  wrong author, different topic

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "raggs/core/error.hpp"

namespace raggs::diag {

enum class Language { EN, FR };

inline const char* to_string(Language l) { return l == Language::EN ? "EN" : "FR"; }

inline Language parse_language(std::string_view s) {
  if (s == "EN" || s == "en") return Language::EN;
  if (s == "FR" || s == "fr") return Language::FR;
  throw InvalidInput("unknown language '" + std::string(s) + "'");
}

enum class Slot : std::size_t { C1 = 0, C2a = 1, C2b = 2, C3 = 3, C4 = 4 };
inline constexpr std::array<Slot, 5> kSlots{Slot::C1, Slot::C2a, Slot::C2b, Slot::C3, Slot::C4};

inline const char* to_string(Slot s) {
  static constexpr const char* kNames[] = {"C1", "C2a", "C2b", "C3", "C4"};
  return kNames[static_cast<std::size_t>(s)];
}

inline Slot parse_slot(std::string_view s) {
  for (Slot slot : kSlots)
    if (s == to_string(slot)) return slot;
  throw InvalidInput("unknown candidate slot '" + std::string(s) + "'");
}

/// A text together with the author and topic strings it mentions.
struct ProbeText {
  std::string text;
  std::string author;
  std::string topic;

  friend bool operator==(const ProbeText&, const ProbeText&) = default;
};

struct ProbeBundle {
  std::string query_id;
  Language language = Language::EN;
  ProbeText query;
  std::array<ProbeText, 5> candidates;

  ProbeText& operator[](Slot s) { return candidates[static_cast<std::size_t>(s)]; }
  const ProbeText& operator[](Slot s) const { return candidates[static_cast<std::size_t>(s)]; }

  friend bool operator==(const ProbeBundle&, const ProbeBundle&) = default;
};

/// Checks the author/topic pattern of a base (unablated) bundle.
inline void validate_structure(const ProbeBundle& b) {
  const auto& q = b.query;
  auto fail = [&](Slot s, const char* why) {
    throw InvalidInput("bundle '" + b.query_id + "' candidate " + to_string(s) + ": " + why);
  };
  if (b[Slot::C1].author != q.author || b[Slot::C1].topic != q.topic) fail(Slot::C1, "must match query author and topic");
  for (Slot s : {Slot::C2a, Slot::C2b}) {
    if (b[s].author == q.author) fail(s, "must carry a wrong author");
    if (b[s].topic != q.topic) fail(s, "must carry the query topic");
  }
  if (b[Slot::C3].author != q.author) fail(Slot::C3, "must carry the query author");
  if (b[Slot::C3].topic == q.topic) fail(Slot::C3, "must carry a different topic");
  if (b[Slot::C4].author == q.author || b[Slot::C4].topic == q.topic) fail(Slot::C4, "must differ in author and topic");
}

inline std::string author_label(Language l) { return l == Language::EN ? "Author:" : "Auteur :"; }

inline std::string query_template(Language l, std::string_view author, std::string_view topic) {
  if (l == Language::EN) return "Which works by " + std::string(author) + " on " + std::string(topic) + "?";
  return "Quels travaux de " + std::string(author) + " portent sur " + std::string(topic) + " ?";
}

inline std::string candidate_template(Language l, std::string_view author, std::string_view topic) {
  if (l == Language::EN) return "Research paper: '" + std::string(topic) + "'. Author: " + std::string(author) + ".";
  return "Article de recherche : « " + std::string(topic) + " ». Auteur : " + std::string(author) + ".";
}

struct BundleSpec {
  std::string query_id;
  Language language = Language::EN;
  std::string author;
  std::string topic;
  std::string impostor_a;
  std::string impostor_b;
  std::string other_author;
  std::string other_topic;
};

/// Builds a bundle from the canonical query/candidate templates.
inline ProbeBundle make_bundle(const BundleSpec& s) {
  ProbeBundle b;
  b.query_id = s.query_id;
  b.language = s.language;
  b.query = {query_template(s.language, s.author, s.topic), s.author, s.topic};
  auto cand = [&](const std::string& a, const std::string& t) {
    return ProbeText{candidate_template(s.language, a, t), a, t};
  };
  b[Slot::C1] = cand(s.author, s.topic);
  b[Slot::C2a] = cand(s.impostor_a, s.topic);
  b[Slot::C2b] = cand(s.impostor_b, s.topic);
  b[Slot::C3] = cand(s.author, s.other_topic);
  b[Slot::C4] = cand(s.other_author, s.other_topic);
  validate_structure(b);
  return b;
}

}  // namespace raggs::diag

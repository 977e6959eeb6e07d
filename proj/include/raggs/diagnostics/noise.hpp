#pragma once

// Conversational noise: deterministic template wrapping of a clean query.
//   level 0  unchanged
//   level 2  greeting + filler + query
//   level 4  greeting + apology/digression + filler + query + hedge
// Level 4 reuses the level-2 greeting and filler for the same seed, so it is
// always strictly longer.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "raggs/core/error.hpp"
#include "raggs/core/rng.hpp"
#include "raggs/diagnostics/bundle.hpp"

namespace raggs::diag {

struct NoiseBank {
  std::array<std::string_view, 8> greetings;
  std::array<std::string_view, 8> fillers;
  std::array<std::string_view, 8> digressions;
  std::array<std::string_view, 8> hedges;
};

inline const NoiseBank& noise_bank(Language l) {
  static const NoiseBank en{
      {"Hi!", "Hello!", "Hey!", "Hi there!", "Hey there!", "Good morning!", "Hello there!", "Greetings!"},
      {"Quick question:", "I was wondering:", "Just curious:", "Random thought:", "Out of curiosity:",
       "Question for you:", "Something I keep asking myself:", "Here is what I want to know:"},
      {"Sorry for the kinda random question, I'm on the train...", "Apologies if this is a silly one...",
       "Sorry to bother you, my coffee hasn't kicked in yet...", "Excuse the rambling, long day at work...",
       "Sorry, this might be off topic, I was just chatting with a friend...",
       "Forgive me if this was asked before, I'm new here...", "Sorry, typing this on my phone...",
       "Apologies in advance, I'm a bit lost with all this..."},
      {"Or is that a myth?", "Not sure if that makes sense.", "Thanks in advance!", "Or am I way off?",
       "Maybe I'm overthinking it.", "Any pointers welcome!", "Just asking, no pressure.", "Hope that's clear!"},
  };
  static const NoiseBank fr{
      {"Salut !", "Bonjour !", "Coucou !", "Bonsoir !", "Hello !", "Salut à tous !", "Bonjour à vous !", "Hey !"},
      {"Petite question :", "Je me demandais :", "Par curiosité :", "Question rapide :", "Juste pour savoir :",
       "Une question en passant :", "Dites-moi :", "Voilà ce que je cherche :"},
      {"Désolé pour la question un peu au hasard, je suis dans le train...", "Pardon si c'est une question bête...",
       "Désolé de déranger, mon café ne fait pas encore effet...", "Excusez le blabla, longue journée au boulot...",
       "Pardon, c'est peut-être hors sujet, j'en parlais avec un ami...",
       "Désolé si ça a déjà été demandé, je débute...", "Pardon, j'écris depuis mon téléphone...",
       "Désolé d'avance, je suis un peu perdu avec tout ça..."},
      {"Ou c'est un mythe ?", "Je ne sais pas si c'est clair.", "Merci d'avance !", "Ou je me trompe complètement ?",
       "Je me prends peut-être la tête.", "Toute piste est la bienvenue !", "Je demande juste, sans pression.",
       "J'espère que c'est clair !"},
  };
  return l == Language::EN ? en : fr;
}

inline std::string inject_noise(std::string_view query, int level, Language lang, std::uint64_t seed) {
  if (level != 0 && level != 2 && level != 4) throw InvalidInput("noise level must be 0, 2 or 4");
  if (level == 0) return std::string(query);
  const auto& bank = noise_bank(lang);
  Rng rng(mix_seed(seed, lang == Language::EN ? 0x454e : 0x4652));
  const auto greeting = bank.greetings[uniform_index(rng, 8)];
  const auto filler = bank.fillers[uniform_index(rng, 8)];
  const auto digression = bank.digressions[uniform_index(rng, 8)];
  const auto hedge = bank.hedges[uniform_index(rng, 8)];
  std::string out(greeting);
  if (level == 4) out += " " + std::string(digression);
  out += " " + std::string(filler) + " " + std::string(query);
  if (level == 4) out += " " + std::string(hedge);
  return out;
}

}  // namespace raggs::diag

// Copyright 2026 The infostat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infostat/corpus.hpp"

#include <array>
#include <cstdio>
#include <set>
#include <string_view>

#include "infostat/errors.hpp"
#include "infostat/rng.hpp"
#include "infostat/text.hpp"

namespace infostat {
namespace {

constexpr std::array<std::string_view, 6> kDeterminers = {
    "a", "the", "some", "this", "that", "one"};

constexpr std::array<std::string_view, 20> kAdjectives = {
    "red",   "old",    "small", "large",  "quiet", "bright", "local",
    "young", "famous", "rural", "modern", "broken", "green", "heavy",
    "rich",  "poor",   "early", "late",   "public", "private"};

constexpr std::array<std::string_view, 48> kNouns = {
    "farmer",  "car",     "reader",  "price",    "bank",    "river",
    "school",  "doctor",  "company", "law",      "market",  "village",
    "teacher", "report",  "plan",    "bridge",   "station", "letter",
    "family",  "city",    "garden",  "minister", "factory", "road",
    "book",    "painter", "ship",    "court",    "harvest", "museum",
    "program", "contract", "island", "engine",   "festival", "student",
    "budget",  "hospital", "machine", "election", "union",  "library",
    "theater", "tower",   "border",  "musician", "journal", "lake"};

constexpr std::array<std::string_view, 3> kPossessives = {"his", "her", "their"};
constexpr std::array<std::string_view, 2> kComparatives = {"another", "further"};

constexpr std::array<std::string_view, 14> kFillers = {
    "saw",    "met",  "near", "with",   "found",  "after", "before",
    "visited", "left", "joined", "beside", "praised", "about", "over"};

constexpr std::string_view kCue = "again";

enum class Kind { kPlain, kPossessive, kAggregate, kComparative };

template <std::size_t N>
std::string_view pick(SplitMix64& rng, const std::array<std::string_view, N>& pool) {
  return pool[rng.below(N)];
}

std::vector<std::string> plain_phrase(SplitMix64& rng, bool allow_adjective) {
  std::vector<std::string> out;
  out.emplace_back(pick(rng, kDeterminers));
  if (allow_adjective && rng.uniform() < 0.4) out.emplace_back(pick(rng, kAdjectives));
  out.emplace_back(pick(rng, kNouns));
  return out;
}

std::vector<std::string> phrase_of_kind(SplitMix64& rng, Kind kind) {
  std::vector<std::string> out;
  switch (kind) {
    case Kind::kPlain:
      return plain_phrase(rng, true);
    case Kind::kPossessive:
      out.emplace_back(pick(rng, kPossessives));
      break;
    case Kind::kComparative:
      out.emplace_back(pick(rng, kComparatives));
      break;
    case Kind::kAggregate: {
      out = plain_phrase(rng, false);
      out.emplace_back("and");
      auto second = plain_phrase(rng, false);
      out.insert(out.end(), second.begin(), second.end());
      return out;
    }
  }
  if (rng.uniform() < 0.4) out.emplace_back(pick(rng, kAdjectives));
  out.emplace_back(pick(rng, kNouns));
  return out;
}

Kind draw_kind(SplitMix64& rng) {
  const double u = rng.uniform();
  if (u < 0.70) return Kind::kPlain;
  if (u < 0.80) return Kind::kPossessive;
  if (u < 0.90) return Kind::kAggregate;
  return Kind::kComparative;
}

bool in_set(std::string_view folded, std::initializer_list<std::string_view> set) {
  for (auto s : set) {
    if (folded == s) return true;
  }
  return false;
}

}  // namespace

ISLabel synthetic_rule_label(const Document& doc, const Mention& mention) {
  const auto tokens = doc.mention_tokens(mention);
  const std::string text = normalized_join(tokens);
  for (const Mention& other : doc.mentions) {
    if (other.sentence_index < mention.sentence_index &&
        normalized_join(doc.mention_tokens(other)) == text) {
      return ISLabel::kOld;
    }
  }
  const std::string first = case_fold(tokens.front());
  if (in_set(first, {"his", "her", "their"})) return ISLabel::kSyntactic;
  for (const auto& t : tokens) {
    if (case_fold(t) == "and") return ISLabel::kAggregate;
  }
  if (in_set(first, {"another", "further"})) return ISLabel::kComparative;
  return ISLabel::kNew;
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_docs < 1 || spec.sentences_per_doc < 1 ||
      spec.mentions_per_sentence < 1) {
    throw InputError("generate_synthetic: all sizes must be >= 1");
  }
  SplitMix64 rng(spec.seed);
  Corpus corpus;
  corpus.documents.reserve(spec.n_docs);
  for (int d = 0; d < spec.n_docs; ++d) {
    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "doc%04d", d);
    doc.id = id;
    // Surface strings of earlier plain mentions, candidates for repetition.
    std::vector<std::vector<std::string>> earlier_plain;
    std::vector<std::vector<std::string>> current_plain;
    std::set<std::string> earlier_text;
    std::vector<std::string> current_text;
    for (int s = 0; s < spec.sentences_per_doc; ++s) {
      const bool repeats = s > 0 && !earlier_plain.empty() && rng.coin();
      const bool cue = rng.uniform() < (repeats ? 0.85 : 0.15);
      const int cue_slot =
          cue ? static_cast<int>(rng.below(spec.mentions_per_sentence + 1)) : -1;

      Sentence sentence;
      sentence.index = s;
      auto push = [&sentence](std::string_view text) {
        sentence.tokens.push_back(
            Token{std::string(text), static_cast<int>(sentence.tokens.size())});
      };
      current_plain.clear();
      current_text.clear();
      for (int j = 0; j < spec.mentions_per_sentence; ++j) {
        if (j == cue_slot) push(kCue);
        const int fillers = 1 + static_cast<int>(rng.below(2));
        for (int f = 0; f < fillers; ++f) push(pick(rng, kFillers));

        const Kind kind = draw_kind(rng);
        std::vector<std::string> phrase;
        if (kind == Kind::kPlain && repeats) {
          phrase = earlier_plain[rng.below(earlier_plain.size())];
        } else {
          phrase = phrase_of_kind(rng, kind);
          // Mediated phrases never accidentally repeat earlier strings, so
          // rule (a) cannot shadow rules (b)-(d).
          while (kind != Kind::kPlain && earlier_text.count(normalized_join(phrase))) {
            phrase = phrase_of_kind(rng, kind);
          }
        }
        current_text.push_back(normalized_join(phrase));
        if (kind == Kind::kPlain) current_plain.push_back(phrase);

        Mention m;
        m.id = "m" + std::to_string(s) + "_" + std::to_string(j);
        m.sentence_index = s;
        m.start = sentence.size();
        for (const auto& t : phrase) push(t);
        m.end = sentence.size();
        m.head_index = m.end - 1;
        doc.mentions.push_back(std::move(m));
      }
      if (cue_slot == spec.mentions_per_sentence) push(kCue);
      push(".");
      doc.sentences.push_back(std::move(sentence));
      earlier_plain.insert(earlier_plain.end(), current_plain.begin(),
                           current_plain.end());
      earlier_text.insert(current_text.begin(), current_text.end());
    }
    for (Mention& m : doc.mentions) m.label = synthetic_rule_label(doc, m);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace infostat

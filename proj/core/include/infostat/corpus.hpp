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

#ifndef INFOSTAT_CORPUS_HPP_
#define INFOSTAT_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infostat/labels.hpp"

namespace infostat {

struct Token {
  std::string text;
  int index = 0;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  int index = 0;
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

// A labeled noun-phrase span. `end` is exclusive; `head_index` is a sentence
// offset inside [start, end). Mentions may nest or overlap.
struct Mention {
  std::string id;
  int sentence_index = 0;
  int start = 0;
  int end = 0;
  int head_index = 0;
  std::optional<ISLabel> label;

  int length() const { return end - start; }
  bool operator==(const Mention&) const = default;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Mention> mentions;

  // Surface tokens of a mention span.
  std::vector<std::string> mention_tokens(const Mention& m) const;
  const std::string& head_token(const Mention& m) const;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t mention_count() const;
  bool operator==(const Corpus&) const = default;
};

struct LoadOptions {
  // When a mention has no head_index, use the last token of its span.
  // Off by default: heads are expected in the input.
  bool head_fallback = false;
};

// Parse and validate the JSON exchange format. Throws CorpusError naming the
// offending document and mention. Mentions come back sorted by
// (sentence_index, start, end), stable for ties.
Corpus parse_corpus(std::string_view json_text, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path,
                   const LoadOptions& options = {});

// Canonical serialization (2-space indented JSON, trailing newline).
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Re-checks every structural invariant; throws CorpusError.
void validate_corpus(const Corpus& corpus);

struct LabelCount {
  std::size_t count = 0;
  double fraction = 0.0;
};

struct CorpusStats {
  std::size_t total = 0;
  std::array<LabelCount, kNumLabels> per_label{};

  const LabelCount& operator[](ISLabel label) const {
    return per_label[label_index(label)];
  }
};

// Label histogram. Throws CorpusError on an unlabeled mention.
CorpusStats corpus_stats(const Corpus& corpus);

struct SyntheticSpec {
  std::uint64_t seed = 1;
  int n_docs = 10;
  int sentences_per_doc = 8;
  int mentions_per_sentence = 4;
};

// Deterministic synthetic corpus whose labels follow fixed surface rules:
//   (a) full string repeats a mention of an earlier sentence  -> old
//   (b) first token in {his, her, their}                       -> m/syntactic
//   (c) contains the token "and"                               -> m/aggregate
//   (d) first token in {another, further}                      -> m/comparative
//   (e) otherwise                                              -> new
// Rules apply in that order. Sentences that re-use earlier mentions usually
// carry the cue word "again"; other sentences rarely do. So the local sentence
// is informative but not decisive for `old`, and only the previous context
// decides it. Possessive, coordinated and comparative phrases never repeat an
// earlier string, so (a) does not shadow (b)-(d).
Corpus generate_synthetic(const SyntheticSpec& spec);

// The rule cascade above applied to one mention. Shared by the generator and
// exposed so callers can inspect it; the tests re-derive it independently.
ISLabel synthetic_rule_label(const Document& doc, const Mention& mention);

}  // namespace infostat

#endif  // INFOSTAT_CORPUS_HPP_

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

#ifndef INFOSTAT_CONTEXT_HPP_
#define INFOSTAT_CONTEXT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infostat/corpus.hpp"

namespace infostat {

// Reserved surface forms. Their vocabulary ids are their positions here.
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kIsToken = "[IS]";
inline constexpr std::string_view kDelimToken = "[DELIM]";
inline constexpr std::string_view kStrMatchToken = "[STR+]";
inline constexpr std::string_view kStrNoMatchToken = "[STR-]";
inline constexpr std::string_view kHeadMatchToken = "[HEAD+]";
inline constexpr std::string_view kHeadNoMatchToken = "[HEAD-]";

inline constexpr std::array<std::string_view, 8> kReservedTokens = {
    kPadToken,      kUnkToken,         kIsToken,        kDelimToken,
    kStrMatchToken, kStrNoMatchToken,  kHeadMatchToken, kHeadNoMatchToken,
};

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;

bool is_reserved_token(std::string_view token);

struct OverlapInfo {
  bool same_string = false;
  bool same_head = false;

  bool operator==(const OverlapInfo&) const = default;
};

// Case-folded string / head match against mentions of strictly earlier
// sentences. Mentions of the target's own sentence are not consulted.
OverlapInfo compute_overlap(const Mention& mention, const Document& document);

enum class ContextKind {
  kMentionOnly,          // "mention-only": mention tokens + [IS]
  kLocalContext,         // "context1": + local sentence and [DELIM]
  kLocalContextOverlap,  // "context2": + two overlap tokens up front
};

struct ContextMode {
  ContextKind kind = ContextKind::kLocalContextOverlap;
  // Extra preceding sentences prepended to the local sentence. Ignored for
  // kMentionOnly.
  int prev_sentence_window = 0;

  bool has_context() const { return kind != ContextKind::kMentionOnly; }
  bool has_overlap() const { return kind == ContextKind::kLocalContextOverlap; }
  bool operator==(const ContextMode&) const = default;
};

// CLI spelling: mention-only | context1 | context2.
std::string_view context_kind_name(ContextKind kind);
ContextKind parse_context_kind(std::string_view name);

struct PseudoSentence {
  std::vector<std::string> surface_tokens;
  // 0 for overlap + context tokens, 1 for [DELIM], mention and [IS].
  std::vector<int> segment_tags;
  int is_index = 0;
  std::optional<int> delimiter_index;
  // Mention tokens were dropped to fit max_len.
  bool truncated = false;
  // Context tokens were dropped to fit max_len.
  bool context_truncated = false;

  int size() const { return static_cast<int>(surface_tokens.size()); }
};

// Number of reserved tokens the layout adds around the mention for `mode`.
int reserved_token_count(const ContextMode& mode);

// Layout: [overlap x2] [context] [DELIM] mention [IS], parts present per
// mode. Context is cut from the front to fit max_len; if even the mention
// does not fit, its trailing tokens go and `truncated` is set. Throws
// InputError when max_len cannot hold the reserved tokens plus one mention
// token.
PseudoSentence build_pseudo_sentence(const Mention& mention,
                                     const Document& document,
                                     const ContextMode& mode, int max_len);

class Vocab {
 public:
  // Reserved tokens only.
  Vocab();

  // Ids are line numbers; the first eight lines must be the reserved tokens.
  static Vocab from_tokens(std::vector<std::string> tokens);
  static Vocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  // One token per line, '\n' terminated. Exactly the file contents.
  std::string serialize() const;
  // FNV-1a of serialize(), as 16 hex digits.
  std::string fingerprint() const;

  int size() const { return static_cast<int>(tokens_.size()); }
  // Reserved tokens match verbatim; anything else is case-folded first.
  int id(std::string_view token) const;
  std::optional<int> find(std::string_view folded) const;
  const std::string& token(int id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Reserved tokens, then case-folded tokens with count >= min_freq over all
// pseudo sentences of the corpus, by descending count then byte order.
Vocab build_vocab(const Corpus& corpus, const ContextMode& mode, int max_len,
                  int min_freq);

struct EncodedInput {
  std::vector<int> ids;
  std::vector<int> attention_mask;
  std::vector<int> segment_ids;
  int is_index = 0;
};

// Right-pads to max_len. Throws InputError when ps is longer than max_len.
EncodedInput encode(const PseudoSentence& ps, const Vocab& vocab, int max_len);

// One JSON object per line for debugging the builder.
std::string pseudo_sentence_json(const std::string& mention_id,
                                 const PseudoSentence& ps);

}  // namespace infostat

#endif  // INFOSTAT_CONTEXT_HPP_

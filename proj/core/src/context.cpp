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

#include "infostat/context.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "infostat/errors.hpp"
#include "infostat/text.hpp"

namespace infostat {

bool is_reserved_token(std::string_view token) {
  return std::find(kReservedTokens.begin(), kReservedTokens.end(), token) !=
         kReservedTokens.end();
}

OverlapInfo compute_overlap(const Mention& mention, const Document& document) {
  OverlapInfo info;
  const std::string text = normalized_join(document.mention_tokens(mention));
  const std::string head = case_fold(document.head_token(mention));
  for (const Mention& other : document.mentions) {
    if (other.sentence_index >= mention.sentence_index) continue;
    if (!info.same_string &&
        normalized_join(document.mention_tokens(other)) == text) {
      info.same_string = true;
    }
    if (!info.same_head && case_fold(document.head_token(other)) == head) {
      info.same_head = true;
    }
    if (info.same_string && info.same_head) break;
  }
  return info;
}

std::string_view context_kind_name(ContextKind kind) {
  switch (kind) {
    case ContextKind::kMentionOnly:
      return "mention-only";
    case ContextKind::kLocalContext:
      return "context1";
    case ContextKind::kLocalContextOverlap:
      return "context2";
  }
  return "context2";
}

ContextKind parse_context_kind(std::string_view name) {
  if (name == "mention-only") return ContextKind::kMentionOnly;
  if (name == "context1") return ContextKind::kLocalContext;
  if (name == "context2") return ContextKind::kLocalContextOverlap;
  throw InputError("unknown mode \"" + std::string(name) +
                   "\" (expected mention-only, context1 or context2)");
}

int reserved_token_count(const ContextMode& mode) {
  return (mode.has_overlap() ? 2 : 0) + (mode.has_context() ? 1 : 0) + 1;
}

PseudoSentence build_pseudo_sentence(const Mention& mention,
                                     const Document& document,
                                     const ContextMode& mode, int max_len) {
  const int reserved = reserved_token_count(mode);
  if (max_len < reserved + 1) {
    throw InputError("max_len " + std::to_string(max_len) +
                     " leaves no room for the mention (needs >= " +
                     std::to_string(reserved + 1) + ")");
  }
  PseudoSentence ps;

  std::vector<std::string> mention_tokens = document.mention_tokens(mention);
  const int mention_budget = max_len - reserved;
  if (static_cast<int>(mention_tokens.size()) > mention_budget) {
    mention_tokens.resize(mention_budget);
    ps.truncated = true;
  }

  std::vector<std::string> context;
  if (mode.has_context()) {
    const int first =
        std::max(0, mention.sentence_index - std::max(0, mode.prev_sentence_window));
    for (int s = first; s <= mention.sentence_index; ++s) {
      for (const Token& t : document.sentences.at(s).tokens) {
        context.push_back(t.text);
      }
    }
    const int context_budget =
        max_len - reserved - static_cast<int>(mention_tokens.size());
    if (static_cast<int>(context.size()) > context_budget) {
      context.erase(context.begin(), context.end() - context_budget);
      ps.context_truncated = true;
    }
  }

  const std::size_t total = reserved + context.size() + mention_tokens.size();
  ps.surface_tokens.reserve(total);
  ps.segment_tags.reserve(total);
  auto push = [&ps](std::string token, int segment) {
    ps.surface_tokens.push_back(std::move(token));
    ps.segment_tags.push_back(segment);
  };

  if (mode.has_overlap()) {
    const OverlapInfo overlap = compute_overlap(mention, document);
    push(std::string(overlap.same_string ? kStrMatchToken : kStrNoMatchToken), 0);
    push(std::string(overlap.same_head ? kHeadMatchToken : kHeadNoMatchToken), 0);
  }
  for (auto& t : context) push(std::move(t), 0);
  if (mode.has_context()) {
    ps.delimiter_index = ps.size();
    push(std::string(kDelimToken), 1);
  }
  for (auto& t : mention_tokens) push(std::move(t), 1);
  ps.is_index = ps.size();
  push(std::string(kIsToken), 1);
  return ps;
}

EncodedInput encode(const PseudoSentence& ps, const Vocab& vocab, int max_len) {
  if (ps.size() > max_len) {
    throw InputError("pseudo sentence of " + std::to_string(ps.size()) +
                     " tokens exceeds max_len " + std::to_string(max_len));
  }
  EncodedInput enc;
  enc.ids.assign(max_len, kPadId);
  enc.attention_mask.assign(max_len, 0);
  enc.segment_ids.assign(max_len, 0);
  for (int i = 0; i < ps.size(); ++i) {
    enc.ids[i] = vocab.id(ps.surface_tokens[i]);
    enc.attention_mask[i] = 1;
    enc.segment_ids[i] = ps.segment_tags[i];
  }
  enc.is_index = ps.is_index;
  return enc;
}

std::string pseudo_sentence_json(const std::string& mention_id,
                                 const PseudoSentence& ps) {
  nlohmann::ordered_json j;
  j["mention_id"] = mention_id;
  j["tokens"] = ps.surface_tokens;
  j["segments"] = ps.segment_tags;
  j["is_index"] = ps.is_index;
  j["truncated"] = ps.truncated;
  return j.dump();
}

}  // namespace infostat

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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "infostat/context.hpp"
#include "infostat/errors.hpp"
#include "infostat/rng.hpp"
#include "infostat/text.hpp"

namespace infostat {

Vocab::Vocab() {
  for (auto t : kReservedTokens) tokens_.emplace_back(t);
  index();
}

void Vocab::index() {
  ids_.clear();
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw InputError("vocabulary token \"" + tokens_[i] + "\" appears twice");
    }
  }
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kReservedTokens.size()) {
    throw InputError("vocabulary is missing reserved tokens");
  }
  for (std::size_t i = 0; i < kReservedTokens.size(); ++i) {
    if (tokens[i] != kReservedTokens[i]) {
      throw InputError("vocabulary line " + std::to_string(i + 1) +
                       " must be " + std::string(kReservedTokens[i]));
    }
  }
  for (const auto& t : tokens) {
    if (t.empty() || t.find('\n') != std::string::npos) {
      throw InputError("vocabulary tokens must be non-empty single lines");
    }
  }
  Vocab v;
  v.tokens_ = std::move(tokens);
  v.index();
  return v;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

std::string Vocab::serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << serialize();
}

std::string Vocab::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize())));
  return buf;
}

std::optional<int> Vocab::find(std::string_view folded) const {
  auto it = ids_.find(std::string(folded));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocab::id(std::string_view token) const {
  if (is_reserved_token(token)) return *find(token);
  // Reserved forms are upper-case with brackets, so a folded corpus token can
  // never collide with them.
  return find(case_fold(token)).value_or(kUnkId);
}

Vocab build_vocab(const Corpus& corpus, const ContextMode& mode, int max_len,
                  int min_freq) {
  if (min_freq < 1) throw InputError("min_freq must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const Document& doc : corpus.documents) {
    for (const Mention& m : doc.mentions) {
      const PseudoSentence ps = build_pseudo_sentence(m, doc, mode, max_len);
      for (const auto& t : ps.surface_tokens) {
        if (is_reserved_token(t)) continue;
        ++counts[case_fold(t)];
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= static_cast<std::size_t>(min_freq)) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // map order already breaks ties by bytes
  });
  std::vector<std::string> tokens(kReservedTokens.begin(), kReservedTokens.end());
  for (auto& [token, count] : kept) tokens.push_back(std::move(token));
  return Vocab::from_tokens(std::move(tokens));
}

}  // namespace infostat

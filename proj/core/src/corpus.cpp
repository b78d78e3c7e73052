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

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "infostat/context.hpp"
#include "infostat/errors.hpp"
#include "infostat/text.hpp"

namespace infostat {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& doc_id, const std::string& mention_id,
                       const std::string& what) {
  std::string msg = "document \"" + doc_id + "\"";
  if (!mention_id.empty()) msg += ", mention \"" + mention_id + "\"";
  throw CorpusError(msg + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& doc_id,
                  const std::string& mention_id) {
  if (!obj.is_object()) fail(doc_id, mention_id, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(doc_id, mention_id, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

int int_field(const json& obj, const char* key, const std::string& doc_id,
              const std::string& mention_id) {
  const json& v = field(obj, key, doc_id, mention_id);
  if (!v.is_number_integer()) {
    fail(doc_id, mention_id, std::string("field \"") + key + "\" must be an integer");
  }
  const auto value = v.get<std::int64_t>();
  if (value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max()) {
    fail(doc_id, mention_id, std::string("field \"") + key + "\" out of range");
  }
  return static_cast<int>(value);
}

Mention parse_mention(const json& j, const Document& doc, std::size_t ordinal,
                      const LoadOptions& options) {
  Mention m;
  // The id is needed to label every later error.
  if (j.is_object() && j.contains("id") && j["id"].is_string()) {
    m.id = j["id"].get<std::string>();
  } else {
    fail(doc.id, "#" + std::to_string(ordinal), "mention needs a string \"id\"");
  }
  m.sentence_index = int_field(j, "sentence_index", doc.id, m.id);
  m.start = int_field(j, "start", doc.id, m.id);
  m.end = int_field(j, "end", doc.id, m.id);
  auto head = j.find("head_index");
  if (head == j.end() || head->is_null()) {
    if (!options.head_fallback) fail(doc.id, m.id, "missing field \"head_index\"");
    m.head_index = m.end - 1;
  } else {
    m.head_index = int_field(j, "head_index", doc.id, m.id);
  }
  auto label = j.find("label");
  if (label != j.end() && !label->is_null()) {
    if (!label->is_string()) fail(doc.id, m.id, "label must be a string or null");
    try {
      m.label = parse_label(label->get<std::string>());
    } catch (const InputError& e) {
      fail(doc.id, m.id, e.what());
    }
  }
  return m;
}

void validate_document(const Document& doc) {
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const Sentence& sentence = doc.sentences[s];
    if (sentence.index != static_cast<int>(s)) {
      fail(doc.id, "", "sentence " + std::to_string(s) + " has index " +
                           std::to_string(sentence.index));
    }
    if (sentence.tokens.empty()) {
      fail(doc.id, "", "sentence " + std::to_string(s) + " has no tokens");
    }
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      const Token& token = sentence.tokens[t];
      const std::string where =
          "sentence " + std::to_string(s) + " token " + std::to_string(t);
      if (token.index != static_cast<int>(t)) fail(doc.id, "", where + ": bad index");
      if (token.text.empty()) fail(doc.id, "", where + ": empty token");
      if (has_whitespace(token.text)) {
        fail(doc.id, "", where + ": token contains whitespace");
      }
      if (is_reserved_token(token.text)) {
        fail(doc.id, "", where + ": reserved token \"" + token.text + "\" in text");
      }
    }
  }
  std::set<std::string> ids;
  for (const Mention& m : doc.mentions) {
    if (m.id.empty()) fail(doc.id, m.id, "empty mention id");
    if (!ids.insert(m.id).second) fail(doc.id, m.id, "duplicate mention id");
    if (m.sentence_index < 0 ||
        m.sentence_index >= static_cast<int>(doc.sentences.size())) {
      fail(doc.id, m.id, "sentence_index out of range");
    }
    const int len = doc.sentences[m.sentence_index].size();
    if (m.start < 0 || m.start >= m.end || m.end > len) {
      fail(doc.id, m.id, "span [" + std::to_string(m.start) + ", " +
                             std::to_string(m.end) + ") out of bounds");
    }
    if (m.head_index < m.start || m.head_index >= m.end) {
      fail(doc.id, m.id, "head outside span");
    }
  }
}

}  // namespace

std::vector<std::string> Document::mention_tokens(const Mention& m) const {
  const auto& tokens = sentences.at(m.sentence_index).tokens;
  std::vector<std::string> out;
  out.reserve(m.length());
  for (int i = m.start; i < m.end; ++i) out.push_back(tokens.at(i).text);
  return out;
}

const std::string& Document::head_token(const Mention& m) const {
  return sentences.at(m.sentence_index).tokens.at(m.head_index).text;
}

std::size_t Corpus::mention_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.mentions.size();
  return n;
}

void validate_corpus(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const Document& doc : corpus.documents) {
    if (!ids.insert(doc.id).second) fail(doc.id, "", "duplicate document id");
    validate_document(doc);
  }
}

Corpus parse_corpus(std::string_view json_text, const LoadOptions& options) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CorpusError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("documents") ||
      !root["documents"].is_array()) {
    throw CorpusError("malformed corpus: expected {\"documents\": [...]}");
  }
  Corpus corpus;
  std::size_t ordinal = 0;
  for (const json& jd : root["documents"]) {
    Document doc;
    const std::string fallback_id = "#" + std::to_string(ordinal++);
    if (!jd.is_object() || !jd.contains("id") || !jd["id"].is_string()) {
      fail(fallback_id, "", "document needs a string \"id\"");
    }
    doc.id = jd["id"].get<std::string>();
    const json& sentences = field(jd, "sentences", doc.id, "");
    if (!sentences.is_array()) fail(doc.id, "", "\"sentences\" must be an array");
    for (const json& js : sentences) {
      Sentence sentence;
      sentence.index = int_field(js, "index", doc.id, "");
      const json& tokens = field(js, "tokens", doc.id, "");
      if (!tokens.is_array()) fail(doc.id, "", "\"tokens\" must be an array");
      int t = 0;
      for (const json& jt : tokens) {
        if (!jt.is_string()) fail(doc.id, "", "tokens must be strings");
        sentence.tokens.push_back(Token{jt.get<std::string>(), t++});
      }
      doc.sentences.push_back(std::move(sentence));
    }
    const json& mentions = field(jd, "mentions", doc.id, "");
    if (!mentions.is_array()) fail(doc.id, "", "\"mentions\" must be an array");
    std::size_t m_ordinal = 0;
    for (const json& jm : mentions) {
      doc.mentions.push_back(parse_mention(jm, doc, m_ordinal++, options));
    }
    std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                     [](const Mention& a, const Mention& b) {
                       return std::tie(a.sentence_index, a.start, a.end) <
                              std::tie(b.sentence_index, b.start, b.end);
                     });
    corpus.documents.push_back(std::move(doc));
  }
  validate_corpus(corpus);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path,
                   const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), options);
}

std::string serialize_corpus(const Corpus& corpus) {
  ordered_json documents = ordered_json::array();
  for (const Document& doc : corpus.documents) {
    ordered_json jd;
    jd["id"] = doc.id;
    ordered_json sentences = ordered_json::array();
    for (const Sentence& s : doc.sentences) {
      ordered_json tokens = ordered_json::array();
      for (const Token& t : s.tokens) tokens.push_back(t.text);
      sentences.push_back(ordered_json{{"index", s.index}, {"tokens", tokens}});
    }
    jd["sentences"] = std::move(sentences);
    ordered_json mentions = ordered_json::array();
    for (const Mention& m : doc.mentions) {
      ordered_json jm;
      jm["id"] = m.id;
      jm["sentence_index"] = m.sentence_index;
      jm["start"] = m.start;
      jm["end"] = m.end;
      jm["head_index"] = m.head_index;
      if (m.label) {
        jm["label"] = std::string(label_name(*m.label));
      } else {
        jm["label"] = nullptr;
      }
      mentions.push_back(std::move(jm));
    }
    jd["mentions"] = std::move(mentions);
    documents.push_back(std::move(jd));
  }
  ordered_json root;
  root["documents"] = std::move(documents);
  return root.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << serialize_corpus(corpus);
  if (!out) throw InputError("write failed: " + path.string());
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const Document& doc : corpus.documents) {
    for (const Mention& m : doc.mentions) {
      if (!m.label) fail(doc.id, m.id, "unlabeled mention");
      ++stats.per_label[label_index(*m.label)].count;
      ++stats.total;
    }
  }
  if (stats.total > 0) {
    for (auto& entry : stats.per_label) {
      entry.fraction =
          static_cast<double>(entry.count) / static_cast<double>(stats.total);
    }
  }
  return stats;
}

}  // namespace infostat

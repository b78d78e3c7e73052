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
#include <set>

#include "doctest.h"
#include "infostat/crossval.hpp"
#include "infostat/errors.hpp"
#include "test_util.hpp"

namespace infostat {
namespace {

CrossValConfig tiny_cv(int k = 3) {
  CrossValConfig cv;
  cv.mode = {ContextKind::kLocalContextOverlap, 0};
  cv.model = testing::small_config(1, 8, 2, 16, 40);
  cv.train.epochs = 1;
  cv.train.batch_size = 8;
  cv.k = k;
  cv.seed = 4;
  return cv;
}

Corpus cv_corpus(int n_docs = 6) {
  return generate_synthetic({.seed = 11, .n_docs = n_docs, .sentences_per_doc = 3,
                             .mentions_per_sentence = 2});
}

TEST_CASE("pooled report matches a recount of the held-out predictions") {
  const Corpus corpus = cv_corpus();
  const CrossValResult r = run_cross_validation(corpus, tiny_cv());
  const auto records = r.pooled_predictions();
  CHECK(records.size() == corpus.mention_count());

  std::set<std::pair<std::string, std::string>> seen;
  std::size_t correct = 0;
  ConfusionMatrix confusion{};
  for (const auto& rec : records) {
    CHECK(seen.insert({rec.document_id, rec.mention_id}).second);
    REQUIRE(rec.gold.has_value());
    correct += *rec.gold == rec.pred;
    ++confusion[label_index(*rec.gold)][label_index(rec.pred)];
  }
  CHECK(r.pooled.n == records.size());
  CHECK(r.pooled.accuracy == doctest::Approx(double(correct) / records.size()));
  CHECK(r.pooled.confusion == confusion);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::size_t support = 0;
    for (std::size_t p = 0; p < kNumLabels; ++p) support += confusion[c][p];
    CHECK(r.pooled.per_class[c].support == support);
  }

  // Every document is held out exactly once.
  std::multiset<std::string> held;
  for (const auto& f : r.folds) held.insert(f.documents.begin(), f.documents.end());
  CHECK(held.size() == corpus.documents.size());
  for (const auto& d : corpus.documents) CHECK(held.count(d.id) == 1);
}

TEST_CASE("fold vocabularies exclude held-out documents") {
  Corpus corpus = cv_corpus();
  const FoldSplit split = split_folds(corpus, 3, 4);
  const std::string held = corpus.documents[0].id;
  const int fold = split.assignments.at(held);
  // A word that only the held-out document uses.
  corpus.documents[0].sentences[0].tokens[0].text = "zyzzyva";
  const CrossValResult r = run_cross_validation(corpus, tiny_cv());
  for (const auto& f : r.folds) {
    CHECK(f.vocab.find("zyzzyva").has_value() == (f.fold != fold));
  }
}

TEST_CASE("thread count does not change results") {
  const Corpus corpus = cv_corpus();
  CrossValConfig cv = tiny_cv();
  const CrossValResult one = run_cross_validation(corpus, cv);
  cv.jobs = 3;
  const CrossValResult three = run_cross_validation(corpus, cv);
  CHECK(one.pooled_predictions() == three.pooled_predictions());
  CHECK(one.report_json() == three.report_json());
}

TEST_CASE("a class confined to one document has its support in a single fold") {
  Corpus corpus = cv_corpus();
  for (auto& m : corpus.documents[2].mentions) m.label = ISLabel::kFunction;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    if (d == 2) continue;
    for (auto& m : corpus.documents[d].mentions) {
      if (m.label == ISLabel::kFunction) m.label = ISLabel::kNew;
    }
  }
  const CrossValResult r = run_cross_validation(corpus, tiny_cv());
  int folds_with_support = 0;
  for (const auto& f : r.folds) folds_with_support += f.report[ISLabel::kFunction].support > 0;
  CHECK(folds_with_support == 1);
  CHECK(r.pooled[ISLabel::kFunction].support == corpus.documents[2].mentions.size());
}

TEST_CASE("a fold without mentions is an error") {
  Corpus corpus = cv_corpus(3);
  for (auto& d : corpus.documents) d.mentions.clear();
  corpus.documents[0] = cv_corpus(1).documents[0];
  corpus.documents[0].id = "keep";
  CHECK_THROWS_AS(run_cross_validation(corpus, tiny_cv()), InputError);
  CHECK_THROWS_AS(run_cross_validation(cv_corpus(2), tiny_cv(3)), InputError);
}

TEST_CASE("prediction records round trip through JSONL") {
  PredictionRecord a{"d1", "m1", ISLabel::kBridging, ISLabel::kOld, {}};
  a.probs.fill(0.125);
  a.probs[0] = 0.1 + 0.2;
  PredictionRecord b{"d2", "m\"2", std::nullopt, ISLabel::kNew, {}};
  b.probs.fill(1.0 / 3.0);
  const std::vector<PredictionRecord> in = {a, b};
  const std::string text = serialize_predictions(in);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(parse_predictions(text) == in);
  CHECK_THROWS_AS(parse_predictions("{not json}\n"), InputError);
  CHECK_THROWS_AS(parse_predictions(R"({"document_id":"d","mention_id":"m","pred":"bogus"})"),
                  InputError);
}

}  // namespace
}  // namespace infostat

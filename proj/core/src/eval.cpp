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

#include "infostat/eval.hpp"

#include <cmath>
#include <numeric>

#include "infostat/errors.hpp"
#include "infostat/rng.hpp"

namespace infostat {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": length mismatch (" +
                     std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = ratio(tp, tp + fp);
  const double r = ratio(tp, tp + fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

std::vector<std::string> FoldSplit::fold_documents(const Corpus& corpus,
                                                   int fold) const {
  std::vector<std::string> out;
  for (const Document& doc : corpus.documents) {
    auto it = assignments.find(doc.id);
    if (it != assignments.end() && it->second == fold) out.push_back(doc.id);
  }
  return out;
}

FoldSplit split_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  const std::size_t n = corpus.documents.size();
  if (k < 1) throw InputError("k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the number of documents (" +
                     std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  FoldSplit split;
  split.k = k;
  for (std::size_t i = 0; i < n; ++i) {
    split.assignments[corpus.documents[order[i]].id] = static_cast<int>(i % k);
  }
  return split;
}

EvalReport score(std::span<const ISLabel> predictions,
                 std::span<const ISLabel> gold) {
  require_same_length(predictions.size(), gold.size(), "score");
  if (gold.empty()) throw InputError("score: no items");
  EvalReport report;
  report.n = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++report.confusion[label_index(gold[i])][label_index(predictions[i])];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const std::size_t tp = report.confusion[c][c];
    std::size_t gold_total = 0;
    std::size_t pred_total = 0;
    for (std::size_t o = 0; o < kNumLabels; ++o) {
      gold_total += report.confusion[c][o];
      pred_total += report.confusion[o][c];
    }
    ClassMetrics& m = report.per_class[c];
    m.support = gold_total;
    m.precision = ratio(tp, pred_total);
    m.recall = ratio(tp, gold_total);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    correct += tp;
  }
  report.accuracy = ratio(correct, report.n);
  return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["n"] = report.n;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (ISLabel label : kAllLabels) {
    const ClassMetrics& m = report[label];
    per_class[std::string(label_name(label))] = {
        {"p", m.precision}, {"r", m.recall}, {"f", m.f1}, {"support", m.support}};
  }
  j["per_class"] = std::move(per_class);
  nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  j["confusion"] = std::move(confusion);
  return j;
}

double TestStatistic::operator()(std::span<const ISLabel> predictions,
                                 std::span<const ISLabel> gold) const {
  if (!f1_of) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) correct += predictions[i] == gold[i];
    return ratio(correct, gold.size());
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == *f1_of;
    const bool g = gold[i] == *f1_of;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  return f1_from_counts(tp, fp, fn);
}

std::vector<double> randomization_null(std::span<const ISLabel> preds_a,
                                       std::span<const ISLabel> preds_b,
                                       std::span<const ISLabel> gold, int rounds,
                                       std::uint64_t seed,
                                       const TestStatistic& statistic) {
  require_same_length(preds_a.size(), gold.size(), "randomization_test");
  require_same_length(preds_b.size(), gold.size(), "randomization_test");
  if (rounds < 1) throw InputError("randomization_test: rounds must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> diffs;
  diffs.reserve(rounds);
  const std::size_t n = gold.size();
  if (!statistic.f1_of) {
    // Only items where exactly one system is right move the accuracy gap.
    std::vector<int> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = static_cast<int>(preds_a[i] == gold[i]) -
                 static_cast<int>(preds_b[i] == gold[i]);
    }
    for (int r = 0; r < rounds; ++r) {
      long long gap = 0;
      for (std::size_t i = 0; i < n; ++i) gap += rng.coin() ? -delta[i] : delta[i];
      diffs.push_back(n == 0 ? 0.0
                             : std::abs(static_cast<double>(gap)) /
                                   static_cast<double>(n));
    }
    return diffs;
  }
  std::vector<ISLabel> a(preds_a.begin(), preds_a.end());
  std::vector<ISLabel> b(preds_b.begin(), preds_b.end());
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool swap = rng.coin();
      a[i] = swap ? preds_b[i] : preds_a[i];
      b[i] = swap ? preds_a[i] : preds_b[i];
    }
    diffs.push_back(std::abs(statistic(a, gold) - statistic(b, gold)));
  }
  return diffs;
}

double randomization_p_value(std::span<const double> null_diffs, double observed) {
  std::size_t at_least = 0;
  for (double d : null_diffs) at_least += d >= observed - 1e-12;
  return static_cast<double>(at_least + 1) /
         static_cast<double>(null_diffs.size() + 1);
}

double randomization_test(std::span<const ISLabel> preds_a,
                          std::span<const ISLabel> preds_b,
                          std::span<const ISLabel> gold, int rounds,
                          std::uint64_t seed, const TestStatistic& statistic) {
  const std::vector<double> null =
      randomization_null(preds_a, preds_b, gold, rounds, seed, statistic);
  const double observed =
      std::abs(statistic(preds_a, gold) - statistic(preds_b, gold));
  return randomization_p_value(null, observed);
}

}  // namespace infostat

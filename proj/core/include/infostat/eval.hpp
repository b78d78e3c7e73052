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

#ifndef INFOSTAT_EVAL_HPP_
#define INFOSTAT_EVAL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infostat/corpus.hpp"
#include "infostat/labels.hpp"

namespace infostat {

struct FoldSplit {
  int k = 0;
  std::map<std::string, int> assignments;  // document id -> fold

  // Document ids of one fold, in corpus order.
  std::vector<std::string> fold_documents(const Corpus& corpus, int fold) const;
};

// Seeded shuffle of the documents, then round-robin over k folds.
FoldSplit split_folds(const Corpus& corpus, int k, std::uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kNumLabels>, kNumLabels>;

struct EvalReport {
  std::array<ClassMetrics, kNumLabels> per_class{};
  double accuracy = 0.0;
  ConfusionMatrix confusion{};  // [gold][predicted]
  std::size_t n = 0;

  const ClassMetrics& operator[](ISLabel label) const {
    return per_class[label_index(label)];
  }
};

// Zero-denominator precision / recall / F1 are reported as 0.
EvalReport score(std::span<const ISLabel> predictions,
                 std::span<const ISLabel> gold);

nlohmann::ordered_json report_to_json(const EvalReport& report);

// Statistic compared by the randomization test: overall accuracy, or the F1
// of one class.
struct TestStatistic {
  std::optional<ISLabel> f1_of;

  double operator()(std::span<const ISLabel> predictions,
                    std::span<const ISLabel> gold) const;
};

// |stat(a) - stat(b)| after each round of independent per-item swaps.
std::vector<double> randomization_null(std::span<const ISLabel> preds_a,
                                       std::span<const ISLabel> preds_b,
                                       std::span<const ISLabel> gold,
                                       int rounds, std::uint64_t seed,
                                       const TestStatistic& statistic = {});

// Approximate randomization: p = (#{rounds with diff >= observed} + 1) /
// (rounds + 1). Differences within 1e-12 of the observed one count as ties.
double randomization_test(std::span<const ISLabel> preds_a,
                          std::span<const ISLabel> preds_b,
                          std::span<const ISLabel> gold, int rounds,
                          std::uint64_t seed,
                          const TestStatistic& statistic = {});

double randomization_p_value(std::span<const double> null_diffs,
                             double observed);

}  // namespace infostat

#endif  // INFOSTAT_EVAL_HPP_

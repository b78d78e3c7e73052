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

#ifndef INFOSTAT_CROSSVAL_HPP_
#define INFOSTAT_CROSSVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infostat/context.hpp"
#include "infostat/eval.hpp"
#include "infostat/model.hpp"
#include "infostat/train.hpp"

namespace infostat {

// One line of the prediction exchange format.
struct PredictionRecord {
  std::string document_id;
  std::string mention_id;
  std::optional<ISLabel> gold;
  ISLabel pred = ISLabel::kOld;
  Probabilities probs{};

  bool operator==(const PredictionRecord&) const = default;
};

std::string prediction_record_json(const PredictionRecord& record);
std::string serialize_predictions(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

struct CrossValConfig {
  ContextMode mode;
  // vocab_size is filled per fold from the training-fold vocabulary.
  ModelConfig model;
  TrainConfig train;
  int k = 10;
  std::uint64_t seed = 1;
  int min_freq = 1;
  int jobs = 1;
};

struct FoldResult {
  int fold = 0;
  std::vector<std::string> documents;  // held-out ids
  std::vector<PredictionRecord> predictions;
  EvalReport report;
  Vocab vocab;
  ModelConfig model;
  Parameters params;
  std::vector<EpochStats> log;
};

struct CrossValResult {
  EvalReport pooled;
  std::vector<FoldResult> folds;  // fold order

  // Held-out predictions of all folds, concatenated in fold order.
  std::vector<PredictionRecord> pooled_predictions() const;
  // {"accuracy", "n", "per_class", "confusion", "folds": [...]}
  nlohmann::ordered_json report_json() const;
};

// Trains on k-1 folds and predicts the held-out fold, for every fold; scores
// the pooled held-out predictions. The vocabulary of each fold comes from
// its training documents only. Folds run on up to `jobs` threads; results
// do not depend on `jobs`. Throws InputError for a fold without mentions.
CrossValResult run_cross_validation(const Corpus& corpus,
                                    const CrossValConfig& config);

}  // namespace infostat

#endif  // INFOSTAT_CROSSVAL_HPP_

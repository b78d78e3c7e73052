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

#include "infostat/crossval.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "infostat/errors.hpp"

namespace infostat {

std::string prediction_record_json(const PredictionRecord& r) {
  nlohmann::ordered_json j;
  j["document_id"] = r.document_id;
  j["mention_id"] = r.mention_id;
  if (r.gold) {
    j["gold"] = std::string(label_name(*r.gold));
  } else {
    j["gold"] = nullptr;
  }
  j["pred"] = std::string(label_name(r.pred));
  j["probs"] = r.probs;
  return j.dump();
}

std::string serialize_predictions(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += prediction_record_json(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl) {
  std::vector<PredictionRecord> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PredictionRecord r;
      r.document_id = j.value("document_id", "");
      r.mention_id = j.at("mention_id").get<std::string>();
      if (!j.at("gold").is_null()) r.gold = parse_label(j["gold"].get<std::string>());
      r.pred = parse_label(j.at("pred").get<std::string>());
      const auto probs = j.at("probs").get<std::vector<double>>();
      if (probs.size() != kNumLabels) throw InputError("probs must have 8 entries");
      std::copy(probs.begin(), probs.end(), r.probs.begin());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("predictions line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read predictions " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str());
}

std::vector<PredictionRecord> CrossValResult::pooled_predictions() const {
  std::vector<PredictionRecord> out;
  for (const auto& f : folds) {
    out.insert(out.end(), f.predictions.begin(), f.predictions.end());
  }
  return out;
}

nlohmann::ordered_json CrossValResult::report_json() const {
  nlohmann::ordered_json j = report_to_json(pooled);
  nlohmann::ordered_json fold_array = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json jf;
    jf["fold"] = f.fold;
    jf["documents"] = f.documents;
    jf["vocab_size"] = f.vocab.size();
    nlohmann::ordered_json losses = nlohmann::ordered_json::array();
    for (const auto& e : f.log) losses.push_back(e.mean_loss);
    jf["train_loss"] = std::move(losses);
    const nlohmann::ordered_json fold_report = report_to_json(f.report);
    for (const auto& [key, value] : fold_report.items()) jf[key] = value;
    fold_array.push_back(std::move(jf));
  }
  j["folds"] = std::move(fold_array);
  return j;
}

namespace {

FoldResult run_fold(const Corpus& corpus, const FoldSplit& split, int fold,
                    const CrossValConfig& config) {
  Corpus train_set;
  Corpus test_set;
  for (const Document& doc : corpus.documents) {
    (split.assignments.at(doc.id) == fold ? test_set : train_set)
        .documents.push_back(doc);
  }
  if (test_set.mention_count() == 0) {
    throw InputError("fold " + std::to_string(fold) + " has no mentions");
  }
  if (train_set.mention_count() == 0) {
    throw InputError("fold " + std::to_string(fold) + " has no training mentions");
  }

  FoldResult result;
  result.fold = fold;
  for (const Document& doc : test_set.documents) result.documents.push_back(doc.id);

  const int max_len = config.model.max_len;
  result.vocab = build_vocab(train_set, config.mode, max_len, config.min_freq);
  result.model = config.model;
  result.model.vocab_size = result.vocab.size();

  TrainConfig train_config = config.train;
  train_config.seed = config.train.seed + static_cast<std::uint64_t>(fold);
  const std::vector<Example> examples =
      make_examples(train_set, config.mode, result.vocab, max_len);
  TrainResult trained = train(examples, result.model, train_config);
  result.params = std::move(trained.params);
  result.log = std::move(trained.log);

  std::vector<ISLabel> preds;
  std::vector<ISLabel> gold;
  for (const Document& doc : test_set.documents) {
    const auto predictions =
        predict(doc.mentions, doc, config.mode, result.vocab, result.params,
                result.model);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      PredictionRecord r;
      r.document_id = doc.id;
      r.mention_id = doc.mentions[i].id;
      r.gold = doc.mentions[i].label;
      r.pred = predictions[i].label;
      r.probs = predictions[i].probabilities;
      preds.push_back(r.pred);
      gold.push_back(*r.gold);
      result.predictions.push_back(std::move(r));
    }
  }
  result.report = score(preds, gold);
  return result;
}

}  // namespace

CrossValResult run_cross_validation(const Corpus& corpus,
                                    const CrossValConfig& config) {
  corpus_stats(corpus);  // rejects unlabeled mentions
  config.train.validate();
  if (config.jobs < 1) throw InputError("jobs must be >= 1");
  const FoldSplit split = split_folds(corpus, config.k, config.seed);

  std::vector<std::optional<FoldResult>> slots(config.k);
  std::vector<std::exception_ptr> errors(config.k);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int f = next++; f < config.k; f = next++) {
      try {
        slots[f] = run_fold(corpus, split, f, config);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.jobs, config.k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CrossValResult result;
  std::vector<ISLabel> preds;
  std::vector<ISLabel> gold;
  for (auto& slot : slots) {
    for (const auto& r : slot->predictions) {
      preds.push_back(r.pred);
      gold.push_back(*r.gold);
    }
    result.folds.push_back(std::move(*slot));
  }
  result.pooled = score(preds, gold);
  return result;
}

}  // namespace infostat

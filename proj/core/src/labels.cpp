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

#include "infostat/labels.hpp"

#include <string>

#include "infostat/errors.hpp"

namespace infostat {
namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "old",
    "mediated/worldKnowledge",
    "mediated/syntactic",
    "mediated/aggregate",
    "mediated/function",
    "mediated/comparative",
    "mediated/bridging",
    "new",
};

}  // namespace

ISLabel label_from_index(std::size_t index) {
  if (index >= kNumLabels) {
    throw InputError("label index out of range: " + std::to_string(index));
  }
  return static_cast<ISLabel>(index);
}

std::string_view label_name(ISLabel label) {
  return kLabelNames[label_index(label)];
}

ISLabel parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == name) return static_cast<ISLabel>(i);
  }
  throw InputError("unknown label \"" + std::string(name) + "\"");
}

}  // namespace infostat

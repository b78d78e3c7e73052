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

#ifndef INFOSTAT_LABELS_HPP_
#define INFOSTAT_LABELS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace infostat {

// Fine-grained information status. The numeric order is fixed: it defines
// classifier output indices and the argmax tie-break order.
enum class ISLabel : std::uint8_t {
  kOld = 0,
  kWorldKnowledge,
  kSyntactic,
  kAggregate,
  kFunction,
  kComparative,
  kBridging,
  kNew,
};

inline constexpr std::size_t kNumLabels = 8;

inline constexpr std::array<ISLabel, kNumLabels> kAllLabels = {
    ISLabel::kOld,       ISLabel::kWorldKnowledge, ISLabel::kSyntactic,
    ISLabel::kAggregate, ISLabel::kFunction,       ISLabel::kComparative,
    ISLabel::kBridging,  ISLabel::kNew,
};

constexpr std::size_t label_index(ISLabel label) {
  return static_cast<std::size_t>(label);
}

ISLabel label_from_index(std::size_t index);

// Exchange-format name, e.g. "mediated/bridging".
std::string_view label_name(ISLabel label);

// Throws InputError for anything outside the closed set.
ISLabel parse_label(std::string_view name);

}  // namespace infostat

#endif  // INFOSTAT_LABELS_HPP_

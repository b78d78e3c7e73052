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

#ifndef INFOSTAT_TEXT_HPP_
#define INFOSTAT_TEXT_HPP_

#include <span>
#include <string>
#include <string_view>

namespace infostat {

// Unicode default case folding of a UTF-8 string.
std::string case_fold(std::string_view utf8);

// Case-folds each token and joins with single spaces.
std::string normalized_join(std::span<const std::string> tokens);

bool has_whitespace(std::string_view utf8);

}  // namespace infostat

#endif  // INFOSTAT_TEXT_HPP_

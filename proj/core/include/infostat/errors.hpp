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

#ifndef INFOSTAT_ERRORS_HPP_
#define INFOSTAT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace infostat {

// Root of the library's exception hierarchy. Input problems derive from
// InputError; numeric failures (divergence, gradient mismatch) from
// NumericError. The CLI maps these onto exit codes 1 and 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public InputError {
 public:
  using InputError::InputError;
};

class CheckpointError : public InputError {
 public:
  using InputError::InputError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace infostat

#endif  // INFOSTAT_ERRORS_HPP_

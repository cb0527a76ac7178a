// Copyright 2026 The VLR Authors.
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

#ifndef VLR_DIAGNOSTICS_H_
#define VLR_DIAGNOSTICS_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vlr {

// Hard errors. Soft problems (unknown names, empty splits) go to Diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

// Collects non-fatal warnings. Not thread-safe; use one per worker/question.
class Diagnostics {
 public:
  void Warn(std::string message) { warnings_.push_back(std::move(message)); }

  const std::vector<std::string> &warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }
  void Clear() { warnings_.clear(); }

 private:
  std::vector<std::string> warnings_;
};

inline void Warn(Diagnostics *diag, std::string message) {
  if (diag != nullptr) diag->Warn(std::move(message));
}

}  // namespace vlr

#endif  // VLR_DIAGNOSTICS_H_

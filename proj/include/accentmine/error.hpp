// Copyright 2026 The accentmine Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace accentmine {

enum class Errc {
  validation,  // bad config or violated precondition
  io,          // file could not be opened, read or written
  format,      // malformed manifest line, bad magic, inconsistent sidecar
  truncated,   // binary payload ended early
  non_finite,  // NaN or infinity in numeric data
  duplicate,   // repeated utt_id inside one corpus
  collision,   // utt_id clash between two corpora being merged
  shape,       // dimension mismatch
  index,       // label or cluster index out of range
  empty_input,
  numeric,     // non-finite value produced during computation
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Process exit code for an error class: 2 validation, 3 I/O, 4 data.
int exit_code_for(Errc code) noexcept;

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace accentmine

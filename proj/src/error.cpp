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

#include "accentmine/error.hpp"

namespace accentmine {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::validation: return "validation";
    case Errc::io: return "io";
    case Errc::format: return "format";
    case Errc::truncated: return "truncated";
    case Errc::non_finite: return "non_finite";
    case Errc::duplicate: return "duplicate";
    case Errc::collision: return "collision";
    case Errc::shape: return "shape";
    case Errc::index: return "index";
    case Errc::empty_input: return "empty_input";
    case Errc::numeric: return "numeric";
  }
  return "unknown";
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::io:
      return 3;
    case Errc::format:
    case Errc::truncated:
    case Errc::non_finite:
    case Errc::duplicate:
    case Errc::numeric:
      return 4;
    default:
      return 2;
  }
}

}  // namespace accentmine

// Copyright 2026 The pathsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHSIG_ERROR_H_
#define PATHSIG_ERROR_H_

#include <stdexcept>
#include <string>

namespace pathsig {

enum class ErrorCode {
  kIo,         // file missing, unreadable or unwritable
  kFormat,     // malformed header, JSON or manifest
  kShape,      // dimension disagreement
  kRange,      // value outside its admitted domain
  kNumeric,    // non-finite value or divergent computation
  kUsage,      // bad command line or configuration
  kCheck,      // an oracle check failed
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for the library. Callers that need to branch (the CLI
// exit codes, the manifest mutation tests) inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pathsig

#endif  // PATHSIG_ERROR_H_

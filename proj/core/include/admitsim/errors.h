// Copyright 2026 The admitsim Authors
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

#ifndef ADMITSIM_ERRORS_H_
#define ADMITSIM_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace admitsim {

enum class ErrorKind {
  kDomain,           // value outside the mathematical domain of an operation
  kArgument,         // malformed or incomplete argument
  kCapacity,         // g <= 0 or g >= n
  kInfeasibleQuota,  // quota target probability above 1
  kStructure,        // population does not have the required group/region labels
  kUnsupported,      // setting a checker does not cover (e.g. unequal shapes)
  kDegenerate,       // e.g. equal scales have no density intersection
  kParse,
  kValidation,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace admitsim

#endif  // ADMITSIM_ERRORS_H_

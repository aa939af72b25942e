//==============================================================================
// Copyright (c) 2026 The topisum Authors.
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
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace topisum {

/// Broad failure classes. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  kArgument,
  kShape,
  kParse,
  kDuplicate,
  kFormat,
  kIo,
  kValidation,
  kLookup,
  kConfig,
  kTraining,
  kDegenerate,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& message) : Error(K, message) {}
};
}  // namespace detail

using ArgumentError = detail::TypedError<ErrorKind::kArgument>;
using ShapeError = detail::TypedError<ErrorKind::kShape>;
using ParseError = detail::TypedError<ErrorKind::kParse>;
using DuplicateError = detail::TypedError<ErrorKind::kDuplicate>;
using FormatError = detail::TypedError<ErrorKind::kFormat>;
using IoError = detail::TypedError<ErrorKind::kIo>;
using ValidationError = detail::TypedError<ErrorKind::kValidation>;
using LookupError = detail::TypedError<ErrorKind::kLookup>;
using ConfigError = detail::TypedError<ErrorKind::kConfig>;
using TrainingError = detail::TypedError<ErrorKind::kTraining>;
using DegenerateError = detail::TypedError<ErrorKind::kDegenerate>;

}  // namespace topisum

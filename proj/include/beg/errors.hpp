// Copyright 2026 The beg-stein Authors.
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

namespace beg {

// Every library error carries the process exit code the CLI maps it to:
// 2 for bad input, 3 for a computation that cannot be completed.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, int exit_code)
      : std::runtime_error(what), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string kind_;
  int exit_code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string kind = "validation")
      : Error(std::move(kind), what, 2) {}
};

class InvalidParametersError : public ValidationError {
 public:
  explicit InvalidParametersError(const std::string& what)
      : ValidationError(what, "invalid-parameters") {}
};

class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& what, std::string kind = "computation")
      : Error(std::move(kind), what, 3) {}
};

class CapExceededError : public ComputationError {
 public:
  explicit CapExceededError(const std::string& what)
      : ComputationError(what, "cap-exceeded") {}
};

class ScheduleUnderflowError : public ComputationError {
 public:
  explicit ScheduleUnderflowError(const std::string& what)
      : ComputationError(what, "schedule-underflow") {}
};

class NonIntegrableError : public ComputationError {
 public:
  explicit NonIntegrableError(const std::string& what)
      : ComputationError(what, "non-integrable") {}
};

class DegenerateFitError : public ComputationError {
 public:
  explicit DegenerateFitError(const std::string& what)
      : ComputationError(what, "degenerate-fit") {}
};

}  // namespace beg

// Copyright 2026 The maskdl Authors.
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

#ifndef MASKDL_ERROR_H_
#define MASKDL_ERROR_H_

#include <stdexcept>
#include <string>

namespace maskdl {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (shape mismatch, k too large, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// A dictionary column has zero norm.
class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

// An enumeration (exhaustive decode, exact RIP, net construction) would
// exceed its configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double required, double budget)
      : Error(what), required_(required), budget_(budget) {}
  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

// Non-finite values encountered during a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents are malformed or truncated.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A file declares a schema version this build does not understand.
class SchemaVersionError : public ParseError {
 public:
  SchemaVersionError(int found, int expected)
      : ParseError("unsupported schema version " + std::to_string(found) +
                   " (expected " + std::to_string(expected) + ")"),
        found_(found),
        expected_(expected) {}
  int found() const { return found_; }
  int expected() const { return expected_; }

 private:
  int found_;
  int expected_;
};

// Invalid user configuration (CLI/JSON level).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace maskdl

#endif  // MASKDL_ERROR_H_

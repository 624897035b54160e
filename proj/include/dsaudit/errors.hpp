// Copyright 2026 The dsaudit Authors.
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

#ifndef DSAUDIT_ERRORS_HPP_
#define DSAUDIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dsaudit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems reading scenario, platform or grid files.
class ParseError : public Error {
 public:
  enum class Kind { syntax, unknown_key, constraint };

  ParseError(Kind kind, int line, int column, std::string message,
             std::string invariant = {});

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  // Name of the violated invariant, set for Kind::constraint.
  const std::string& invariant() const { return invariant_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string invariant_;
};

// A platform adapter call failed. The message carries user/day/session context.
class AdapterError : public Error {
 public:
  using Error::Error;
};

class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Input hashes recorded in a log header do not match the supplied inputs.
class HashMismatch : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsaudit

#endif  // DSAUDIT_ERRORS_HPP_

// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef GENCHAN_COMMON_HPP
#define GENCHAN_COMMON_HPP

#include <numbers>
#include <stdexcept>
#include <string>

namespace genchan {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr double kPi = std::numbers::pi;

// Thrown when a binary file does not match its documented format. Each
// failure class has its own type so callers can react to them distinctly.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string &msg) : std::runtime_error(msg) {}
};

class MagicError : public FormatError {
 public:
  explicit MagicError(const std::string &msg) : FormatError(msg) {}
};

class VersionError : public FormatError {
 public:
  explicit VersionError(const std::string &msg) : FormatError(msg) {}
};

class TruncatedError : public FormatError {
 public:
  explicit TruncatedError(const std::string &msg) : FormatError(msg) {}
};

class ShapeError : public FormatError {
 public:
  explicit ShapeError(const std::string &msg) : FormatError(msg) {}
};

// Thrown when a requested allocation would exceed a configured budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string &msg) : std::runtime_error(msg) {}
};

// Thrown by the scenario-spec parser; carries a 1-based line number.
class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(int line, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace genchan

#endif

// Copyright 2026 The AdaSID Authors.
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

#ifndef ADASID_ERROR_HPP
#define ADASID_ERROR_HPP

#include <stdexcept>
#include <string>

namespace adasid {

// Error classes map 1:1 onto CLI exit codes; `kInternal` covers misuse of
// in-process APIs (e.g. backward without a recorded forward) and exits 1.
enum class ErrorClass { kUsage = 2, kData = 3, kNumeric = 4, kIo = 5, kInternal = 1 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& message)
      : std::runtime_error(message), class_(cls) {}
  ErrorClass error_class() const { return class_; }
  const char* class_name() const {
    switch (class_) {
      case ErrorClass::kUsage: return "usage";
      case ErrorClass::kData: return "data";
      case ErrorClass::kNumeric: return "numeric";
      case ErrorClass::kIo: return "io";
      case ErrorClass::kInternal: return "internal";
    }
    return "internal";
  }

 private:
  ErrorClass class_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorClass::kUsage, m) {}
};

// Bad or inconsistent configuration values; a flavor of usage error.
class ConfigError : public UsageError {
 public:
  explicit ConfigError(const std::string& m) : UsageError(m) {}
};

// Malformed or inconsistent input data, including shape mismatches between
// user-supplied artifacts (features vs checkpoints etc.).
class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorClass::kData, m) {}
};

class DimensionError : public DataError {
 public:
  explicit DimensionError(const std::string& m) : DataError(m) {}
};

// Non-finite values, zero norms, and other numeric breakdowns.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error(ErrorClass::kNumeric, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorClass::kIo, m) {}
};

// API called out of order (programming error, not user input).
class StateError : public Error {
 public:
  explicit StateError(const std::string& m) : Error(ErrorClass::kInternal, m) {}
};

}  // namespace adasid

#endif  // ADASID_ERROR_HPP

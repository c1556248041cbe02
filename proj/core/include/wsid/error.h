// wsid/error.h

// Copyright 2026  The wsid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WSID_ERROR_H_
#define WSID_ERROR_H_

#include <stdexcept>
#include <string>

namespace wsid {

/// Broad failure category; the CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage = 1,    // bad configuration or arguments
  kData = 2,     // malformed or inconsistent input data
  kNumeric = 3,  // non-finite values during computation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what)
      : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string &what)
      : Error(ErrorKind::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string &what)
      : Error(ErrorKind::kNumeric, what) {}
};

inline int ExitCode(ErrorKind kind) { return static_cast<int>(kind); }

}  // namespace wsid

#endif  // WSID_ERROR_H_

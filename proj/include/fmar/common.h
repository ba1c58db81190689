/*
 * Copyright 2026 The FMAR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FMAR_COMMON_H_
#define FMAR_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fmar {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;
using Rating = int;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed input line. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A (user, item) pair appears more than once in a rating file.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

// Confidence or lift with a zero denominator.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// User or item absent from the feature index.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// SGD produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error("epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fmar

#endif  // FMAR_COMMON_H_

// Copyright 2026 The advocr Authors. All Rights Reserved.
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

#ifndef ADVOCR_ERROR_H_
#define ADVOCR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace advocr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation received tensors or images whose extents do not conform.
class ShapeError : public Error {
 public:
  ShapeError(const std::string& op, const std::string& detail)
      : Error(op + ": " + detail), op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

// Malformed file contents (PGM headers, weight files, TSV rows).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument violates an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A CTC target cannot be aligned to the available number of timesteps.
class InfeasibleTargetError : public Error {
 public:
  InfeasibleTargetError(std::size_t required, std::size_t available)
      : Error("target needs at least " + std::to_string(required) +
              " timesteps but only " + std::to_string(available) +
              " are available (target too long for image width)"),
        required_(required),
        available_(available) {}
  std::size_t required() const { return required_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

}  // namespace advocr

#endif  // ADVOCR_ERROR_H_

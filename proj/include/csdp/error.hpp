//
// Copyright 2026 The CSDP Authors
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
//

#ifndef CSDP_ERROR_HPP
#define CSDP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace csdp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument does not hold (shape, range, sign).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A model or distribution violates a stochasticity invariant.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Exact enumeration over the product space was refused.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// An iterative method did not converge (reducible, periodic, or too slow).
class NotConverged : public Error {
 public:
  using Error::Error;
};

// A conditional probability was requested on a zero-probability event.
class ZeroProbability : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration. `field()` names the offending key.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace detail {

[[noreturn]] inline void Fail(const std::string& what) {
  throw InvalidArgument(what);
}

inline void Require(bool condition, const std::string& what) {
  if (!condition) Fail(what);
}

}  // namespace detail
}  // namespace csdp

#endif  // CSDP_ERROR_HPP

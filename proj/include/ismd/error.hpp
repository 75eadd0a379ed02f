// Copyright 2026 The ismd Authors
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

#ifndef ISMD_ERROR_HPP_
#define ISMD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ismd {

// Root of every error raised by the library. Callers that only need to
// distinguish bad input from runtime failure can catch InvalidInput first.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: shape mismatch, non-finite entries, out-of-range
// parameters, infeasible points.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// A cut variant or corollary case was requested for a stage whose structure
// does not satisfy its hypotheses. The message names the violated flag.
class StructureMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A required constant (alpha, M1, alpha_D, ...) was not supplied.
class MissingConstant : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SlaterViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Non-finite intermediate values or a solver that cannot make progress.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

namespace internal {

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace internal
}  // namespace ismd

#endif  // ISMD_ERROR_HPP_

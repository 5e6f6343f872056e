// Copyright (c) 2026 The xyzcycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace xyzcycle {

// Base of every error thrown by the library. Each subclass corresponds to one
// failure category so callers (and the CLI) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite samples, out-of-range scalars, malformed arguments.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Tensor / image shapes that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Least-squares systems without a unique solution.
class RankError : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration: patch larger than image, empty datasets, bad schedules.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File decoding/encoding failures; messages carry the offending path.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in the wrong state, e.g. backward before forward.
class StateError : public Error {
 public:
  using Error::Error;
};

// Stochastic layers active where determinism is required.
class DeterminismError : public Error {
 public:
  using Error::Error;
};

// Chromatic adaptation with a zero cone response.
class SingularAdaptationError : public Error {
 public:
  using Error::Error;
};

}  // namespace xyzcycle

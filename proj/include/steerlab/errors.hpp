// Copyright 2026 The steerlab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace steerlab {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class UnsupportedScenario : public Error {
 public:
  using Error::Error;
};

/// Raised when k^N (or a vertex-combination count) exceeds the configured cap.
class ScenarioTooLarge : public Error {
 public:
  using Error::Error;
};

/// Raised when an LHS certificate is requested above the proven lower bound.
class RefusedAboveBound : public Error {
 public:
  using Error::Error;
};

}  // namespace steerlab

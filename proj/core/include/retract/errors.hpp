// Copyright 2026 The Retract Authors
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

namespace retract {

// Input outside the documented domain of an operation (e.g. a start position
// outside the workspace).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Simulation state became non-finite or the integrator diverged.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse: call sequence, shape, or length contract violated.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad, missing, or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// I/O failure on an artifact file (unreadable, wrong magic, version skew).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retract

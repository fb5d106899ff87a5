/*
 * Copyright 2026 The kljnsim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace kljn {

/// Root of every error thrown by the library. `kind()` is the stable,
/// machine-readable tag the CLI reports in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid parameterization (Nyquist violation, non-positive resistor, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Mathematical domain violation (negative probability, zero bandwidth, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Bad argument shape (length mismatch, too few samples, ...).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(std::string node, const std::string& what)
      : Error("singular", what), node_(std::move(node)) {}
  /// Node (or branch) the singularity was traced to.
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error("divergence", what) {}
};

}  // namespace kljn

// SPDX-License-Identifier: Apache-2.0
//
// beamspace-sd: beamspace channel estimation for lens-array mmWave massive MIMO
// Copyright (C) 2026 The beamspace-sd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beamspace {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where the quantity is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A least-squares or inversion problem failed the conditioning guard.
/// Carries the column set that produced the singular system, if any.
class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what, std::vector<std::size_t> support = {})
      : std::runtime_error(what), support_(std::move(support)) {}

  const std::vector<std::size_t>& support() const noexcept { return support_; }

 private:
  std::vector<std::size_t> support_;
};

/// Experiment configuration violates an invariant. `field()` names the key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace beamspace

// Copyright 2026 The FairProbe Authors.
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

namespace fairprobe {

// Every error the library raises derives from Error so callers (the CLI in
// particular) can report the error kind by name.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

// The allocation polytope is empty.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error("InfeasibleError", what) {}
};

// An exhaustive computation would exceed its size limit.
class CostGuardError : public Error {
 public:
  explicit CostGuardError(const std::string& what)
      : Error("CostGuardError", what) {}
};

// Invalid experiment configuration. field() names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("ConfigError", what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

}  // namespace fairprobe

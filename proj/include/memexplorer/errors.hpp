// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace memx {

/// Malformed input document (JSON syntax, missing or mistyped field).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input that violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operation applied outside its domain (e.g. shoreline query on on-chip memory).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A design/workload combination the models cannot realize. Carries the
/// category so callers (CLI, DSE filter) can react without string matching.
class InfeasibleError : public std::runtime_error {
 public:
  enum class Kind {
    Bandwidth,       // effective-bandwidth chain hits zero at some boundary
    Capacity,        // data does not fit in the hierarchy
    Decode,          // max decode batch is zero
    SearchSpace,     // no feasible point found within the sampling budget
  };

  InfeasibleError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Numerical failure (singular kernel matrix after jitter escalation, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace memx

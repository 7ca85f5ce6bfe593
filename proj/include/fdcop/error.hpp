// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fdcop {

/// Broad failure classes. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  kArgument,
  kValidation,
  kDomain,
  kStructure,
  kCapacity,
  kProtocol,
  kUnsupported,
  kVerification,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorCategory::kArgument, what) {}
};

/// Malformed problem data: bad domains, dangling scopes, NaN coefficients,
/// incomplete or infeasible assignments.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::kValidation, what) {}
};

/// A point or operand lies outside the region a function is defined on.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::kDomain, what) {}
};

/// Graph-shape violations (disconnected graphs, non-trees where a tree is
/// required).
class StructureError : public Error {
 public:
  explicit StructureError(const std::string& what)
      : Error(ErrorCategory::kStructure, what) {}
};

/// Piece, row or work budget exhausted.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorCategory::kCapacity, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorCategory::kProtocol, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorCategory::kUnsupported, what) {}
};

}  // namespace fdcop

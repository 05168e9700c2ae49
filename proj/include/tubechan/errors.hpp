// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tubechan {

// Raised when a geometric quantity is undefined for the given inputs
// (zero-length line-of-sight vector, zero Tx-Rx distance, ...).
class DegenerateGeometryError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Raised when a ray direction never meets the cylinder wall (axis-parallel).
class NoWallIntersectionError : public DegenerateGeometryError {
  public:
    using DegenerateGeometryError::DegenerateGeometryError;
};

// Configuration parse/validation failure. line() is 1-based, 0 if the error
// is not tied to a specific input line.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line)
    {
    }
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

} // namespace tubechan

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace whichpath {

/// Invalid parameters, malformed input, or broken preconditions.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// API misuse (e.g. measuring the same party twice).
class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Lookup of a label or branch that does not exist.
class QueryError : public std::runtime_error {
public:
  explicit QueryError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested state exceeds the dense-representation budget.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// File system failures while emitting artifacts.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace whichpath

#pragma once

#include <stdexcept>
#include <string>

namespace stgf {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct FormatVersionMismatchError : std::runtime_error {
  explicit FormatVersionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file content; carries the 1-based line the parser rejected.
struct SchemaError : std::runtime_error {
  SchemaError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

}  // namespace stgf

#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bitensor {

class TomlError : public std::runtime_error {
 public:
  TomlError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads the TOML subset used by scenario files into a JSON object:
/// tables, arrays of tables, dotted and quoted keys, basic and literal
/// strings, integers, floats, booleans, arrays (may span lines) and inline
/// tables. Dates and multi-line strings are not supported.
[[nodiscard]] nlohmann::json parse_toml(std::string_view text);

}  // namespace bitensor

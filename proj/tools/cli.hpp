#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bitensor::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the `bitensor` tool with injectable streams; `args`
/// excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "θ=0.7,φ=1.2" into a point of the given chart. Greek letters are
/// accepted for their spelled-out coordinate names.
std::vector<double> parse_point(const std::string& spec, const std::vector<std::string>& coords);

}  // namespace bitensor::cli

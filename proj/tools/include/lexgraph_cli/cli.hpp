#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace lexgraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line against the given streams. `env` stands in for the
// process environment (only LEXGRAPH_CONFIG is read).
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err, const std::map<std::string, std::string>& env = {});

}  // namespace lexgraph::cli

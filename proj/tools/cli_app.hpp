#pragma once

#include <iosfwd>

namespace geomed::cli {

// Parses argv, runs the command and returns the process exit status. Results
// go to --output or `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geomed::cli

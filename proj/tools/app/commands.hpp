#pragma once

#include <iosfwd>

namespace fundsol::app {

/// Parses argv, runs one subcommand and reports failures on `err`.
/// Returns 0 on success, 1 for bad input, 2 when a computed state breaks
/// an invariant of the theory.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fundsol::app

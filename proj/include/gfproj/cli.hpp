#pragma once

#include <iosfwd>

namespace gfproj {

// Entry point of the gfproj command line tool. Exit codes: 0 success,
// 1 invalid arguments or input, 2 solver failure or non-convergence in a
// single-design subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gfproj

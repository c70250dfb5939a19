#pragma once

#include <iosfwd>

namespace dln::cli {

/// Command-line entry point. Exit codes: 0 success, 1 domain error, 2 usage
/// error (the grammar is printed to `err`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace dln::cli

#pragma once

// command line driver: derive / identities / plateau / check
//
// exposed as a library function so the test suite can exercise subcommands
// in-process; tools/main.cpp is a two-line wrapper

#include <iosfwd>
#include <string>
#include <vector>

namespace wedge::cli {

// args are argv[1..]; returns the process exit code:
//   0  success / all checks pass
//   1  a verification or convergence failure
//   2  usage error (bad flags, malformed input)
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);
int run(std::vector<std::string> args); // std::cout / std::cerr

} // namespace wedge::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lamshare {

// Runs the command-line driver. args excludes the program name. Machine output
// goes to out, diagnostics to err; "-" as a file argument reads from in.
// Exit status: 0 success, 1 equiv decided "not equivalent", 2 any error.
int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace lamshare

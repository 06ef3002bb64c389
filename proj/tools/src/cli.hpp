#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shufflelab {

// Runs one command-line invocation (without the program name).
// Returns 0 when every declared check passes, 2 when a declared check fails,
// and 1 on input or resource errors (the message names the failing stage).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace shufflelab

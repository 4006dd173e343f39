#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kmslab {

/// Entry point of the command-line tool; args exclude the program name.
/// Exit codes: 0 success, 1 expectation or golden mismatch, 2 usage or input error, 3 kernel cap exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kmslab

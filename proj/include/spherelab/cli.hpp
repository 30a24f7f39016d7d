#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spherelab {

// Full command-line front end: parses args (without the program name),
// runs the requested subcommand, and maps errors to exit codes.
// 0 = success, 2 = configuration/validation error, 3 = numerical failure.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err);

} // namespace spherelab

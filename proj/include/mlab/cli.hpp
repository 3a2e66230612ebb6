#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlab {

/// Exit codes: 0 pass, 2 threshold failure, 1 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace mlab

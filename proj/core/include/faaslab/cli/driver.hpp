#pragma once

#include <string>
#include <vector>

namespace faaslab::cli {

// Full command-line entry point, argv[0] excluded. Returns the process exit
// code: 0 on success, 2 for configuration/usage problems, 3 for runtime and
// training failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace faaslab::cli

#include <string>
#include <vector>

#include "faaslab/cli/driver.hpp"

int main(int argc, char** argv) {
  return faaslab::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

#include <string>
#include <vector>

#include "g0gd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return g0gd::cli::dispatch(args);
}

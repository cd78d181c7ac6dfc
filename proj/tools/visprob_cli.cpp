#include "visprob/cli.hpp"

int main(int argc, char** argv) {
  return visprob::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

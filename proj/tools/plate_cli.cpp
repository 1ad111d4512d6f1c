// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "plate/cli.hpp"

int main(int argc, char** argv) {
  return plate::run_command_line(argc, argv, std::cout, std::cerr);
}

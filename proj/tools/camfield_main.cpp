#include "camfield/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return camfield::cli_main({argv + 1, argv + argc}, std::cout, std::cerr);
}

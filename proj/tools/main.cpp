#include "wedge/cli.hpp"

int main(int argc, char** argv) {
  return wedge::cli::run({argv + 1, argv + argc});
}

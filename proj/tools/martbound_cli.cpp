#include "martbound/cli.hpp"

int main(int argc, char** argv) {
  return martbound::cli::run_cli(argc, argv);
}

#include <cstdlib>
#include <iostream>

#include "lexgraph_cli/cli.hpp"

int main(int argc, char** argv) {
  std::map<std::string, std::string> env;
  if (const char* config = std::getenv("LEXGRAPH_CONFIG")) env["LEXGRAPH_CONFIG"] = config;
  return lexgraph::cli::run(argc, argv, std::cin, std::cout, std::cerr, env);
}

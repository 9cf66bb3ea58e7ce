#include <iostream>

#include "retwalk/cli.hpp"

int main(int argc, char** argv) { return retwalk::cli::main_entry(argc, argv, std::cout, std::cerr); }

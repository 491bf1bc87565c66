#include <iostream>

#include "app/commands.hpp"

int main(int argc, char** argv) { return fundsol::app::run_command(argc, argv, std::cout, std::cerr); }

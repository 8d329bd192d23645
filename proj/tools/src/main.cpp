#include <iostream>

#include "overage/cli/app.hpp"

int main(int argc, char** argv) { return overage::cli::run_app(argc, argv, std::cout, std::cerr); }

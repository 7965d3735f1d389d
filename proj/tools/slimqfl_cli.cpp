#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "slimqfl/experiment.hpp"

int main(int argc, char** argv) {
  try {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const auto cfg = slimqfl::load_config(args);
    if (!cfg) return 0;
    const auto outputs = slimqfl::run_experiment(*cfg, &std::cerr);
    for (const auto& p : outputs.csv_files) std::cout << p.string() << '\n';
    for (const auto& p : outputs.svg_files) std::cout << p.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "slimqfl: " << e.what() << '\n';
    return 1;
  }
}

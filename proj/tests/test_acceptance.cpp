// Runs every acceptance criterion; one PASS/FAIL line each.
// Usage: test_acceptance <path to tf2d> [seed]

#include <cstdint>
#include <iostream>
#include <string>

#include "tf2d/acceptance.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_acceptance <tf2d executable> [seed]\n";
    return 2;
  }
  tf2d::AcceptanceOptions opts;
  opts.executable = argv[1];
  if (argc > 2) opts.seed = std::stoull(argv[2]);
  opts.on_result = [](const tf2d::CriterionResult& r) {
    std::cout << tf2d::format_result(r) << std::endl;
  };
  int failed = 0;
  for (const auto& r : tf2d::run_acceptance(opts)) failed += r.passed ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}

// Acceptance gate: one pass/fail line per criterion of the fixture-based
// property suite. Non-zero exit when any non-skipped check fails.

#include <cstdlib>
#include <iostream>

#include "framecl/verify.hpp"

int main(int argc, char** argv) {
  framecl::verify::Options options;
  options.fixtures_dir = argc > 1 ? argv[1] : FRAMECL_FIXTURES_DIR;
  auto results = framecl::verify::run_all(options);
  framecl::verify::print_results(results, std::cout);
  std::size_t failed = 0;
  for (const auto& r : results)
    if (!r.passed && !r.skipped) ++failed;
  if (failed) {
    std::cout << failed << " check(s) failed\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}

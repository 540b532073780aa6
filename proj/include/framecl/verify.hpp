#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "framecl/runner.hpp"

namespace framecl::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct Options {
  std::filesystem::path fixtures_dir;  // directory holding fn_xml/ etc.
  std::filesystem::path work_dir;      // scratch space; temp dir when empty
};

// The fixture-based property suite: deterministic, offline, self-contained.
// The FrameNet check is skipped unless FRAMENET_DATA points at a copy of
// the data (a directory with frame/ and lu/ subdirectories).
std::vector<CheckResult> run_all(const Options& options);

bool all_passed(const std::vector<CheckResult>& results);
void print_results(const std::vector<CheckResult>& results, std::ostream& os);

// The offline fixture configuration all shapes run against; shared with the
// CLI examples and tests.
AppConfig fixture_config();

}  // namespace framecl::verify

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "framecl/store.hpp"

namespace testing {

inline std::filesystem::path fixtures_dir() { return FRAMECL_FIXTURES_DIR; }

// The clean synthetic corpus, imported once.
inline const framecl::FrameStore& fixture_store() {
  static framecl::FrameStore store = [] {
    auto result = framecl::import_framenet(fixtures_dir() / "fn_xml" / "frame",
                                           fixtures_dir() / "fn_xml" / "lu");
    return result.store;
  }();
  return store;
}

inline nlohmann::json gold_expectations() {
  static nlohmann::json j = [] {
    std::ifstream is(fixtures_dir() / "expected" / "gold_examples.json");
    return nlohmann::json::parse(is);
  }();
  return j;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("framecl-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

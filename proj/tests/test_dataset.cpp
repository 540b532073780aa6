#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "framecl/dataset.hpp"
#include "helpers.hpp"

using namespace framecl;
using testing::fixture_store;

namespace {

const std::vector<std::string> kAllFrames = {"Rescuing", "Borrowing", "Departing"};

std::map<std::string, std::size_t> per_stratum(const FrameStore& store,
                                               const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> counts;
  for (const auto& id : ids) {
    const auto& ex = store.example(id);
    counts[ex.frame_name + "/" + ex.lu_name]++;
  }
  return counts;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("largest remainder reproduces the proportional counts") {
  CHECK(largest_remainder(10, {20, 10}) == std::vector<std::size_t>{7, 3});
  CHECK(largest_remainder(0, {5, 5}) == std::vector<std::size_t>{0, 0});
  CHECK(largest_remainder(30, {20, 10}) == std::vector<std::size_t>{20, 10});
  // ties resolve toward the earlier stratum
  CHECK(largest_remainder(1, {5, 5}) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("stratified split matches the hand-computed apportionment") {
  const auto expected = [] {
    std::ifstream is(testing::fixtures_dir() / "expected" / "apportionment.json");
    return nlohmann::json::parse(is);
  }();
  SplitConfig config{kAllFrames, 10, 5, 7};
  DatasetSplit split = stratified_split(fixture_store(), config);
  REQUIRE(split.icl_pool.size() == 10);
  REQUIRE(split.eval_set.size() == 5);
  auto icl = per_stratum(fixture_store(), split.icl_pool);
  auto ev = per_stratum(fixture_store(), split.eval_set);
  const auto& oracle = expected.at("all3_icl10_eval5");
  for (std::size_t i = 0; i < oracle.at("strata").size(); ++i) {
    const std::string stratum = oracle.at("strata")[i].get<std::string>();
    CHECK(icl[stratum] == oracle.at("icl")[i].get<std::size_t>());
    CHECK(ev[stratum] == oracle.at("eval")[i].get<std::size_t>());
  }
}

TEST_CASE("zero ICL examples still yields a valid eval set") {
  SplitConfig config{kAllFrames, 0, 5, 3};
  DatasetSplit split = stratified_split(fixture_store(), config);
  CHECK(split.icl_pool.empty());
  CHECK(split.eval_set.size() == 5);
}

TEST_CASE("same store and config produce identical splits") {
  SplitConfig config{kAllFrames, 12, 8, 99};
  DatasetSplit a = stratified_split(fixture_store(), config);
  DatasetSplit b = stratified_split(fixture_store(), config);
  CHECK(a.icl_pool == b.icl_pool);
  CHECK(a.eval_set == b.eval_set);
}

TEST_CASE("pools and eval sets are disjoint for any seed and size") {
  SplitMix64 rng(0xfeed);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n_icl = rng.bounded(30);
    const std::size_t n_eval = 1 + rng.bounded(36 - n_icl);
    SplitConfig config{kAllFrames, n_icl, n_eval, rng.next()};
    DatasetSplit split = stratified_split(fixture_store(), config);
    REQUIRE(split.icl_pool.size() == n_icl);
    REQUIRE(split.eval_set.size() == n_eval);
    std::set<std::string> seen(split.icl_pool.begin(), split.icl_pool.end());
    CHECK(seen.size() == n_icl);
    for (const auto& id : split.eval_set) {
      CHECK(!seen.count(id));
      seen.insert(id);
    }
  }
}

TEST_CASE("seeds reshuffle within strata but never the apportionment") {
  SplitConfig a{kAllFrames, 15, 10, 1};
  SplitConfig b{kAllFrames, 15, 10, 2};
  DatasetSplit sa = stratified_split(fixture_store(), a);
  DatasetSplit sb = stratified_split(fixture_store(), b);
  CHECK(per_stratum(fixture_store(), sa.icl_pool) == per_stratum(fixture_store(), sb.icl_pool));
  CHECK(per_stratum(fixture_store(), sa.eval_set) == per_stratum(fixture_store(), sb.eval_set));
  CHECK(sa.icl_pool != sb.icl_pool);  // 36 exemplars; identical draws would be freakish
}

TEST_CASE("insufficient corpora are rejected with per-LU availability") {
  SplitConfig config{{"Rescuing"}, 10, 5, 1};  // Rescuing has 12 exemplars
  try {
    (void)stratified_split(fixture_store(), config);
    FAIL("expected InsufficientExamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientExamples);
    CHECK(std::string(e.what()).find("Rescuing/rescue.v=8") != std::string::npos);
  }
}

TEST_CASE("shot prefixes nest") {
  SplitConfig config{kAllFrames, 15, 10, 7};
  DatasetSplit split = stratified_split(fixture_store(), config);
  CHECK(shot_prefix(split, 0).empty());
  CHECK(shot_prefix(split, 15) == split.icl_pool);
  std::vector<std::string> last;
  for (std::size_t k : {std::size_t{5}, std::size_t{10}, std::size_t{15}}) {
    auto prefix = shot_prefix(split, k);
    REQUIRE(prefix.size() == k);
    CHECK(std::equal(last.begin(), last.end(), prefix.begin()));
    last = prefix;
  }
  try {
    (void)shot_prefix(split, 16);
    FAIL("expected NOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NOutOfRange);
  }
}

TEST_CASE("shot schedules follow the small and large model patterns") {
  CHECK(shot_schedule(ModelProfile::Small, 150) ==
        std::vector<std::size_t>{0, 5, 10, 25, 50, 75, 100, 125, 150});
  CHECK(shot_schedule(ModelProfile::Large, 150) == std::vector<std::size_t>{0, 50, 100, 150});
  CHECK(shot_schedule(ModelProfile::Small, 0) == std::vector<std::size_t>{0});
  CHECK(shot_schedule(ModelProfile::Small, 7) == std::vector<std::size_t>{0, 5, 7});
  CHECK(shot_schedule(ModelProfile::Large, 130) == std::vector<std::size_t>{0, 50, 100, 130});
}

TEST_CASE("splits persist and reload exactly") {
  testing::TempDir tmp("split-io");
  SplitConfig config{kAllFrames, 15, 10, 7};
  DatasetSplit split = stratified_split(fixture_store(), config);
  save_split(split, tmp.path() / "split.json");
  DatasetSplit loaded = load_split(tmp.path() / "split.json");
  CHECK(loaded.icl_pool == split.icl_pool);
  CHECK(loaded.eval_set == split.eval_set);
  CHECK(loaded.config.seed == split.config.seed);
  CHECK(loaded.config.frame_names == split.config.frame_names);
}

}  // TEST_SUITE

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "framecl/store.hpp"

namespace framecl {

struct SplitConfig {
  std::vector<std::string> frame_names;
  std::size_t n_icl = 0;
  std::size_t n_eval = 1;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  SplitConfig config;
  std::vector<std::string> icl_pool;  // fixed shot order
  std::vector<std::string> eval_set;
};

// Deterministic 64-bit stream; stable across platforms, unlike the
// standard distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform draw in [0, n) via rejection sampling.
  std::uint64_t bounded(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t fnv1a(std::string_view s);

// Largest-remainder apportionment of n over counts; ties go to the earlier
// stratum. Requires n <= sum(counts).
std::vector<std::size_t> largest_remainder(std::size_t n, const std::vector<std::size_t>& counts);

// Stratified sampling by lexical-unit frequency: the ICL pool is apportioned
// over per-LU exemplar counts, the eval set over what remains, so the two
// are disjoint by construction. Strata are enumerated frame by frame in
// config order, LUs in stored order.
DatasetSplit stratified_split(const FrameStore& store, const SplitConfig& config);

// First n ids of the pool; prefix-consistent across n.
std::vector<std::string> shot_prefix(const DatasetSplit& split, std::size_t n);

enum class ModelProfile { Small, Large };

// Small: 0,5,10,25 then steps of 25; Large: 0 then steps of 50.
// max_shots is always included.
std::vector<std::size_t> shot_schedule(ModelProfile profile, std::size_t max_shots);

void save_split(const DatasetSplit& split, const std::filesystem::path& out);
DatasetSplit load_split(const std::filesystem::path& in);

}  // namespace framecl

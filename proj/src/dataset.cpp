#include "framecl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace framecl {

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::bounded(std::uint64_t n) {
  if (n < 2) return 0;
  const std::uint64_t threshold = -n % n;  // 2^64 mod n
  for (;;) {
    std::uint64_t x = next();
    if (x >= threshold) return x % n;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 rng(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL));
  return rng.next();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::size_t> largest_remainder(std::size_t n, const std::vector<std::size_t>& counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n > total)
    throw Error(ErrorCode::InsufficientExamples,
                "requested " + std::to_string(n) + " from " + std::to_string(total));
  std::vector<std::size_t> base(counts.size());
  std::vector<std::size_t> rem(counts.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    base[i] = total ? n * counts[i] / total : 0;
    rem[i] = total ? n * counts[i] % total : 0;
    assigned += base[i];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; k < n - assigned; ++k) base[order[k]] += 1;
  return base;
}

namespace {

struct Stratum {
  std::string frame;
  std::string lu;
  std::vector<std::string> ids;  // stored exemplar order
};

std::vector<Stratum> collect_strata(const FrameStore& store, const SplitConfig& config) {
  std::vector<Stratum> strata;
  for (const auto& frame_name : config.frame_names) {
    const Frame& frame = store.frame(frame_name);
    for (const auto& lu : frame.lexical_units)
      strata.push_back({frame.name, lu.name, lu.exemplar_ids});
  }
  return strata;
}

}  // namespace

DatasetSplit stratified_split(const FrameStore& store, const SplitConfig& config) {
  if (config.n_eval < 1)
    throw Error(ErrorCode::ConfigError, "n_eval must be at least 1");
  std::vector<Stratum> strata = collect_strata(store, config);
  std::vector<std::size_t> counts;
  counts.reserve(strata.size());
  std::size_t total = 0;
  for (const auto& s : strata) {
    counts.push_back(s.ids.size());
    total += s.ids.size();
  }
  if (total < config.n_icl + config.n_eval) {
    std::ostringstream os;
    os << "need " << config.n_icl + config.n_eval << " examples but only " << total
       << " are available;";
    for (const auto& s : strata) os << " " << s.frame << "/" << s.lu << "=" << s.ids.size();
    throw Error(ErrorCode::InsufficientExamples, os.str());
  }

  std::vector<std::size_t> icl_counts = largest_remainder(config.n_icl, counts);
  std::vector<std::size_t> remaining(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) remaining[i] = counts[i] - icl_counts[i];
  std::vector<std::size_t> eval_counts = largest_remainder(config.n_eval, remaining);

  DatasetSplit split;
  split.config = config;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    std::vector<std::string> ids = strata[i].ids;
    SplitMix64 rng(mix_seed(config.seed, i));
    for (std::size_t j = ids.size(); j > 1; --j)  // Fisher-Yates
      std::swap(ids[j - 1], ids[rng.bounded(j)]);
    for (std::size_t j = 0; j < icl_counts[i]; ++j) split.icl_pool.push_back(ids[j]);
    for (std::size_t j = 0; j < eval_counts[i]; ++j)
      split.eval_set.push_back(ids[icl_counts[i] + j]);
  }
  return split;
}

std::vector<std::string> shot_prefix(const DatasetSplit& split, std::size_t n) {
  if (n > split.icl_pool.size())
    throw Error(ErrorCode::NOutOfRange,
                std::to_string(n) + " > pool size " + std::to_string(split.icl_pool.size()));
  return {split.icl_pool.begin(), split.icl_pool.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::size_t> shot_schedule(ModelProfile profile, std::size_t max_shots) {
  std::vector<std::size_t> out{0};
  if (profile == ModelProfile::Small) {
    for (std::size_t s : {std::size_t{5}, std::size_t{10}, std::size_t{25}})
      if (s <= max_shots) out.push_back(s);
    for (std::size_t s = 50; s <= max_shots; s += 25) out.push_back(s);
  } else {
    for (std::size_t s = 50; s <= max_shots; s += 50) out.push_back(s);
  }
  if (out.back() != max_shots) out.push_back(max_shots);
  return out;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& out) {
  nlohmann::ordered_json j;
  j["schema"] = "framecl/split/v1";
  j["config"] = {{"frames", split.config.frame_names},
                 {"n_icl", split.config.n_icl},
                 {"n_eval", split.config.n_eval},
                 {"seed", split.config.seed}};
  j["icl_pool"] = split.icl_pool;
  j["eval_set"] = split.eval_set;
  std::ofstream os(out, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + out.string());
  os << j.dump(1) << "\n";
}

DatasetSplit load_split(const std::filesystem::path& in) {
  std::ifstream is(in, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + in.string());
  nlohmann::json j = nlohmann::json::parse(is, nullptr, false);
  if (j.is_discarded() || j.value("schema", "") != "framecl/split/v1")
    throw Error(ErrorCode::SchemaVersionMismatch, in.string() + ": not a split file");
  DatasetSplit split;
  split.config.frame_names = j.at("config").at("frames").get<std::vector<std::string>>();
  split.config.n_icl = j.at("config").at("n_icl").get<std::size_t>();
  split.config.n_eval = j.at("config").at("n_eval").get<std::size_t>();
  split.config.seed = j.at("config").at("seed").get<std::uint64_t>();
  split.icl_pool = j.at("icl_pool").get<std::vector<std::string>>();
  split.eval_set = j.at("eval_set").get<std::vector<std::string>>();
  return split;
}

}  // namespace framecl

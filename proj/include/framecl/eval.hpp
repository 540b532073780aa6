#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "framecl/parser.hpp"
#include "framecl/types.hpp"

namespace framecl {

// One scoreable unit: a (sentence, frame, role, span) tuple. Targets carry
// the reserved role name "Target".
struct LabeledItem {
  std::string sentence_id;
  std::string frame_name;
  std::string role;
  Span span;

  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
  friend auto operator<=>(const LabeledItem&, const LabeledItem&) = default;
};

inline constexpr std::string_view kTargetRole = "Target";

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<std::size_t, std::size_t>> matched;  // (gold idx, pred idx)
};

// Strict multiset matching on exact tuple equality; each gold item consumes
// at most one prediction and vice versa.
MatchResult match_items(const std::vector<LabeledItem>& gold,
                        const std::vector<LabeledItem>& pred);

struct Metric {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// P=R=F1=1 when both sides are empty; 0 when exactly one side is.
Metric metric_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

enum class EvalScope { AllRoles, TargetOnly, ArgumentsOnly };
std::string_view to_string(EvalScope scope);

struct EvalReport {
  std::string scope;
  Metric micro;
  std::map<std::string, Metric> per_attribute;  // keyed by role
  std::map<std::string, Metric> per_frame;
  std::map<std::string, std::string> metadata;

  nlohmann::ordered_json to_json() const;
};

EvalReport micro_report(const std::vector<LabeledItem>& gold,
                        const std::vector<LabeledItem>& pred, EvalScope scope);

// Frame-target pair scoring, decomposed as pair / name / target.
struct PairItem {
  std::string sentence_id;
  std::string frame_name;
  Span target;
};

struct FiReport {
  EvalReport pair_exact;
  EvalReport name_only;
  EvalReport target_only;
};

FiReport fi_report(const std::vector<PairItem>& gold, const std::vector<PairItem>& pred);

// Flattens parsed instances into labeled items (target + arguments).
std::vector<LabeledItem> items_from_instances(const std::string& sentence_id,
                                              const std::vector<FrameInstance>& instances);
// Gold items of one example; non-core roles are dropped when core_only.
std::vector<LabeledItem> items_from_gold(const FrameStore& store, const AnnotatedExample& ex,
                                         bool core_only = true);

// CSV rows: scope,key,tp,fp,fn,precision,recall,f1 (full precision).
std::string report_csv(const EvalReport& report);

}  // namespace framecl

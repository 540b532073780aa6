#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "framecl/store.hpp"

namespace framecl::wire {

// The text protocol between prompts and model outputs. Predictions travel as
// a JSON array; FI entries carry {"frame","target"}, FSP/FSRL entries add
// "arguments": [{"role","text"}]. Argument text is always a verbatim
// substring of the sentence.

inline constexpr std::string_view kPairsPrefix = "Pairs: ";

nlohmann::ordered_json pair_entry(std::string_view frame, std::string_view target_text);

// Gold serialization of one example for a task. Arguments follow the
// frame-element stored order; non-core roles are dropped when core_only.
nlohmann::ordered_json gold_payload(const FrameStore& store, const AnnotatedExample& ex,
                                    TaskKind task, bool core_only = true);
std::string gold_payload_text(const FrameStore& store, const AnnotatedExample& ex, TaskKind task,
                              bool core_only = true);

// The user-turn input for a test item: the bare sentence, plus a
// "Pairs: [...]" line for FSRL.
std::string fi_input(std::string_view sentence);
std::string fsp_input(std::string_view sentence);
std::string fsrl_input(std::string_view sentence, const nlohmann::ordered_json& pairs);
std::string task_input(const FrameStore& store, const AnnotatedExample& ex, TaskKind task);

// Splits a user-turn input back into sentence and optional pairs payload.
struct ParsedInput {
  std::string sentence;
  std::optional<std::string> pairs_json;
};
ParsedInput split_input(std::string_view user_input);

// One in-context demonstration: (input text, expected output text).
std::pair<std::string, std::string> demonstration(const FrameStore& store,
                                                  const AnnotatedExample& ex, TaskKind task,
                                                  bool core_only = true);

}  // namespace framecl::wire

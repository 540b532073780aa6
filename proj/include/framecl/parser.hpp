#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "framecl/store.hpp"

namespace framecl {

struct FrameTargetPair {
  std::string frame_name;
  Span target;
  std::string target_text;

  friend bool operator==(const FrameTargetPair&, const FrameTargetPair&) = default;
};

struct PredictedArgument {
  std::string role;
  Span span;
  std::string text;

  friend bool operator==(const PredictedArgument&, const PredictedArgument&) = default;
};

struct FrameInstance {
  FrameTargetPair pair;
  std::vector<PredictedArgument> arguments;

  friend bool operator==(const FrameInstance&, const FrameInstance&) = default;
};

// Stable warning codes surfaced in run records.
namespace warning {
inline constexpr std::string_view kNoPayload = "NoPayload";
inline constexpr std::string_view kNotFound = "NotFound";
inline constexpr std::string_view kUnknownFrame = "UnknownFrame";
inline constexpr std::string_view kUnknownRole = "UnknownRole";
inline constexpr std::string_view kUnmatchedPair = "UnmatchedPair";
inline constexpr std::string_view kMalformedEntry = "MalformedEntry";
}  // namespace warning

struct ParseWarning {
  std::string code;
  std::string detail;
};

struct ParseOutcome {
  std::vector<FrameInstance> instances;
  std::vector<ParseWarning> warnings;
  std::vector<std::string> dropped;  // raw fragments that could not be grounded
};

// First well-formed JSON array in raw text, ignoring code fences and prose.
std::optional<nlohmann::json> extract_payload(const std::string& raw);

// Leftmost occurrence of needle at or after `after`. Case-sensitive; runs of
// whitespace in the needle match runs of whitespace in the sentence. The
// needle is trimmed first. Returns nullopt when absent.
std::optional<Span> ground_span(std::string_view sentence, std::string_view needle,
                                std::size_t after = 0);

// Total on arbitrary input: failures become warnings plus fewer predictions.
// For FSRL, expected_pairs is the pair list sent in the request; predicted
// entries align to it by (frame name, target text) and take its spans.
ParseOutcome parse_prediction(TaskKind task, const std::string& raw, const std::string& sentence,
                              const FrameStore& store,
                              const std::vector<FrameTargetPair>& expected_pairs = {},
                              bool core_only = true);

}  // namespace framecl

#include "framecl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace framecl {

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

// Attempts a whitespace-run-tolerant match of needle at sentence[pos..];
// returns the end offset on success.
std::optional<std::size_t> match_at(std::string_view sentence, std::string_view needle,
                                    std::size_t pos) {
  std::size_t i = 0, j = pos;
  while (i < needle.size()) {
    if (is_ws(needle[i])) {
      if (j >= sentence.size() || !is_ws(sentence[j])) return std::nullopt;
      while (i < needle.size() && is_ws(needle[i])) ++i;
      while (j < sentence.size() && is_ws(sentence[j])) ++j;
    } else {
      if (j >= sentence.size() || sentence[j] != needle[i]) return std::nullopt;
      ++i;
      ++j;
    }
  }
  return j;
}

}  // namespace

std::optional<Span> ground_span(std::string_view sentence, std::string_view needle,
                                std::size_t after) {
  needle = trim_view(needle);
  if (needle.empty()) return std::nullopt;
  for (std::size_t pos = after; pos + 1 <= sentence.size(); ++pos) {
    if (sentence[pos] != needle[0]) continue;
    if (auto end = match_at(sentence, needle, pos)) return Span{pos, *end};
  }
  return std::nullopt;
}

std::optional<nlohmann::json> extract_payload(const std::string& raw) {
  for (std::size_t pos = raw.find('['); pos != std::string::npos; pos = raw.find('[', pos + 1)) {
    // Bracket-matching scan that respects strings and escapes.
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = pos; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '[' || c == '{') ++depth;
      else if (c == ']' || c == '}') {
        --depth;
        if (depth == 0) {
          nlohmann::json j = nlohmann::json::parse(raw.substr(pos, i - pos + 1), nullptr, false);
          if (!j.is_discarded() && j.is_array()) return j;
          break;  // malformed candidate; try the next '['
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// Per-payload grounding state: each distinct needle keeps a cursor that
// advances past its grounded span, so repeated strings resolve to
// successive occurrences in payload order.
class Grounder {
 public:
  explicit Grounder(const std::string& sentence) : sentence_(sentence) {}

  std::optional<Span> ground(std::string_view needle) {
    std::string key(trim_view(needle));
    std::size_t after = 0;
    if (auto it = cursors_.find(key); it != cursors_.end()) after = it->second;
    auto span = ground_span(sentence_, key, after);
    if (span) cursors_[key] = span->end;
    return span;
  }

 private:
  const std::string& sentence_;
  std::map<std::string, std::size_t> cursors_;
};

std::string entry_fragment(const nlohmann::json& j) {
  std::string s = j.dump();
  if (s.size() > 200) s.resize(200);
  return s;
}

}  // namespace

ParseOutcome parse_prediction(TaskKind task, const std::string& raw, const std::string& sentence,
                              const FrameStore& store,
                              const std::vector<FrameTargetPair>& expected_pairs,
                              bool core_only) {
  ParseOutcome out;
  auto warn = [&](std::string_view code, std::string detail) {
    out.warnings.push_back({std::string(code), std::move(detail)});
  };

  auto payload = extract_payload(raw);
  if (!payload) {
    warn(warning::kNoPayload, "no JSON array found in response");
    return out;
  }

  Grounder grounder(sentence);
  std::vector<bool> pair_taken(expected_pairs.size(), false);

  for (const auto& entry : *payload) {
    if (!entry.is_object() || !entry.contains("frame") || !entry["frame"].is_string() ||
        !entry.contains("target") || !entry["target"].is_string()) {
      warn(warning::kMalformedEntry, entry_fragment(entry));
      out.dropped.push_back(entry_fragment(entry));
      continue;
    }
    const std::string frame_name = entry["frame"].get<std::string>();
    const std::string target_text = entry["target"].get<std::string>();
    const Frame* frame = store.find_frame(frame_name);
    if (!frame) {
      warn(warning::kUnknownFrame, frame_name);
      out.dropped.push_back(entry_fragment(entry));
      continue;
    }

    FrameInstance instance;
    if (task == TaskKind::FSRL) {
      // Align to the request's pair list; the pair's span is authoritative.
      bool matched = false;
      for (std::size_t i = 0; i < expected_pairs.size(); ++i) {
        if (pair_taken[i]) continue;
        if (expected_pairs[i].frame_name == frame_name &&
            expected_pairs[i].target_text == target_text) {
          pair_taken[i] = true;
          instance.pair = expected_pairs[i];
          matched = true;
          break;
        }
      }
      if (!matched) {
        warn(warning::kUnmatchedPair, frame_name + "/" + target_text);
        out.dropped.push_back(entry_fragment(entry));
        continue;
      }
    } else {
      auto span = grounder.ground(target_text);
      if (!span) {
        warn(warning::kNotFound, "target '" + target_text + "'");
        out.dropped.push_back(entry_fragment(entry));
        continue;
      }
      instance.pair = {frame_name, *span, std::string(span->slice(sentence))};
    }

    if (task != TaskKind::FI && entry.contains("arguments") && entry["arguments"].is_array()) {
      for (const auto& arg : entry["arguments"]) {
        if (!arg.is_object() || !arg.contains("role") || !arg["role"].is_string() ||
            !arg.contains("text") || !arg["text"].is_string()) {
          warn(warning::kMalformedEntry, entry_fragment(arg));
          continue;
        }
        const std::string role = arg["role"].get<std::string>();
        const std::string text = arg["text"].get<std::string>();
        const FrameElement* fe = frame->find_element(role);
        if (!fe || (core_only && fe->coreness != Coreness::Core)) {
          warn(warning::kUnknownRole, role + " under " + frame_name);
          continue;
        }
        auto span = grounder.ground(text);
        if (!span) {
          warn(warning::kNotFound, "argument '" + text + "'");
          out.dropped.push_back(entry_fragment(arg));
          continue;
        }
        instance.arguments.push_back({role, *span, std::string(span->slice(sentence))});
      }
    }
    out.instances.push_back(std::move(instance));
  }

  // Model stutter: identical instances collapse to one before scoring.
  std::vector<FrameInstance> unique;
  for (auto& inst : out.instances) {
    if (std::find(unique.begin(), unique.end(), inst) == unique.end())
      unique.push_back(std::move(inst));
  }
  out.instances = std::move(unique);
  return out;
}

}  // namespace framecl

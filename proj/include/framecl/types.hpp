#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace framecl {

inline constexpr std::string_view kCorpusSchema = "framecl/corpus/v1";
inline constexpr std::string_view kRunSchema = "framecl/run/v1";
inline constexpr std::string_view kCacheSchema = "framecl/cache/v1";
inline constexpr std::string_view kVersion = "0.1.0";

// Half-open character span [start, end) over a sentence, byte offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool valid_in(std::string_view sentence) const {
    return start < end && end <= sentence.size();
  }
  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  std::string_view slice(std::string_view sentence) const {
    return sentence.substr(start, end - start);
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class Coreness { Core, NonCore };

struct FrameElement {
  std::string name;
  std::string definition;
  Coreness coreness = Coreness::Core;
};

struct LexicalUnit {
  std::string name;        // lemma.pos, e.g. "rescue.v"
  std::string frame_name;
  std::vector<std::string> exemplar_ids;
};

struct Frame {
  std::string name;
  std::string definition;
  std::vector<FrameElement> elements;           // stored order
  std::optional<std::string> illustrative_sentence;
  std::vector<LexicalUnit> lexical_units;       // stored order

  const FrameElement* find_element(std::string_view element_name) const {
    for (const auto& fe : elements)
      if (fe.name == element_name) return &fe;
    return nullptr;
  }
  // Index into elements, or npos. Used to order serialized arguments.
  std::size_t element_index(std::string_view element_name) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].name == element_name) return i;
    return static_cast<std::size_t>(-1);
  }
};

struct Argument {
  std::string fe_name;
  Span span;
};

// One sentence with exactly one target span and zero or more FE spans.
struct AnnotatedExample {
  std::string id;
  std::string sentence;
  std::string frame_name;
  std::string lu_name;
  Span target;
  std::vector<Argument> arguments;  // stored order; discontinuous FEs repeat fe_name

  std::string_view target_text() const { return target.slice(sentence); }
};

enum class TaskKind { FSP, FI, FSRL };
enum class AblationLevel { NoFrameInfo, FrameDefOnly, FullFrameInfo };

std::string_view to_string(TaskKind task);
std::string_view to_string(AblationLevel level);
TaskKind task_from_string(std::string_view s);
AblationLevel ablation_from_string(std::string_view s);

}  // namespace framecl

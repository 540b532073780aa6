#include "framecl/wire.hpp"

#include <algorithm>

namespace framecl::wire {

using nlohmann::ordered_json;

ordered_json pair_entry(std::string_view frame, std::string_view target_text) {
  ordered_json j;
  j["frame"] = frame;
  j["target"] = target_text;
  return j;
}

ordered_json gold_payload(const FrameStore& store, const AnnotatedExample& ex, TaskKind task,
                          bool core_only) {
  ordered_json entry = pair_entry(ex.frame_name, ex.target_text());
  if (task != TaskKind::FI) {
    const Frame& frame = store.frame(ex.frame_name);
    // Stable sort by element index keeps XML order for discontinuous FEs.
    std::vector<const Argument*> args;
    for (const auto& a : ex.arguments) {
      const FrameElement* fe = frame.find_element(a.fe_name);
      if (core_only && (!fe || fe->coreness != Coreness::Core)) continue;
      args.push_back(&a);
    }
    std::stable_sort(args.begin(), args.end(), [&](const Argument* a, const Argument* b) {
      return frame.element_index(a->fe_name) < frame.element_index(b->fe_name);
    });
    auto arr = ordered_json::array();
    for (const Argument* a : args)
      arr.push_back({{"role", a->fe_name}, {"text", a->span.slice(ex.sentence)}});
    entry["arguments"] = std::move(arr);
  }
  return ordered_json::array({std::move(entry)});
}

std::string gold_payload_text(const FrameStore& store, const AnnotatedExample& ex, TaskKind task,
                              bool core_only) {
  return gold_payload(store, ex, task, core_only).dump();
}

std::string fi_input(std::string_view sentence) { return std::string(sentence); }
std::string fsp_input(std::string_view sentence) { return std::string(sentence); }

std::string fsrl_input(std::string_view sentence, const ordered_json& pairs) {
  return std::string(sentence) + "\n" + std::string(kPairsPrefix) + pairs.dump();
}

std::string task_input(const FrameStore& store, const AnnotatedExample& ex, TaskKind task) {
  switch (task) {
    case TaskKind::FI: return fi_input(ex.sentence);
    case TaskKind::FSP: return fsp_input(ex.sentence);
    case TaskKind::FSRL: {
      auto pairs = ordered_json::array({pair_entry(ex.frame_name, ex.target_text())});
      return fsrl_input(ex.sentence, pairs);
    }
  }
  return {};
}

ParsedInput split_input(std::string_view user_input) {
  ParsedInput out;
  std::size_t eol = user_input.find('\n');
  out.sentence = std::string(user_input.substr(0, eol));
  if (eol != std::string_view::npos) {
    std::string_view rest = user_input.substr(eol + 1);
    if (rest.substr(0, kPairsPrefix.size()) == kPairsPrefix)
      out.pairs_json = std::string(rest.substr(kPairsPrefix.size()));
  }
  return out;
}

std::pair<std::string, std::string> demonstration(const FrameStore& store,
                                                  const AnnotatedExample& ex, TaskKind task,
                                                  bool core_only) {
  return {task_input(store, ex, task), gold_payload_text(store, ex, task, core_only)};
}

}  // namespace framecl::wire

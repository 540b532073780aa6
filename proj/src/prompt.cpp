#include "framecl/prompt.hpp"

#include <algorithm>
#include <set>

#include "framecl/hash.hpp"
#include "framecl/wire.hpp"

#include "templates_embedded.inc"

namespace framecl {

using nlohmann::ordered_json;

std::string_view Prompt::section(std::string_view name) const {
  auto it = section_offsets.find(std::string(name));
  if (it == section_offsets.end()) return {};
  return std::string_view(text).substr(it->second.first, it->second.second - it->second.first);
}

std::string Prompt::digest() const { return sha256_hex(text); }

BudgetCheck estimate_prompt_budget(const Prompt& prompt, std::size_t limit) {
  if (prompt.text.size() <= limit) return {true, 0};
  return {false, prompt.text.size() - limit};
}

PromptLibrary PromptLibrary::embedded() {
  PromptLibrary lib;
  for (const auto& entry : kEmbeddedTemplates) lib.templates_.add(entry.name, entry.text);
  return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary lib;
  lib.templates_ = tmpl::TemplateSet::from_directory(dir);
  return lib;
}

std::string PromptLibrary::digest() const {
  std::string all;
  for (const auto& [name, text] : templates_.sources()) {
    all += name;
    all += '\0';
    all += text;
    all += '\0';
  }
  return sha256_hex(all);
}

std::pair<std::string, std::string> PromptLibrary::render_fsrl_shot(const FrameStore& store,
                                                                    const AnnotatedExample& ex,
                                                                    bool core_only) const {
  return wire::demonstration(store, ex, TaskKind::FSRL, core_only);
}

namespace {

const char* template_file(TaskKind task) {
  switch (task) {
    case TaskKind::FSP: return "fsp.tmpl";
    case TaskKind::FI: return "fi.tmpl";
    case TaskKind::FSRL: return "fsrl.tmpl";
  }
  return "fi.tmpl";
}

constexpr std::string_view kSectionOrder[] = {"Goal", "Events", "Guidelines", "Examples"};

}  // namespace

Prompt PromptLibrary::render(const FrameStore& store, const PromptConfig& config) const {
  if (config.ablation != AblationLevel::FullFrameInfo && !config.shot_ids.empty())
    throw Error(ErrorCode::ConfigError,
                "ablation levels below full frame info are zero-shot; got " +
                    std::to_string(config.shot_ids.size()) + " shots");
  if (config.task == TaskKind::FSRL && config.frame_names.empty())
    throw Error(ErrorCode::ConfigError, "FSRL prompts need at least one frame");

  std::set<std::string> allowed_frames;
  ordered_json frames = ordered_json::array();
  for (const auto& name : config.frame_names) {
    const Frame& frame = store.frame(name);  // throws UnknownFrame
    allowed_frames.insert(frame.name);
    ordered_json fj;
    fj["name"] = frame.name;
    fj["definition"] = frame.definition;
    fj["illustration"] = frame.illustrative_sentence.value_or("");
    ordered_json elements = ordered_json::array();
    for (const auto& fe : frame.elements) {
      if (config.core_only && fe.coreness != Coreness::Core) continue;
      elements.push_back({{"name", fe.name}, {"definition", fe.definition}});
    }
    fj["elements"] = std::move(elements);
    frames.push_back(std::move(fj));
  }

  ordered_json shots = ordered_json::array();
  for (const auto& id : config.shot_ids) {
    const AnnotatedExample& ex = store.example(id);  // throws UnknownExample
    if (!allowed_frames.count(ex.frame_name))
      throw Error(ErrorCode::ShotFrameMismatch,
                  "shot " + id + " belongs to frame " + ex.frame_name +
                      " which is not in the prompt's frame list");
    auto [input, output] = wire::demonstration(store, ex, config.task, config.core_only);
    shots.push_back({{"input", input}, {"output", output}});
  }

  ordered_json ctx;
  ctx["task"] = to_string(config.task);
  ctx["show_events"] = config.ablation != AblationLevel::NoFrameInfo;
  ctx["show_elements"] = config.ablation == AblationLevel::FullFrameInfo;
  ctx["frames"] = std::move(frames);
  ctx["shots"] = std::move(shots);

  auto sections = templates_.render_sections(template_file(config.task), ctx);

  Prompt prompt;
  prompt.config = config;
  std::size_t order_pos = 0;
  for (const auto& [name, body] : sections) {
    while (order_pos < std::size(kSectionOrder) && kSectionOrder[order_pos] != name) ++order_pos;
    if (order_pos >= std::size(kSectionOrder))
      throw Error(ErrorCode::ConfigError, "unexpected prompt section '" + name + "'");
    if (!prompt.text.empty()) prompt.text += "\n";
    std::size_t start = prompt.text.size();
    prompt.text += body;
    prompt.section_offsets[name] = {start, prompt.text.size()};
  }
  if (!prompt.section_offsets.count("Goal") || !prompt.section_offsets.count("Guidelines"))
    throw Error(ErrorCode::ConfigError, "prompt template must render Goal and Guidelines");
  return prompt;
}

}  // namespace framecl

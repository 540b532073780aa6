#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "framecl/store.hpp"
#include "framecl/texttmpl.hpp"

namespace framecl {

struct PromptConfig {
  TaskKind task = TaskKind::FI;
  std::vector<std::string> frame_names;
  std::vector<std::string> shot_ids;  // ordered; prefix of the ICL pool
  AblationLevel ablation = AblationLevel::FullFrameInfo;
  bool core_only = true;
};

struct Prompt {
  std::string text;
  PromptConfig config;
  // Section name -> [start, end) offsets into text. Sections appear in
  // order Goal, Events, Guidelines, Examples; Events is absent under
  // NoFrameInfo and Examples is absent for zero shots.
  std::map<std::string, std::pair<std::size_t, std::size_t>> section_offsets;

  std::string_view section(std::string_view name) const;
  std::string digest() const;
};

struct BudgetCheck {
  bool fits = true;
  std::size_t excess = 0;  // characters over the limit when !fits
};

// Character-count budget gate; conservative stand-in for provider token
// limits.
BudgetCheck estimate_prompt_budget(const Prompt& prompt, std::size_t limit);

// Template assets for the three tasks plus shared partial blocks.
class PromptLibrary {
 public:
  static PromptLibrary embedded();  // compiled-in copy of templates/
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  // Deterministic four-section rendering; byte-identical for equal inputs.
  Prompt render(const FrameStore& store, const PromptConfig& config) const;

  // Demonstration for one FSRL shot: input lists the frame-target pair,
  // output completes it with the core arguments.
  std::pair<std::string, std::string> render_fsrl_shot(const FrameStore& store,
                                                       const AnnotatedExample& ex,
                                                       bool core_only = true) const;

  const tmpl::TemplateSet& templates() const { return templates_; }
  // Digest over all template sources; recorded in run records.
  std::string digest() const;

 private:
  tmpl::TemplateSet templates_;
};

}  // namespace framecl

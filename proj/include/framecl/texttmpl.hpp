#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "framecl/errors.hpp"

namespace framecl::tmpl {

// Logic-light text templates with named slots and loops:
//
//   {{ dotted.path }}                         value substitution
//   {% if path %} ... {% else %} ... {% endif %}
//   {% for name in path %} ... {% endfor %}   binds `name` and `loop.index`
//   {% include "other.tmpl" %}                splice a template from the set
//   {% section Name %} ... {% endsection %}   named top-level block
//
// A tag that sits alone on its line swallows the whole line, so control
// flow does not leak blank lines into the output. Rendering is a pure
// function of (template text, context): byte-identical across runs.
class TemplateSet {
 public:
  void add(std::string name, std::string text);
  bool contains(const std::string& name) const { return sources_.count(name) > 0; }
  const std::map<std::string, std::string>& sources() const { return sources_; }

  // Loads every *.tmpl under dir (recursively); names are /-separated
  // relative paths.
  static TemplateSet from_directory(const std::filesystem::path& dir);

  std::string render(const std::string& name, const nlohmann::ordered_json& context) const;

  // Renders the top-level sections of `name` in template order, dropping
  // sections whose rendered body is empty or whitespace-only.
  std::vector<std::pair<std::string, std::string>> render_sections(
      const std::string& name, const nlohmann::ordered_json& context) const;

 private:
  std::map<std::string, std::string> sources_;
};

}  // namespace framecl::tmpl

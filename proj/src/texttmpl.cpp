#include "framecl/texttmpl.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

namespace framecl::tmpl {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void parse_error(const std::string& tpl, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "template " + tpl + ": " + what);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Removes indentation and the trailing newline around tags that sit alone
// on their line.
std::string strip_tag_lines(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    std::string stripped = trim(line);
    bool tag_only = stripped.size() >= 4 && stripped.substr(0, 2) == "{%" &&
                    stripped.substr(stripped.size() - 2) == "%}" &&
                    stripped.find("{%", 2) == std::string::npos &&
                    stripped.find("%}") == stripped.size() - 2;
    if (tag_only) {
      out += stripped;
    } else {
      out += line;
      if (eol != std::string::npos) out += '\n';
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return out;
}

struct Node;
using NodeList = std::vector<Node>;

struct Node {
  enum class Kind { Text, Var, If, For, Include, Section } kind;
  std::string a;       // text / path / loop var / include name / section name
  std::string b;       // for: path
  NodeList body;
  NodeList else_body;  // if only
};

struct Token {
  enum class Kind { Text, Var, Tag } kind;
  std::string value;
};

std::vector<Token> tokenize(const std::string& tpl, const std::string& name) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t var = tpl.find("{{", pos);
    std::size_t tag = tpl.find("{%", pos);
    std::size_t next = std::min(var, tag);
    if (next == std::string::npos) {
      tokens.push_back({Token::Kind::Text, tpl.substr(pos)});
      break;
    }
    if (next > pos) tokens.push_back({Token::Kind::Text, tpl.substr(pos, next - pos)});
    if (next == var) {
      std::size_t end = tpl.find("}}", next);
      if (end == std::string::npos) parse_error(name, "unterminated {{");
      tokens.push_back({Token::Kind::Var, trim(std::string_view(tpl).substr(next + 2, end - next - 2))});
      pos = end + 2;
    } else {
      std::size_t end = tpl.find("%}", next);
      if (end == std::string::npos) parse_error(name, "unterminated {%");
      tokens.push_back({Token::Kind::Tag, trim(std::string_view(tpl).substr(next + 2, end - next - 2))});
      pos = end + 2;
    }
  }
  return tokens;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::istringstream is(s);
  std::string w;
  while (is >> w) words.push_back(w);
  return words;
}

// Recursive-descent over tokens; `until` names the closing tags accepted.
NodeList parse_nodes(const std::vector<Token>& tokens, std::size_t& i, const std::string& name,
                     const std::vector<std::string>& until, std::string* closed_by) {
  NodeList nodes;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    if (t.kind == Token::Kind::Text) {
      nodes.push_back({Node::Kind::Text, t.value, "", {}, {}});
      ++i;
      continue;
    }
    if (t.kind == Token::Kind::Var) {
      nodes.push_back({Node::Kind::Var, t.value, "", {}, {}});
      ++i;
      continue;
    }
    auto words = split_words(t.value);
    if (words.empty()) parse_error(name, "empty tag");
    const std::string& head = words[0];
    for (const auto& u : until) {
      if (head == u) {
        if (closed_by) *closed_by = head;
        ++i;
        return nodes;
      }
    }
    ++i;
    if (head == "if") {
      if (words.size() != 2) parse_error(name, "if takes one path");
      Node node{Node::Kind::If, words[1], "", {}, {}};
      std::string closer;
      node.body = parse_nodes(tokens, i, name, {"else", "endif"}, &closer);
      if (closer == "else") node.else_body = parse_nodes(tokens, i, name, {"endif"}, nullptr);
      nodes.push_back(std::move(node));
    } else if (head == "for") {
      if (words.size() != 4 || words[2] != "in") parse_error(name, "for syntax: for x in path");
      Node node{Node::Kind::For, words[1], words[3], {}, {}};
      node.body = parse_nodes(tokens, i, name, {"endfor"}, nullptr);
      nodes.push_back(std::move(node));
    } else if (head == "include") {
      if (words.size() != 2) parse_error(name, "include takes one name");
      std::string inc = words[1];
      if (inc.size() >= 2 && inc.front() == '"' && inc.back() == '"')
        inc = inc.substr(1, inc.size() - 2);
      nodes.push_back({Node::Kind::Include, inc, "", {}, {}});
    } else if (head == "section") {
      if (words.size() != 2) parse_error(name, "section takes one name");
      Node node{Node::Kind::Section, words[1], "", {}, {}};
      node.body = parse_nodes(tokens, i, name, {"endsection"}, nullptr);
      nodes.push_back(std::move(node));
    } else {
      parse_error(name, "unknown tag '" + head + "'");
    }
  }
  if (!until.empty()) parse_error(name, "missing closing tag");
  return nodes;
}

NodeList parse_template(const std::string& text, const std::string& name) {
  auto tokens = tokenize(strip_tag_lines(text), name);
  std::size_t i = 0;
  return parse_nodes(tokens, i, name, {}, nullptr);
}

struct Scope {
  const ordered_json* root;
  std::vector<std::pair<std::string, const ordered_json*>> bindings;

  const ordered_json* lookup(const std::string& path) const {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= path.size()) {
      std::size_t dot = path.find('.', pos);
      parts.push_back(path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    const ordered_json* cur = nullptr;
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
      if (it->first == parts[0]) {
        cur = it->second;
        break;
      }
    }
    std::size_t start = 1;
    if (!cur) {
      cur = root;
      start = 0;
    }
    for (std::size_t k = start; k < parts.size() && cur; ++k) {
      const std::string& key = parts[k];
      if (cur->is_object()) {
        auto it = cur->find(key);
        cur = it == cur->end() ? nullptr : &*it;
      } else if (cur->is_array() && !key.empty() &&
                 key.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t idx = std::stoul(key);
        cur = idx < cur->size() ? &(*cur)[idx] : nullptr;
      } else {
        cur = nullptr;
      }
    }
    return cur;
  }
};

bool truthy(const ordered_json* v) {
  if (!v || v->is_null()) return false;
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_number()) return v->get<double>() != 0.0;
  if (v->is_string()) return !v->get_ref<const std::string&>().empty();
  return !v->empty();
}

std::string stringify(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

class Renderer {
 public:
  Renderer(const std::map<std::string, std::string>& sources) : sources_(sources) {}

  void render_list(const NodeList& nodes, Scope& scope, const std::string& tpl, std::string& out) {
    for (const auto& node : nodes) render_node(node, scope, tpl, out);
  }

  std::vector<std::pair<std::string, std::string>> top_sections(const std::string& name,
                                                                const ordered_json& ctx) {
    const NodeList& nodes = parsed(name);
    Scope scope{&ctx, {}};
    std::vector<std::pair<std::string, std::string>> sections;
    for (const auto& node : nodes) {
      if (node.kind == Node::Kind::Section) {
        std::string body;
        render_list(node.body, scope, name, body);
        if (trim(body).empty()) continue;
        sections.emplace_back(node.a, std::move(body));
      } else if (node.kind == Node::Kind::Text) {
        if (!trim(node.a).empty())
          parse_error(name, "text outside sections: '" + trim(node.a) + "'");
      } else {
        parse_error(name, "only sections allowed at top level");
      }
    }
    return sections;
  }

  std::string render(const std::string& name, const ordered_json& ctx) {
    Scope scope{&ctx, {}};
    std::string out;
    render_list(parsed(name), scope, name, out);
    return out;
  }

 private:
  const NodeList& parsed(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    auto src = sources_.find(name);
    if (src == sources_.end())
      throw Error(ErrorCode::ConfigError, "no template named '" + name + "'");
    return cache_.emplace(name, parse_template(src->second, name)).first->second;
  }

  void render_node(const Node& node, Scope& scope, const std::string& tpl, std::string& out) {
    switch (node.kind) {
      case Node::Kind::Text:
        out += node.a;
        return;
      case Node::Kind::Var: {
        const ordered_json* v = scope.lookup(node.a);
        if (!v) parse_error(tpl, "unknown value '" + node.a + "'");
        out += stringify(*v);
        return;
      }
      case Node::Kind::If: {
        if (truthy(scope.lookup(node.a)))
          render_list(node.body, scope, tpl, out);
        else
          render_list(node.else_body, scope, tpl, out);
        return;
      }
      case Node::Kind::For: {
        const ordered_json* list = scope.lookup(node.b);
        if (!list) parse_error(tpl, "unknown list '" + node.b + "'");
        if (!list->is_array()) parse_error(tpl, "'" + node.b + "' is not a list");
        for (std::size_t i = 0; i < list->size(); ++i) {
          ordered_json loop{{"index", i + 1}, {"first", i == 0}, {"last", i + 1 == list->size()}};
          scope.bindings.emplace_back(node.a, &(*list)[i]);
          scope.bindings.emplace_back("loop", &loop);
          render_list(node.body, scope, tpl, out);
          scope.bindings.pop_back();
          scope.bindings.pop_back();
        }
        return;
      }
      case Node::Kind::Include:
        render_list(parsed(node.a), scope, node.a, out);
        return;
      case Node::Kind::Section:
        render_list(node.body, scope, tpl, out);
        return;
    }
  }

  const std::map<std::string, std::string>& sources_;
  std::map<std::string, NodeList> cache_;
};

}  // namespace

void TemplateSet::add(std::string name, std::string text) {
  sources_[std::move(name)] = std::move(text);
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir) {
  TemplateSet set;
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".tmpl") continue;
    std::ifstream is(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    set.add(entry.path().lexically_relative(dir).generic_string(), buf.str());
  }
  return set;
}

std::string TemplateSet::render(const std::string& name, const nlohmann::ordered_json& ctx) const {
  Renderer r(sources_);
  return r.render(name, ctx);
}

std::vector<std::pair<std::string, std::string>> TemplateSet::render_sections(
    const std::string& name, const nlohmann::ordered_json& ctx) const {
  Renderer r(sources_);
  return r.top_sections(name, ctx);
}

}  // namespace framecl::tmpl

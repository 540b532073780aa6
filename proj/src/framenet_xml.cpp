#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "framecl/store.hpp"

namespace framecl {
namespace {

namespace pt = boost::property_tree;

std::vector<std::filesystem::path> xml_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".xml")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());  // directory order is unspecified
  return files;
}

std::string collapse_ws(const std::string& s) {
  std::string out;
  bool in_ws = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

std::string strip_tags(const std::string& s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out += c;
  }
  return out;
}

// FrameNet definitions embed escaped def-root markup; the prose before the
// first <ex> is the definition, the first <ex> body is the illustration.
struct ParsedDefinition {
  std::string text;
  std::optional<std::string> illustration;
};

ParsedDefinition parse_definition_markup(const std::string& raw) {
  ParsedDefinition out;
  auto ex_start = raw.find("<ex>");
  out.text = collapse_ws(strip_tags(raw.substr(0, ex_start)));
  if (ex_start != std::string::npos) {
    auto ex_end = raw.find("</ex>", ex_start);
    if (ex_end != std::string::npos) {
      std::string body = collapse_ws(strip_tags(raw.substr(ex_start + 4, ex_end - ex_start - 4)));
      if (!body.empty()) out.illustration = body;
    }
  }
  return out;
}

Coreness coreness_from(const std::string& core_type) {
  // Core-Unexpressed counts as core in FrameNet's own reports.
  if (core_type == "Core" || core_type == "Core-Unexpressed") return Coreness::Core;
  return Coreness::NonCore;
}

pt::ptree read_xml_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + file.string());
  pt::ptree tree;
  try {
    pt::read_xml(is, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::ValidationFailure, file.string() + ": " + e.what());
  }
  return tree;
}

Frame parse_frame_xml(const std::filesystem::path& file) {
  pt::ptree tree = read_xml_file(file);
  const pt::ptree& root = tree.get_child("frame");
  Frame frame;
  frame.name = root.get<std::string>("<xmlattr>.name");
  ParsedDefinition def = parse_definition_markup(root.get<std::string>("definition", ""));
  frame.definition = def.text;
  frame.illustrative_sentence = def.illustration;
  for (const auto& [key, node] : root) {
    if (key == "FE") {
      FrameElement fe;
      fe.name = node.get<std::string>("<xmlattr>.name");
      fe.coreness = coreness_from(node.get<std::string>("<xmlattr>.coreType", "Peripheral"));
      fe.definition = parse_definition_markup(node.get<std::string>("definition", "")).text;
      frame.elements.push_back(std::move(fe));
    } else if (key == "lexUnit") {
      LexicalUnit lu;
      lu.name = node.get<std::string>("<xmlattr>.name");
      lu.frame_name = frame.name;
      frame.lexical_units.push_back(std::move(lu));
    }
  }
  return frame;
}

struct RawLabel {
  std::string name;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive, as in the XML
};

std::vector<RawLabel> layer_labels(const pt::ptree& layer) {
  std::vector<RawLabel> labels;
  for (const auto& [key, node] : layer) {
    if (key != "label") continue;
    auto start = node.get_optional<long long>("<xmlattr>.start");
    auto end = node.get_optional<long long>("<xmlattr>.end");
    if (!start || !end) continue;  // null-instantiated FE, not an overt span
    if (*start < 0 || *end < *start) continue;
    labels.push_back({node.get<std::string>("<xmlattr>.name", ""),
                      static_cast<std::size_t>(*start), static_cast<std::size_t>(*end)});
  }
  return labels;
}

void parse_lu_sentences(const pt::ptree& lu_root, const std::string& lu_name,
                        const std::string& frame_name, const std::filesystem::path& file,
                        StoreBuilder& builder, ImportReport& report) {
  for (const auto& [sc_key, sub_corpus] : lu_root) {
    if (sc_key != "subCorpus") continue;
    for (const auto& [s_key, sentence_node] : sub_corpus) {
      if (s_key != "sentence") continue;
      const std::string text = sentence_node.get<std::string>("text", "");
      for (const auto& [a_key, aset] : sentence_node) {
        if (a_key != "annotationSet") continue;
        if (aset.get<std::string>("<xmlattr>.status", "") == "UNANN") continue;
        const std::string aset_id = aset.get<std::string>("<xmlattr>.ID", "");
        std::vector<RawLabel> targets;
        std::vector<RawLabel> fes;
        for (const auto& [l_key, layer] : aset) {
          if (l_key != "layer") continue;
          const std::string layer_name = layer.get<std::string>("<xmlattr>.name", "");
          const int rank = layer.get<int>("<xmlattr>.rank", 1);
          if (layer_name == "Target") {
            auto labels = layer_labels(layer);
            targets.insert(targets.end(), labels.begin(), labels.end());
          } else if (layer_name == "FE" && rank == 1) {
            auto labels = layer_labels(layer);
            fes.insert(fes.end(), labels.begin(), labels.end());
          }
        }
        auto skip = [&](const std::string& reason) {
          report.skipped.push_back({file.filename().string(), aset_id, reason});
        };
        if (targets.size() != 1) {
          skip(targets.empty() ? "no target label" : "multiple target labels");
          continue;
        }
        AnnotatedExample ex;
        ex.id = aset_id;
        ex.sentence = text;
        ex.frame_name = frame_name;
        ex.lu_name = lu_name;
        ex.target = Span{targets[0].start, targets[0].end + 1};
        for (const auto& label : fes)
          ex.arguments.push_back({label.name, Span{label.start, label.end + 1}});
        std::string reason;
        if (builder.add_example(std::move(ex), &reason)) {
          ++report.examples_loaded;
        } else {
          skip(reason);
        }
      }
    }
  }
}

std::string detect_release(const std::filesystem::path& frame_xml_dir) {
  std::error_code ec;
  auto index = std::filesystem::absolute(frame_xml_dir, ec).parent_path() / "frameIndex.xml";
  if (!std::filesystem::exists(index, ec)) return "unknown";
  try {
    pt::ptree tree = read_xml_file(index);
    return tree.get<std::string>("frameIndex.<xmlattr>.XMLCreated", "unknown");
  } catch (...) {
    return "unknown";
  }
}

}  // namespace

ImportResult import_framenet(const std::filesystem::path& frame_xml_dir,
                             const std::filesystem::path& lu_xml_dir,
                             const ImportOptions& options) {
  StoreBuilder builder;
  ImportReport report;
  builder.set_release(detect_release(frame_xml_dir));

  for (const auto& file : xml_files(frame_xml_dir)) {
    builder.add_frame(parse_frame_xml(file));
    ++report.frames_loaded;
  }

  for (const auto& file : xml_files(lu_xml_dir)) {
    pt::ptree tree = read_xml_file(file);
    const pt::ptree& root = tree.get_child("lexUnit");
    const std::string lu_name = root.get<std::string>("<xmlattr>.name");
    const std::string frame_name = root.get<std::string>("<xmlattr>.frame");
    if (!builder.has_frame(frame_name)) {
      if (options.skip_unknown_lu_frames) {
        report.skipped.push_back({file.filename().string(), "", "frame " + frame_name + " not loaded"});
        continue;
      }
      throw Error(ErrorCode::MissingFrameFile,
                  file.string() + " references frame " + frame_name +
                      " which is not present in " + frame_xml_dir.string());
    }
    parse_lu_sentences(root, lu_name, frame_name, file, builder, report);
    ++report.lexical_units_loaded;
  }
  FrameStore store = builder.build();
  return {std::move(store), std::move(report)};
}

}  // namespace framecl

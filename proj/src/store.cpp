#include "framecl/store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace framecl {

using nlohmann::ordered_json;

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::FSP: return "fsp";
    case TaskKind::FI: return "fi";
    case TaskKind::FSRL: return "fsrl";
  }
  return "?";
}

std::string_view to_string(AblationLevel level) {
  switch (level) {
    case AblationLevel::NoFrameInfo: return "no_frame_info";
    case AblationLevel::FrameDefOnly: return "frame_def_only";
    case AblationLevel::FullFrameInfo: return "full_frame_info";
  }
  return "?";
}

TaskKind task_from_string(std::string_view s) {
  if (s == "fsp") return TaskKind::FSP;
  if (s == "fi") return TaskKind::FI;
  if (s == "fsrl") return TaskKind::FSRL;
  throw Error(ErrorCode::ConfigError, "unknown task: " + std::string(s));
}

AblationLevel ablation_from_string(std::string_view s) {
  if (s == "no_frame_info") return AblationLevel::NoFrameInfo;
  if (s == "frame_def_only") return AblationLevel::FrameDefOnly;
  if (s == "full_frame_info") return AblationLevel::FullFrameInfo;
  throw Error(ErrorCode::ConfigError, "unknown ablation level: " + std::string(s));
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFrame: return "UnknownFrame";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::UnknownSentence: return "UnknownSentence";
    case ErrorCode::MissingFrameFile: return "MissingFrameFile";
    case ErrorCode::OffsetOutOfBounds: return "OffsetOutOfBounds";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
    case ErrorCode::InsufficientExamples: return "InsufficientExamples";
    case ErrorCode::NOutOfRange: return "NOutOfRange";
    case ErrorCode::ShotFrameMismatch: return "ShotFrameMismatch";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ProviderRefusal: return "ProviderRefusal";
    case ErrorCode::ProviderExhausted: return "ProviderExhausted";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

const std::vector<Frame>& FrameStore::frames() const { return data_->frames; }
const std::vector<AnnotatedExample>& FrameStore::examples() const { return data_->examples; }
const std::string& FrameStore::release() const { return data_->release; }

const Frame* FrameStore::find_frame(std::string_view name) const {
  auto it = data_->frame_index.find(name);
  return it == data_->frame_index.end() ? nullptr : &data_->frames[it->second];
}

const Frame& FrameStore::frame(std::string_view name) const {
  if (const Frame* f = find_frame(name)) return *f;
  throw Error(ErrorCode::UnknownFrame, std::string(name));
}

const AnnotatedExample* FrameStore::find_example(std::string_view id) const {
  auto it = data_->example_index.find(id);
  return it == data_->example_index.end() ? nullptr : &data_->examples[it->second];
}

const AnnotatedExample& FrameStore::example(std::string_view id) const {
  if (const AnnotatedExample* e = find_example(id)) return *e;
  throw Error(ErrorCode::UnknownExample, std::string(id));
}

const AnnotatedExample* FrameStore::find_by_sentence(std::string_view sentence) const {
  auto it = data_->sentence_index.find(sentence);
  return it == data_->sentence_index.end() ? nullptr : &data_->examples[it->second];
}

std::vector<FrameElement> FrameStore::core_elements(std::string_view frame_name) const {
  const Frame& f = frame(frame_name);
  std::vector<FrameElement> out;
  for (const auto& fe : f.elements)
    if (fe.coreness == Coreness::Core) out.push_back(fe);
  return out;
}

const std::vector<std::string>& FrameStore::exemplars_of(std::string_view frame_name,
                                                         std::string_view lu_name) const {
  const Frame& f = frame(frame_name);
  for (const auto& lu : f.lexical_units)
    if (lu.name == lu_name) return lu.exemplar_ids;
  throw Error(ErrorCode::ValidationFailure,
              "no lexical unit " + std::string(lu_name) + " in frame " + std::string(frame_name));
}

void StoreBuilder::set_release(std::string release) { data_.release = std::move(release); }

bool StoreBuilder::has_frame(std::string_view name) const {
  return data_.frame_index.count(name) > 0;
}

void StoreBuilder::add_frame(Frame frame) {
  if (frame.name.empty())
    throw Error(ErrorCode::ValidationFailure, "frame with empty name");
  if (data_.frame_index.count(frame.name))
    throw Error(ErrorCode::ValidationFailure, "duplicate frame " + frame.name);
  bool has_core = false;
  std::set<std::string> names;
  for (const auto& fe : frame.elements) {
    if (fe.name.empty() || fe.definition.empty())
      throw Error(ErrorCode::ValidationFailure,
                  "frame " + frame.name + ": element with empty name or definition");
    if (fe.name == "Target")
      throw Error(ErrorCode::ValidationFailure,
                  "frame " + frame.name + ": 'Target' is reserved and cannot be an element name");
    if (!names.insert(fe.name).second)
      throw Error(ErrorCode::ValidationFailure,
                  "frame " + frame.name + ": duplicate element " + fe.name);
    has_core |= fe.coreness == Coreness::Core;
  }
  if (!has_core)
    throw Error(ErrorCode::ValidationFailure, "frame " + frame.name + " has no Core element");
  data_.frame_index.emplace(frame.name, data_.frames.size());
  data_.frames.push_back(std::move(frame));
}

bool StoreBuilder::add_example(AnnotatedExample ex, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  auto fit = data_.frame_index.find(ex.frame_name);
  if (fit == data_.frame_index.end()) return fail("unknown frame " + ex.frame_name);
  const Frame& frame = data_.frames[fit->second];
  if (ex.id.empty()) return fail("empty example id");
  if (data_.example_index.count(ex.id)) return fail("duplicate example id " + ex.id);
  if (!ex.target.valid_in(ex.sentence)) return fail("target span out of bounds");
  std::vector<Span> spans{ex.target};
  for (const auto& arg : ex.arguments) {
    if (!frame.find_element(arg.fe_name))
      return fail("argument role " + arg.fe_name + " is not an element of " + ex.frame_name);
    if (!arg.span.valid_in(ex.sentence)) return fail("argument span out of bounds");
    spans.push_back(arg.span);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i - 1].overlaps(spans[i])) return fail("overlapping spans");

  data_.example_index.emplace(ex.id, data_.examples.size());
  data_.sentence_index.emplace(ex.sentence, data_.examples.size());
  // Attach the exemplar id to its LU (creating the LU entry if the frame
  // XML did not list it).
  Frame& mutable_frame = data_.frames[fit->second];
  auto lu_it = std::find_if(mutable_frame.lexical_units.begin(), mutable_frame.lexical_units.end(),
                            [&](const LexicalUnit& lu) { return lu.name == ex.lu_name; });
  if (lu_it == mutable_frame.lexical_units.end()) {
    mutable_frame.lexical_units.push_back({ex.lu_name, ex.frame_name, {}});
    lu_it = std::prev(mutable_frame.lexical_units.end());
  }
  lu_it->exemplar_ids.push_back(ex.id);
  data_.examples.push_back(std::move(ex));
  return true;
}

FrameStore StoreBuilder::build() {
  if (data_.frames.empty()) throw Error(ErrorCode::EmptyStore, "no valid frames loaded");
  FrameStore store;
  store.data_ = std::make_shared<const FrameStore::Data>(std::move(data_));
  data_ = {};
  return store;
}

// ---------------------------------------------------------------------------
// Normalized line-delimited JSON

namespace {

ordered_json span_json(const Span& s) { return ordered_json::array({s.start, s.end}); }

Span span_from_json(const nlohmann::json& j) {
  return Span{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

ordered_json frame_record(const Frame& f) {
  ordered_json j;
  j["record"] = "frame";
  j["name"] = f.name;
  j["definition"] = f.definition;
  if (f.illustrative_sentence) j["illustration"] = *f.illustrative_sentence;
  auto elements = ordered_json::array();
  for (const auto& fe : f.elements) {
    elements.push_back({{"name", fe.name},
                        {"definition", fe.definition},
                        {"coreness", fe.coreness == Coreness::Core ? "core" : "noncore"}});
  }
  j["elements"] = std::move(elements);
  auto lus = ordered_json::array();
  for (const auto& lu : f.lexical_units)
    lus.push_back({{"name", lu.name}, {"exemplar_ids", lu.exemplar_ids}});
  j["lexical_units"] = std::move(lus);
  return j;
}

ordered_json example_record(const AnnotatedExample& ex) {
  ordered_json j;
  j["record"] = "example";
  j["id"] = ex.id;
  j["sentence"] = ex.sentence;
  j["frame"] = ex.frame_name;
  j["lu"] = ex.lu_name;
  j["target"] = span_json(ex.target);
  auto args = ordered_json::array();
  for (const auto& a : ex.arguments)
    args.push_back({{"role", a.fe_name}, {"span", span_json(a.span)}});
  j["arguments"] = std::move(args);
  return j;
}

}  // namespace

void export_normalized(const FrameStore& store, const std::filesystem::path& out) {
  std::ofstream os(out, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + out.string());
  ordered_json header;
  header["record"] = "header";
  header["schema"] = kCorpusSchema;
  header["release"] = store.release();
  os << header.dump() << "\n";
  for (const auto& f : store.frames()) os << frame_record(f).dump() << "\n";
  for (const auto& ex : store.examples()) os << example_record(ex).dump() << "\n";
}

FrameStore load_normalized(const std::filesystem::path& in) {
  std::ifstream is(in, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + in.string());
  StoreBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(ErrorCode::ValidationFailure,
                  in.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    const std::string record = j.value("record", "");
    if (!saw_header) {
      if (record != "header" || j.value("schema", "") != kCorpusSchema)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    in.string() + ": expected header with schema " + std::string(kCorpusSchema));
      builder.set_release(j.value("release", "unknown"));
      saw_header = true;
      continue;
    }
    if (record == "frame") {
      Frame f;
      f.name = j.at("name").get<std::string>();
      f.definition = j.at("definition").get<std::string>();
      if (j.contains("illustration")) f.illustrative_sentence = j["illustration"].get<std::string>();
      for (const auto& e : j.at("elements")) {
        f.elements.push_back({e.at("name").get<std::string>(), e.at("definition").get<std::string>(),
                              e.at("coreness") == "core" ? Coreness::Core : Coreness::NonCore});
      }
      // Exemplar ids are re-attached as example records stream in; keep the
      // LU order from the record.
      for (const auto& lu : j.at("lexical_units"))
        f.lexical_units.push_back({lu.at("name").get<std::string>(), f.name, {}});
      builder.add_frame(std::move(f));
    } else if (record == "example") {
      AnnotatedExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.sentence = j.at("sentence").get<std::string>();
      ex.frame_name = j.at("frame").get<std::string>();
      ex.lu_name = j.at("lu").get<std::string>();
      ex.target = span_from_json(j.at("target"));
      for (const auto& a : j.at("arguments"))
        ex.arguments.push_back({a.at("role").get<std::string>(), span_from_json(a.at("span"))});
      std::string reason;
      std::string id = ex.id;
      if (!builder.add_example(std::move(ex), &reason))
        throw Error(ErrorCode::ValidationFailure,
                    in.string() + ":" + std::to_string(line_no) + ": example " + id + ": " + reason);
    } else {
      throw Error(ErrorCode::ValidationFailure,
                  in.string() + ":" + std::to_string(line_no) + ": unknown record type");
    }
  }
  if (!saw_header)
    throw Error(ErrorCode::SchemaVersionMismatch, in.string() + ": missing header record");
  return builder.build();
}

}  // namespace framecl

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "framecl/errors.hpp"
#include "framecl/types.hpp"

namespace framecl {

struct SkippedExample {
  std::string file;
  std::string sentence_id;
  std::string reason;
};

struct ImportReport {
  std::size_t frames_loaded = 0;
  std::size_t lexical_units_loaded = 0;
  std::size_t examples_loaded = 0;
  std::vector<SkippedExample> skipped;
};

// Immutable index over frames, lexical units and annotated exemplars.
// Safe to share across threads once constructed.
class FrameStore {
 public:
  const std::vector<Frame>& frames() const;
  const std::vector<AnnotatedExample>& examples() const;
  const std::string& release() const;

  const Frame* find_frame(std::string_view name) const;
  const Frame& frame(std::string_view name) const;  // throws UnknownFrame

  const AnnotatedExample* find_example(std::string_view id) const;
  const AnnotatedExample& example(std::string_view id) const;  // throws UnknownExample

  // First example whose sentence equals `sentence`, or nullptr.
  const AnnotatedExample* find_by_sentence(std::string_view sentence) const;

  // Elements with coreness == Core, in stored order. Throws UnknownFrame.
  std::vector<FrameElement> core_elements(std::string_view frame_name) const;

  // Exemplar ids of one LU, in stored order. Throws UnknownFrame.
  const std::vector<std::string>& exemplars_of(std::string_view frame_name,
                                               std::string_view lu_name) const;

 private:
  friend class StoreBuilder;
  struct Data {
    std::string release = "unknown";
    std::vector<Frame> frames;
    std::vector<AnnotatedExample> examples;
    std::map<std::string, std::size_t, std::less<>> frame_index;
    std::map<std::string, std::size_t, std::less<>> example_index;
    std::map<std::string, std::size_t, std::less<>> sentence_index;
  };
  std::shared_ptr<const Data> data_;
};

// Mutable staging area; validates invariants and freezes into a FrameStore.
class StoreBuilder {
 public:
  void set_release(std::string release);
  // Throws ValidationFailure on duplicate names, missing Core element,
  // or a reserved "Target" element name.
  void add_frame(Frame frame);
  // Returns false (and records `reason`) if the example violates its
  // invariants; the caller decides whether that is fatal.
  bool add_example(AnnotatedExample example, std::string* reason = nullptr);
  bool has_frame(std::string_view name) const;
  // Throws EmptyStore when no frame was added.
  FrameStore build();

 private:
  FrameStore::Data data_;
};

struct ImportResult {
  FrameStore store;
  ImportReport report;
};

struct ImportOptions {
  // With false, an LU file whose frame is not loaded raises MissingFrameFile;
  // with true it is skipped and counted (useful when ingesting a frame subset).
  bool skip_unknown_lu_frames = false;
};

// Reads FrameNet-1.7-layout frame and lexical-unit XML directories.
// Malformed exemplars are skipped and recorded in the report.
ImportResult import_framenet(const std::filesystem::path& frame_xml_dir,
                             const std::filesystem::path& lu_xml_dir,
                             const ImportOptions& options = {});

// Line-delimited JSON with a schema-versioned header record.
void export_normalized(const FrameStore& store, const std::filesystem::path& out);
FrameStore load_normalized(const std::filesystem::path& in);

}  // namespace framecl

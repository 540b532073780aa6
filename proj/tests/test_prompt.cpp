#include <doctest.h>

#include <fstream>

#include "framecl/prompt.hpp"
#include "framecl/wire.hpp"
#include "helpers.hpp"

using namespace framecl;
using testing::fixture_store;

namespace {

const std::vector<std::string> kAllFrames = {"Rescuing", "Borrowing", "Departing"};

PromptLibrary& library() {
  static PromptLibrary lib = PromptLibrary::embedded();
  return lib;
}

}  // namespace

TEST_SUITE("prompt") {

TEST_CASE("zero-shot prompts have Goal, Events and Guidelines but no Examples") {
  PromptConfig config{TaskKind::FI, kAllFrames, {}, AblationLevel::FullFrameInfo, true};
  Prompt prompt = library().render(fixture_store(), config);
  CHECK(prompt.section_offsets.count("Goal"));
  CHECK(prompt.section_offsets.count("Events"));
  CHECK(prompt.section_offsets.count("Guidelines"));
  CHECK(!prompt.section_offsets.count("Examples"));

  // Sections appear in order and tile their offsets.
  std::size_t last_end = 0;
  for (const char* name : {"Goal", "Events", "Guidelines"}) {
    auto [start, end] = prompt.section_offsets.at(name);
    CHECK(start >= last_end);
    CHECK(end <= prompt.text.size());
    last_end = end;
  }
  // Every frame block lists element definitions at the full level.
  for (const auto& name : kAllFrames) {
    CHECK(prompt.text.find("## " + name) != std::string::npos);
  }
  CHECK(prompt.text.find("- Rescuer: The agent who removes the Victim from harm.") !=
        std::string::npos);
  // Non-core elements stay out under the default core-only setting.
  CHECK(prompt.text.find("- Place:") == std::string::npos);
}

TEST_CASE("core_only=false adds the non-core elements to Events") {
  PromptConfig config{TaskKind::FI, {"Rescuing"}, {}, AblationLevel::FullFrameInfo, false};
  Prompt prompt = library().render(fixture_store(), config);
  CHECK(prompt.text.find("- Place:") != std::string::npos);
}

TEST_CASE("shots render as input-output demonstrations in the wire format") {
  const auto& store = fixture_store();
  PromptConfig config{TaskKind::FSP, {"Rescuing"}, {"805001", "805004"},
                      AblationLevel::FullFrameInfo, true};
  Prompt prompt = library().render(store, config);
  auto examples = prompt.section("Examples");
  CHECK(examples.find("Example 1") != std::string::npos);
  CHECK(examples.find("Example 2") != std::string::npos);
  // The demonstration output is the serialized gold annotation.
  const std::string gold1 = wire::gold_payload_text(store, store.example("805001"), TaskKind::FSP);
  CHECK(examples.find("Output: " + gold1) != std::string::npos);
  CHECK(examples.find("Input: " + store.example("805001").sentence) != std::string::npos);
}

TEST_CASE("no-frame-info prompts carry no frame or element definitions") {
  PromptConfig config{TaskKind::FI, kAllFrames, {}, AblationLevel::NoFrameInfo, true};
  Prompt prompt = library().render(fixture_store(), config);
  CHECK(!prompt.section_offsets.count("Events"));
  CHECK(prompt.text.find("Definition:") == std::string::npos);
  CHECK(prompt.text.find("Frame elements:") == std::string::npos);
}

TEST_CASE("rendering is referentially transparent") {
  PromptConfig config{TaskKind::FSRL, kAllFrames, {"805001"}, AblationLevel::FullFrameInfo, true};
  Prompt a = library().render(fixture_store(), config);
  Prompt b = library().render(fixture_store(), config);
  CHECK(a.text == b.text);
  CHECK(a.digest() == b.digest());
  CHECK(a.section_offsets == b.section_offsets);
}

TEST_CASE("fsrl shots pair the frame-target input with completed arguments") {
  const auto& store = fixture_store();
  // Passive sentence: the serialized argument order follows the frame's
  // element order (Rescuer before Victim), not sentence position.
  auto [input, output] = library().render_fsrl_shot(store, store.example("805004"));
  CHECK(input.find("The child was rescued by the lifeguard") == 0);
  CHECK(input.find("Pairs: [{\"frame\":\"Rescuing\",\"target\":\"rescued\"}]") !=
        std::string::npos);
  const auto rescuer = output.find("\"role\":\"Rescuer\"");
  const auto victim = output.find("\"role\":\"Victim\"");
  REQUIRE(rescuer != std::string::npos);
  REQUIRE(victim != std::string::npos);
  CHECK(rescuer < victim);
  CHECK(output.find("\"text\":\"the lifeguard\"") != std::string::npos);
  CHECK(output.find("\"text\":\"The child\"") != std::string::npos);
}

TEST_CASE("fsrl shots with no core arguments produce an empty list") {
  const auto& store = fixture_store();  // "The ferry left at dawn." has only a Time argument
  auto [input, output] = library().render_fsrl_shot(store, store.example("805026"));
  CHECK(output.find("\"arguments\":[]") != std::string::npos);
}

TEST_CASE("budget estimation is exact") {
  PromptConfig config{TaskKind::FSP, {"Rescuing"},
                      {"805001", "805002", "805003", "805004"},
                      AblationLevel::FullFrameInfo, true};
  Prompt prompt = library().render(fixture_store(), config);
  CHECK(estimate_prompt_budget(prompt, 1000000).fits);
  auto over = estimate_prompt_budget(prompt, prompt.text.size() - 1);
  CHECK(!over.fits);
  CHECK(over.excess == 1);

  // Independent length check: what lands on disk is what gets counted.
  testing::TempDir tmp("budget");
  {
    std::ofstream os(tmp.path() / "prompt.txt", std::ios::binary);
    os << prompt.text;
  }
  const auto on_disk = std::filesystem::file_size(tmp.path() / "prompt.txt");
  CHECK(estimate_prompt_budget(prompt, on_disk).fits);
  CHECK(estimate_prompt_budget(prompt, on_disk - 1).excess == 1);
}

TEST_CASE("config violations are rejected") {
  const auto& store = fixture_store();
  PromptConfig unknown_frame{TaskKind::FI, {"NoSuchFrame"}, {}, AblationLevel::FullFrameInfo, true};
  CHECK_THROWS_AS((void)library().render(store, unknown_frame), Error);

  PromptConfig unknown_shot{TaskKind::FI, kAllFrames, {"999"}, AblationLevel::FullFrameInfo, true};
  CHECK_THROWS_AS((void)library().render(store, unknown_shot), Error);

  // A shot from a frame outside the prompt's frame list.
  PromptConfig mismatch{TaskKind::FI, {"Borrowing"}, {"805001"}, AblationLevel::FullFrameInfo,
                        true};
  try {
    (void)library().render(store, mismatch);
    FAIL("expected ShotFrameMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShotFrameMismatch);
  }

  // Reduced-information prompts are zero-shot by definition.
  PromptConfig abl_shots{TaskKind::FI, kAllFrames, {"805001"}, AblationLevel::FrameDefOnly, true};
  CHECK_THROWS_AS((void)library().render(store, abl_shots), Error);

  PromptConfig no_frames{TaskKind::FSRL, {}, {}, AblationLevel::FullFrameInfo, true};
  CHECK_THROWS_AS((void)library().render(store, no_frames), Error);
}

TEST_CASE("embedded templates equal the checked-in assets") {
  PromptLibrary from_dir = PromptLibrary::from_directory(FRAMECL_TEMPLATES_DIR);
  CHECK(library().digest() == from_dir.digest());
}

}  // TEST_SUITE

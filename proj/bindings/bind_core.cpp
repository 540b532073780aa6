#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "framecl/client.hpp"
#include "framecl/dataset.hpp"
#include "framecl/eval.hpp"
#include "framecl/parser.hpp"
#include "framecl/prompt.hpp"
#include "framecl/runner.hpp"
#include "framecl/store.hpp"
#include "framecl/verify.hpp"
#include "framecl/wire.hpp"

namespace py = pybind11;
using namespace framecl;

namespace {

void register_error_translator() {
  static py::exception<Error> exc(py::module_::import("builtins"), "FrameclError",
                                  PyExc_RuntimeError);
  (void)exc;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });
}

}  // namespace

void bind_store(py::module_& m) {
  register_error_translator();

  py::class_<Span>(m, "Span")
      .def(py::init<std::size_t, std::size_t>(), py::arg("start"), py::arg("end"))
      .def_readonly("start", &Span::start)
      .def_readonly("end", &Span::end)
      .def("__eq__", [](const Span& a, const Span& b) { return a == b; })
      .def("__repr__", [](const Span& s) {
        return "Span(" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
      });

  py::enum_<Coreness>(m, "Coreness")
      .value("Core", Coreness::Core)
      .value("NonCore", Coreness::NonCore);

  py::class_<FrameElement>(m, "FrameElement")
      .def_readonly("name", &FrameElement::name)
      .def_readonly("definition", &FrameElement::definition)
      .def_readonly("coreness", &FrameElement::coreness);

  py::class_<LexicalUnit>(m, "LexicalUnit")
      .def_readonly("name", &LexicalUnit::name)
      .def_readonly("frame_name", &LexicalUnit::frame_name)
      .def_readonly("exemplar_ids", &LexicalUnit::exemplar_ids);

  py::class_<Frame>(m, "Frame")
      .def_readonly("name", &Frame::name)
      .def_readonly("definition", &Frame::definition)
      .def_readonly("elements", &Frame::elements)
      .def_readonly("illustrative_sentence", &Frame::illustrative_sentence)
      .def_readonly("lexical_units", &Frame::lexical_units);

  py::class_<Argument>(m, "Argument")
      .def_readonly("fe_name", &Argument::fe_name)
      .def_readonly("span", &Argument::span);

  py::class_<AnnotatedExample>(m, "AnnotatedExample")
      .def_readonly("id", &AnnotatedExample::id)
      .def_readonly("sentence", &AnnotatedExample::sentence)
      .def_readonly("frame_name", &AnnotatedExample::frame_name)
      .def_readonly("lu_name", &AnnotatedExample::lu_name)
      .def_readonly("target", &AnnotatedExample::target)
      .def_readonly("arguments", &AnnotatedExample::arguments)
      .def("target_text", [](const AnnotatedExample& ex) { return std::string(ex.target_text()); });

  py::class_<FrameStore>(m, "FrameStore")
      .def_property_readonly("frames", &FrameStore::frames)
      .def_property_readonly("examples", &FrameStore::examples)
      .def_property_readonly("release", &FrameStore::release)
      .def("frame", &FrameStore::frame, py::return_value_policy::reference_internal)
      .def("example", &FrameStore::example, py::return_value_policy::reference_internal)
      .def("core_elements", &FrameStore::core_elements);

  py::class_<SkippedExample>(m, "SkippedExample")
      .def_readonly("file", &SkippedExample::file)
      .def_readonly("sentence_id", &SkippedExample::sentence_id)
      .def_readonly("reason", &SkippedExample::reason);

  py::class_<ImportReport>(m, "ImportReport")
      .def_readonly("frames_loaded", &ImportReport::frames_loaded)
      .def_readonly("lexical_units_loaded", &ImportReport::lexical_units_loaded)
      .def_readonly("examples_loaded", &ImportReport::examples_loaded)
      .def_readonly("skipped", &ImportReport::skipped);

  m.def(
      "import_framenet",
      [](const std::filesystem::path& frames, const std::filesystem::path& lus,
         bool skip_unknown_lu_frames) {
        ImportOptions options;
        options.skip_unknown_lu_frames = skip_unknown_lu_frames;
        ImportResult r = import_framenet(frames, lus, options);
        return py::make_tuple(r.store, r.report);
      },
      py::arg("frame_xml_dir"), py::arg("lu_xml_dir"), py::arg("skip_unknown_lu_frames") = false,
      "Read FrameNet-style XML; returns (store, import_report)");
  m.def("load_normalized", &load_normalized, py::arg("path"));
  m.def("export_normalized", &export_normalized, py::arg("store"), py::arg("path"));
}

void bind_dataset(py::module_& m) {
  py::enum_<ModelProfile>(m, "ModelProfile")
      .value("Small", ModelProfile::Small)
      .value("Large", ModelProfile::Large);

  py::class_<SplitConfig>(m, "SplitConfig")
      .def(py::init([](std::vector<std::string> frames, std::size_t n_icl, std::size_t n_eval,
                       std::uint64_t seed) {
             return SplitConfig{std::move(frames), n_icl, n_eval, seed};
           }),
           py::arg("frame_names"), py::arg("n_icl"), py::arg("n_eval"), py::arg("seed") = 0)
      .def_readonly("frame_names", &SplitConfig::frame_names)
      .def_readonly("n_icl", &SplitConfig::n_icl)
      .def_readonly("n_eval", &SplitConfig::n_eval)
      .def_readonly("seed", &SplitConfig::seed);

  py::class_<DatasetSplit>(m, "DatasetSplit")
      .def_readonly("config", &DatasetSplit::config)
      .def_readonly("icl_pool", &DatasetSplit::icl_pool)
      .def_readonly("eval_set", &DatasetSplit::eval_set);

  m.def("stratified_split", &stratified_split, py::arg("store"), py::arg("config"));
  m.def("shot_prefix", &shot_prefix, py::arg("split"), py::arg("n"));
  m.def("shot_schedule", &shot_schedule, py::arg("profile"), py::arg("max_shots"));
  m.def("save_split", &save_split, py::arg("split"), py::arg("path"));
  m.def("load_split", &load_split, py::arg("path"));
}

void bind_prompt(py::module_& m) {
  py::enum_<TaskKind>(m, "TaskKind")
      .value("FSP", TaskKind::FSP)
      .value("FI", TaskKind::FI)
      .value("FSRL", TaskKind::FSRL);

  py::enum_<AblationLevel>(m, "AblationLevel")
      .value("NoFrameInfo", AblationLevel::NoFrameInfo)
      .value("FrameDefOnly", AblationLevel::FrameDefOnly)
      .value("FullFrameInfo", AblationLevel::FullFrameInfo);

  py::class_<PromptConfig>(m, "PromptConfig")
      .def(py::init([](TaskKind task, std::vector<std::string> frames,
                       std::vector<std::string> shot_ids, AblationLevel ablation, bool core_only) {
             return PromptConfig{task, std::move(frames), std::move(shot_ids), ablation, core_only};
           }),
           py::arg("task"), py::arg("frame_names"), py::arg("shot_ids") = std::vector<std::string>{},
           py::arg("ablation") = AblationLevel::FullFrameInfo, py::arg("core_only") = true)
      .def_readonly("task", &PromptConfig::task)
      .def_readonly("frame_names", &PromptConfig::frame_names)
      .def_readonly("shot_ids", &PromptConfig::shot_ids)
      .def_readonly("ablation", &PromptConfig::ablation)
      .def_readonly("core_only", &PromptConfig::core_only);

  py::class_<Prompt>(m, "Prompt")
      .def_readonly("text", &Prompt::text)
      .def_readonly("section_offsets", &Prompt::section_offsets)
      .def("section", [](const Prompt& p, const std::string& name) {
        return std::string(p.section(name));
      })
      .def("digest", &Prompt::digest);

  py::class_<BudgetCheck>(m, "BudgetCheck")
      .def_readonly("fits", &BudgetCheck::fits)
      .def_readonly("excess", &BudgetCheck::excess);
  m.def("estimate_prompt_budget", &estimate_prompt_budget, py::arg("prompt"), py::arg("limit"));

  py::class_<PromptLibrary>(m, "PromptLibrary")
      .def_static("embedded", &PromptLibrary::embedded)
      .def_static("from_directory", &PromptLibrary::from_directory)
      .def("render", &PromptLibrary::render, py::arg("store"), py::arg("config"))
      .def("render_fsrl_shot", &PromptLibrary::render_fsrl_shot, py::arg("store"),
           py::arg("example"), py::arg("core_only") = true)
      .def("digest", &PromptLibrary::digest);

  m.def(
      "gold_payload_text",
      [](const FrameStore& store, const AnnotatedExample& ex, TaskKind task, bool core_only) {
        return wire::gold_payload_text(store, ex, task, core_only);
      },
      py::arg("store"), py::arg("example"), py::arg("task"), py::arg("core_only") = true,
      "Wire-format serialization of an example's gold annotations");
  m.def(
      "task_input",
      [](const FrameStore& store, const AnnotatedExample& ex, TaskKind task) {
        return wire::task_input(store, ex, task);
      },
      py::arg("store"), py::arg("example"), py::arg("task"));
}

void bind_parser(py::module_& m) {
  py::class_<FrameTargetPair>(m, "FrameTargetPair")
      .def(py::init([](std::string frame, Span target, std::string text) {
             return FrameTargetPair{std::move(frame), target, std::move(text)};
           }),
           py::arg("frame_name"), py::arg("target"), py::arg("target_text"))
      .def_readonly("frame_name", &FrameTargetPair::frame_name)
      .def_readonly("target", &FrameTargetPair::target)
      .def_readonly("target_text", &FrameTargetPair::target_text);

  py::class_<PredictedArgument>(m, "PredictedArgument")
      .def_readonly("role", &PredictedArgument::role)
      .def_readonly("span", &PredictedArgument::span)
      .def_readonly("text", &PredictedArgument::text);

  py::class_<FrameInstance>(m, "FrameInstance")
      .def_readonly("pair", &FrameInstance::pair)
      .def_readonly("arguments", &FrameInstance::arguments);

  py::class_<ParseWarning>(m, "ParseWarning")
      .def_readonly("code", &ParseWarning::code)
      .def_readonly("detail", &ParseWarning::detail);

  py::class_<ParseOutcome>(m, "ParseOutcome")
      .def_readonly("instances", &ParseOutcome::instances)
      .def_readonly("warnings", &ParseOutcome::warnings)
      .def_readonly("dropped", &ParseOutcome::dropped);

  m.def(
      "extract_payload",
      [](const std::string& raw) -> std::optional<std::string> {
        auto payload = extract_payload(raw);
        if (!payload) return std::nullopt;
        return payload->dump();
      },
      py::arg("raw"), "First well-formed JSON array in raw text, as a JSON string");
  m.def(
      "ground_span",
      [](const std::string& sentence, const std::string& needle, std::size_t after) {
        return ground_span(sentence, needle, after);
      },
      py::arg("sentence"), py::arg("needle"), py::arg("after") = 0);
  m.def("parse_prediction", &parse_prediction, py::arg("task"), py::arg("raw"),
        py::arg("sentence"), py::arg("store"),
        py::arg("expected_pairs") = std::vector<FrameTargetPair>{}, py::arg("core_only") = true);
}

void bind_eval(py::module_& m) {
  py::enum_<EvalScope>(m, "EvalScope")
      .value("AllRoles", EvalScope::AllRoles)
      .value("TargetOnly", EvalScope::TargetOnly)
      .value("ArgumentsOnly", EvalScope::ArgumentsOnly);

  py::class_<LabeledItem>(m, "LabeledItem")
      .def(py::init([](std::string sid, std::string frame, std::string role, Span span) {
             return LabeledItem{std::move(sid), std::move(frame), std::move(role), span};
           }),
           py::arg("sentence_id"), py::arg("frame_name"), py::arg("role"), py::arg("span"))
      .def_readonly("sentence_id", &LabeledItem::sentence_id)
      .def_readonly("frame_name", &LabeledItem::frame_name)
      .def_readonly("role", &LabeledItem::role)
      .def_readonly("span", &LabeledItem::span);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("tp", &MatchResult::tp)
      .def_readonly("fp", &MatchResult::fp)
      .def_readonly("fn", &MatchResult::fn)
      .def_readonly("matched", &MatchResult::matched);
  m.def("match_items", &match_items, py::arg("gold"), py::arg("pred"));

  py::class_<Metric>(m, "Metric")
      .def_readonly("tp", &Metric::tp)
      .def_readonly("fp", &Metric::fp)
      .def_readonly("fn", &Metric::fn)
      .def_readonly("precision", &Metric::precision)
      .def_readonly("recall", &Metric::recall)
      .def_readonly("f1", &Metric::f1);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("scope", &EvalReport::scope)
      .def_readonly("micro", &EvalReport::micro)
      .def_readonly("per_attribute", &EvalReport::per_attribute)
      .def_readonly("per_frame", &EvalReport::per_frame)
      .def("to_json", [](const EvalReport& r) { return r.to_json().dump(); });
  m.def("micro_report", &micro_report, py::arg("gold"), py::arg("pred"), py::arg("scope"));

  py::class_<PairItem>(m, "PairItem")
      .def(py::init([](std::string sid, std::string frame, Span target) {
             return PairItem{std::move(sid), std::move(frame), target};
           }),
           py::arg("sentence_id"), py::arg("frame_name"), py::arg("target"))
      .def_readonly("sentence_id", &PairItem::sentence_id)
      .def_readonly("frame_name", &PairItem::frame_name)
      .def_readonly("target", &PairItem::target);

  py::class_<FiReport>(m, "FiReport")
      .def_readonly("pair_exact", &FiReport::pair_exact)
      .def_readonly("name_only", &FiReport::name_only)
      .def_readonly("target_only", &FiReport::target_only);
  m.def("fi_report", &fi_report, py::arg("gold"), py::arg("pred"));

  m.def("items_from_gold", &items_from_gold, py::arg("store"), py::arg("example"),
        py::arg("core_only") = true);
  m.def("items_from_instances", &items_from_instances, py::arg("sentence_id"),
        py::arg("instances"));
}

void bind_runner(py::module_& m) {
  m.def(
      "run_experiment",
      [](const std::filesystem::path& config_path, const std::string& name,
         const std::filesystem::path& runs_dir, const std::filesystem::path& cache_dir,
         bool offline, std::size_t jobs) {
        AppConfig config = load_config(config_path);
        if (config.store_path.empty())
          throw Error(ErrorCode::ConfigError, "config has no store entry");
        FrameStore store = load_normalized(config.store_path);
        RunnerOptions options;
        options.runs_dir = runs_dir;
        options.cache_dir = cache_dir;
        options.offline = offline;
        options.jobs = jobs;
        Runner runner(std::move(store), PromptLibrary::embedded(), config, options);
        return runner.run(name).to_json().dump();
      },
      py::arg("config_path"), py::arg("experiment"), py::arg("runs_dir"),
      py::arg("cache_dir") = std::filesystem::path{}, py::arg("offline") = true,
      py::arg("jobs") = 1,
      "Run one configured experiment; returns the run record as a JSON string");

  m.def(
      "run_verification",
      [](const std::filesystem::path& fixtures_dir) {
        verify::Options options;
        options.fixtures_dir = fixtures_dir;
        auto results = verify::run_all(options);
        py::list out;
        for (const auto& r : results)
          out.append(py::make_tuple(r.name, r.passed, r.skipped, r.detail));
        return out;
      },
      py::arg("fixtures_dir"), "Run the fixture property suite; returns (name, passed, skipped, detail) tuples");
}

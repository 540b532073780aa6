import json
import os

import pytest

import framecl as fc

from conftest import fixtures_dir

ALL_FRAMES = ["Rescuing", "Borrowing", "Departing"]


@pytest.fixture(scope="module")
def store():
    return fc.load_normalized(os.path.join(fixtures_dir(), "normalized", "corpus.jsonl"))


def test_store_loads_and_indexes(store):
    assert len(store.frames) == 3
    assert len(store.examples) == 36
    core = store.core_elements("Rescuing")
    assert [fe.name for fe in core] == ["Rescuer", "Victim", "Danger"]
    ex = store.example("805001")
    assert ex.target_text() == "rescued"


def test_split_and_schedules(store):
    split = fc.stratified_split(store, fc.SplitConfig(ALL_FRAMES, 15, 10, seed=7))
    assert len(split.icl_pool) == 15
    assert len(split.eval_set) == 10
    assert not set(split.icl_pool) & set(split.eval_set)
    assert fc.shot_prefix(split, 5) == split.icl_pool[:5]
    assert fc.shot_schedule(fc.ModelProfile.Small, 150) == [0, 5, 10, 25, 50, 75, 100, 125, 150]
    assert fc.shot_schedule(fc.ModelProfile.Large, 150) == [0, 50, 100, 150]


def test_prompt_rendering_is_deterministic(store):
    lib = fc.PromptLibrary.embedded()
    config = fc.PromptConfig(fc.TaskKind.FI, ALL_FRAMES)
    a = lib.render(store, config)
    b = lib.render(store, config)
    assert a.text == b.text
    assert "Goal" in a.section_offsets
    assert "Events" in a.section_offsets
    assert "Examples" not in a.section_offsets
    assert "## Rescuing" in a.section("Events")


def test_parse_and_evaluate_round_trip(store):
    ex = store.example("805001")
    payload = fc.gold_payload_text(store, ex, fc.TaskKind.FSP)
    outcome = fc.parse_prediction(fc.TaskKind.FSP, payload, ex.sentence, store)
    assert len(outcome.instances) == 1
    assert not outcome.warnings
    gold = fc.items_from_gold(store, ex)
    pred = fc.items_from_instances(ex.id, outcome.instances)
    report = fc.micro_report(gold, pred, fc.EvalScope.AllRoles)
    assert report.micro.f1 == 1.0


def test_ground_span_picks_occurrences():
    span = fc.ground_span("the man saw the man", "the man", after=3)
    assert (span.start, span.end) == (12, 19)
    assert fc.ground_span("abc", "zzz") is None


def test_offline_experiment_run(tmp_path):
    record = json.loads(
        fc.run_experiment(
            os.path.join(fixtures_dir(), "configs", "offline.json"),
            "exp_fi",
            str(tmp_path / "runs"),
            offline=True,
        )
    )
    reports = record["reports"]["mock-echo"]
    assert set(reports.keys()) == {"0", "5", "10", "15"}
    for cell in reports.values():
        assert cell["pair_exact"]["micro"]["f1"] == 1.0

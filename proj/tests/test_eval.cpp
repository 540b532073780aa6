#include <doctest.h>

#include "framecl/eval.hpp"
#include "framecl/dataset.hpp"
#include "helpers.hpp"

using namespace framecl;

namespace {

LabeledItem item(const char* sid, const char* frame, const char* role, std::size_t a,
                 std::size_t b) {
  return {sid, frame, role, {a, b}};
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("identical multisets match perfectly") {
  std::vector<LabeledItem> gold = {item("s1", "A", "Target", 0, 1), item("s1", "A", "X", 2, 5),
                                   item("s2", "B", "Target", 1, 3), item("s2", "B", "Y", 4, 9)};
  MatchResult r = match_items(gold, gold);
  CHECK(r.tp == 4);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.matched.size() == 4);
}

TEST_CASE("an off-by-one boundary is both a false positive and a false negative") {
  std::vector<LabeledItem> gold = {item("s1", "A", "X", 2, 5)};
  std::vector<LabeledItem> pred = {item("s1", "A", "X", 2, 6)};
  MatchResult r = match_items(gold, pred);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
}

TEST_CASE("duplicates consume one match each") {
  std::vector<LabeledItem> gold = {item("s1", "A", "X", 0, 1), item("s1", "A", "X", 0, 1)};
  std::vector<LabeledItem> pred = {item("s1", "A", "X", 0, 1)};
  MatchResult r = match_items(gold, pred);
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
  CHECK(r.fp == 0);
}

TEST_CASE("micro report scopes filter by role") {
  std::vector<LabeledItem> gold = {item("s1", "A", "Target", 0, 1), item("s1", "A", "X", 2, 5)};
  std::vector<LabeledItem> pred = {item("s1", "A", "Target", 0, 1), item("s1", "A", "X", 9, 12)};
  EvalReport all = micro_report(gold, pred, EvalScope::AllRoles);
  CHECK(all.micro.tp == 1);
  CHECK(all.micro.fp == 1);
  CHECK(all.micro.fn == 1);
  EvalReport targets = micro_report(gold, pred, EvalScope::TargetOnly);
  CHECK(targets.micro.f1 == 1.0);
  EvalReport args = micro_report(gold, pred, EvalScope::ArgumentsOnly);
  CHECK(args.micro.f1 == 0.0);
  CHECK(args.micro.tp == 0);

  // Per-attribute rows split the same counts by role.
  CHECK(all.per_attribute.at("Target").f1 == 1.0);
  CHECK(all.per_attribute.at("X").f1 == 0.0);
  CHECK(all.per_frame.at("A").tp == 1);
}

TEST_CASE("empty-versus-empty convention is one, one-sided emptiness is zero") {
  EvalReport both = micro_report({}, {}, EvalScope::AllRoles);
  CHECK(both.micro.precision == 1.0);
  CHECK(both.micro.recall == 1.0);
  CHECK(both.micro.f1 == 1.0);

  std::vector<LabeledItem> some = {item("s1", "A", "X", 0, 1)};
  EvalReport no_pred = micro_report(some, {}, EvalScope::AllRoles);
  CHECK(no_pred.micro.precision == 0.0);
  CHECK(no_pred.micro.recall == 0.0);
  CHECK(no_pred.micro.f1 == 0.0);
  EvalReport no_gold = micro_report({}, some, EvalScope::AllRoles);
  CHECK(no_gold.micro.f1 == 0.0);
}

TEST_CASE("the constructed 4-gold 5-pred 3-match fixture hits the spot values") {
  std::vector<LabeledItem> gold = {item("s1", "A", "Target", 0, 4), item("s1", "A", "X", 5, 9),
                                   item("s2", "A", "Target", 2, 6), item("s2", "A", "Y", 8, 14)};
  std::vector<LabeledItem> pred = {gold[0], gold[1], gold[2], item("s2", "A", "Y", 8, 13),
                                   item("s1", "B", "Target", 0, 4)};
  EvalReport report = micro_report(gold, pred, EvalScope::AllRoles);
  CHECK(report.micro.tp == 3);
  CHECK(report.micro.fp == 2);
  CHECK(report.micro.fn == 1);
  CHECK(report.micro.precision == doctest::Approx(0.600).epsilon(1e-9));
  CHECK(report.micro.recall == doctest::Approx(0.750).epsilon(1e-9));
  CHECK(report.micro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("count conservation and precision-recall symmetry hold on random inputs") {
  SplitMix64 rng(31337);
  const std::vector<std::string> frames = {"A", "B"};
  const std::vector<std::string> roles = {"Target", "X"};
  auto random_items = [&](std::size_t n) {
    std::vector<LabeledItem> items;
    for (std::size_t i = 0; i < n; ++i)
      items.push_back({"s" + std::to_string(rng.bounded(3)), frames[rng.bounded(2)],
                       roles[rng.bounded(2)], {rng.bounded(4), 4 + rng.bounded(4)}});
    return items;
  };
  for (int trial = 0; trial < 200; ++trial) {
    auto gold = random_items(rng.bounded(10));
    auto pred = random_items(rng.bounded(10));
    EvalReport ab = micro_report(gold, pred, EvalScope::AllRoles);
    CHECK(ab.micro.tp + ab.micro.fn == gold.size());
    CHECK(ab.micro.tp + ab.micro.fp == pred.size());
    std::size_t tp_by_role = 0, tp_by_frame = 0;
    for (const auto& [role, m] : ab.per_attribute) tp_by_role += m.tp;
    for (const auto& [frame, m] : ab.per_frame) tp_by_frame += m.tp;
    CHECK(tp_by_role == ab.micro.tp);
    CHECK(tp_by_frame == ab.micro.tp);
    EvalReport ba = micro_report(pred, gold, EvalScope::AllRoles);
    CHECK(ab.micro.precision == ba.micro.recall);
    CHECK(ab.micro.recall == ba.micro.precision);

    // Adding one exact match never lowers F1; adding one miss never raises
    // precision.
    if (!gold.empty()) {
      auto pred_plus = pred;
      pred_plus.push_back(gold[0]);
      auto gold_plus = gold;
      gold_plus.push_back(gold[0]);
      EvalReport better = micro_report(gold_plus, pred_plus, EvalScope::AllRoles);
      CHECK(better.micro.f1 >= ab.micro.f1 - 1e-12);
    }
    auto pred_junk = pred;
    pred_junk.push_back(item("zz", "A", "X", 90, 95));
    EvalReport worse = micro_report(gold, pred_junk, EvalScope::AllRoles);
    CHECK(worse.micro.precision <= ab.micro.precision + 1e-12);
  }
}

TEST_CASE("pair scoring decomposes into pair, name and target views") {
  std::vector<PairItem> gold = {{"s1", "Rescuing", {3, 10}}, {"s2", "Borrowing", {0, 8}}};
  SUBCASE("correct target with the wrong frame counts only for targets") {
    std::vector<PairItem> pred = {{"s1", "Departing", {3, 10}}};
    FiReport fi = fi_report(gold, pred);
    CHECK(fi.pair_exact.micro.tp == 0);
    CHECK(fi.name_only.micro.tp == 0);
    CHECK(fi.target_only.micro.tp == 1);
  }
  SUBCASE("exact predictions make every view perfect") {
    FiReport fi = fi_report(gold, gold);
    CHECK(fi.pair_exact.micro.f1 == 1.0);
    CHECK(fi.name_only.micro.f1 == 1.0);
    CHECK(fi.target_only.micro.f1 == 1.0);
  }
  SUBCASE("one of two pairs fully correct") {
    std::vector<PairItem> pred = {{"s1", "Rescuing", {3, 10}}};
    FiReport fi = fi_report(gold, pred);
    CHECK(fi.pair_exact.micro.precision == 1.0);
    CHECK(fi.pair_exact.micro.recall == 0.5);
    CHECK(fi.pair_exact.micro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("gold item extraction applies the core-only filter") {
  const auto& store = testing::fixture_store();
  const auto& ex = store.example("805014");  // Maria ... for two days (Duration is non-core)
  auto core = items_from_gold(store, ex, true);
  auto all = items_from_gold(store, ex, false);
  CHECK(core.size() == 4);  // Target + Borrower + Theme + Lender
  CHECK(all.size() == 5);
  for (const auto& it : core) CHECK(it.role != "Duration");
}

TEST_CASE("reports serialize to json and csv deterministically") {
  std::vector<LabeledItem> gold = {item("s1", "A", "Target", 0, 4)};
  EvalReport report = micro_report(gold, gold, EvalScope::AllRoles);
  CHECK(report.to_json().dump() == report.to_json().dump());
  const std::string csv = report_csv(report);
  CHECK(csv.find("scope,key,tp,fp,fn,precision,recall,f1") == 0);
  CHECK(csv.find("all_roles,micro,1,0,0,1,1,1") != std::string::npos);
  CHECK(csv.find("role:Target") != std::string::npos);
  CHECK(csv.find("frame:A") != std::string::npos);
}

}  // TEST_SUITE

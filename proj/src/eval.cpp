#include "framecl/eval.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace framecl {

std::string_view to_string(EvalScope scope) {
  switch (scope) {
    case EvalScope::AllRoles: return "all_roles";
    case EvalScope::TargetOnly: return "target_only";
    case EvalScope::ArgumentsOnly: return "arguments_only";
  }
  return "?";
}

MatchResult match_items(const std::vector<LabeledItem>& gold,
                        const std::vector<LabeledItem>& pred) {
  MatchResult r;
  std::map<LabeledItem, std::deque<std::size_t>> open;
  for (std::size_t g = 0; g < gold.size(); ++g) open[gold[g]].push_back(g);
  for (std::size_t p = 0; p < pred.size(); ++p) {
    auto it = open.find(pred[p]);
    if (it != open.end() && !it->second.empty()) {
      r.matched.emplace_back(it->second.front(), p);
      it->second.pop_front();
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = gold.size() - r.tp;
  std::sort(r.matched.begin(), r.matched.end());
  return r;
}

Metric metric_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metric m{tp, fp, fn, 0.0, 0.0, 0.0};
  if (tp + fp + fn == 0) {
    m.precision = m.recall = m.f1 = 1.0;  // nothing to find, nothing predicted
    return m;
  }
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

namespace {

bool in_scope(const LabeledItem& item, EvalScope scope) {
  switch (scope) {
    case EvalScope::AllRoles: return true;
    case EvalScope::TargetOnly: return item.role == kTargetRole;
    case EvalScope::ArgumentsOnly: return item.role != kTargetRole;
  }
  return false;
}

std::vector<LabeledItem> filter_scope(const std::vector<LabeledItem>& items, EvalScope scope) {
  std::vector<LabeledItem> out;
  for (const auto& it : items)
    if (in_scope(it, scope)) out.push_back(it);
  return out;
}

template <typename KeyFn>
std::map<std::string, Metric> grouped_metrics(const std::vector<LabeledItem>& gold,
                                              const std::vector<LabeledItem>& pred, KeyFn key) {
  std::map<std::string, std::vector<LabeledItem>> gold_by, pred_by;
  for (const auto& it : gold) gold_by[key(it)].push_back(it);
  for (const auto& it : pred) pred_by[key(it)].push_back(it);
  std::map<std::string, Metric> out;
  for (const auto& [k, items] : gold_by) {
    MatchResult r = match_items(items, pred_by.count(k) ? pred_by[k] : std::vector<LabeledItem>{});
    out[k] = metric_from_counts(r.tp, r.fp, r.fn);
  }
  for (const auto& [k, items] : pred_by) {
    if (out.count(k)) continue;
    MatchResult r = match_items({}, items);
    out[k] = metric_from_counts(r.tp, r.fp, r.fn);
  }
  return out;
}

}  // namespace

EvalReport micro_report(const std::vector<LabeledItem>& gold,
                        const std::vector<LabeledItem>& pred, EvalScope scope) {
  EvalReport report;
  report.scope = to_string(scope);
  auto g = filter_scope(gold, scope);
  auto p = filter_scope(pred, scope);
  MatchResult r = match_items(g, p);
  report.micro = metric_from_counts(r.tp, r.fp, r.fn);
  report.per_attribute = grouped_metrics(g, p, [](const LabeledItem& it) { return it.role; });
  report.per_frame = grouped_metrics(g, p, [](const LabeledItem& it) { return it.frame_name; });
  return report;
}

namespace {

std::vector<LabeledItem> pair_items(const std::vector<PairItem>& pairs, int mode) {
  std::vector<LabeledItem> out;
  for (const auto& p : pairs) {
    switch (mode) {
      case 0: out.push_back({p.sentence_id, p.frame_name, "Pair", p.target}); break;
      case 1: out.push_back({p.sentence_id, p.frame_name, "Name", Span{0, 0}}); break;
      case 2: out.push_back({p.sentence_id, "", "Target", p.target}); break;
    }
  }
  return out;
}

}  // namespace

FiReport fi_report(const std::vector<PairItem>& gold, const std::vector<PairItem>& pred) {
  FiReport fr;
  fr.pair_exact = micro_report(pair_items(gold, 0), pair_items(pred, 0), EvalScope::AllRoles);
  fr.pair_exact.scope = "pair_exact";
  fr.name_only = micro_report(pair_items(gold, 1), pair_items(pred, 1), EvalScope::AllRoles);
  fr.name_only.scope = "name_only";
  fr.name_only.metadata["matching"] = "per-sentence multiset of frame names";
  fr.target_only = micro_report(pair_items(gold, 2), pair_items(pred, 2), EvalScope::AllRoles);
  fr.target_only.scope = "target_only";
  return fr;
}

std::vector<LabeledItem> items_from_instances(const std::string& sentence_id,
                                              const std::vector<FrameInstance>& instances) {
  std::vector<LabeledItem> out;
  for (const auto& inst : instances) {
    out.push_back({sentence_id, inst.pair.frame_name, std::string(kTargetRole), inst.pair.target});
    for (const auto& arg : inst.arguments)
      out.push_back({sentence_id, inst.pair.frame_name, arg.role, arg.span});
  }
  return out;
}

std::vector<LabeledItem> items_from_gold(const FrameStore& store, const AnnotatedExample& ex,
                                         bool core_only) {
  std::vector<LabeledItem> out;
  out.push_back({ex.id, ex.frame_name, std::string(kTargetRole), ex.target});
  const Frame& frame = store.frame(ex.frame_name);
  for (const auto& arg : ex.arguments) {
    const FrameElement* fe = frame.find_element(arg.fe_name);
    if (core_only && (!fe || fe->coreness != Coreness::Core)) continue;
    out.push_back({ex.id, ex.frame_name, arg.fe_name, arg.span});
  }
  return out;
}

namespace {

nlohmann::ordered_json metric_json(const Metric& m) {
  return {{"tp", m.tp},       {"fp", m.fp},           {"fn", m.fn},
          {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["scope"] = scope;
  j["micro"] = metric_json(micro);
  j["per_attribute"] = nlohmann::ordered_json::object();
  for (const auto& [k, m] : per_attribute) j["per_attribute"][k] = metric_json(m);
  j["per_frame"] = nlohmann::ordered_json::object();
  for (const auto& [k, m] : per_frame) j["per_frame"][k] = metric_json(m);
  if (!metadata.empty()) {
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  }
  return j;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "scope,key,tp,fp,fn,precision,recall,f1\n";
  auto row = [&](const std::string& key, const Metric& m) {
    os << report.scope << ',' << key << ',' << m.tp << ',' << m.fp << ',' << m.fn << ','
       << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
  };
  row("micro", report.micro);
  for (const auto& [k, m] : report.per_attribute) row("role:" + k, m);
  for (const auto& [k, m] : report.per_frame) row("frame:" + k, m);
  return os.str();
}

}  // namespace framecl

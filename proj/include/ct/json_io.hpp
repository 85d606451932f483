#pragma once

// JSON views of the kernel's data. Key order is fixed and every collection
// is emitted in a deterministic order, so serialized reports are
// byte-stable across runs and worker counts.

#include <json.hpp>

#include "ct/explorer.hpp"
#include "ct/hypersequent.hpp"
#include "ct/lts.hpp"
#include "ct/typing.hpp"

namespace ct {

using Json = nlohmann::ordered_json;

// One object per component, names in sorted order, types as source text.
inline Json hypersequent_json(const Hypersequent& h) {
  Json arr = Json::array();
  for (const auto& s : h.sequents) {
    Json o = Json::object();
    for (const auto& [x, t] : s) o[to_string(x)] = to_string(t);
    arr.push_back(std::move(o));
  }
  return arr;
}

inline Json derivation_json(const DerivPtr& d) {
  Json j;
  j["rule"] = rule_name(d->rule);
  j["conclusion"] = Json{{"process", to_string(d->process)}, {"type", to_string(d->type)}};
  Json prems = Json::array();
  for (const auto& p : d->premises) prems.push_back(derivation_json(p));
  j["premises"] = std::move(prems);
  return j;
}

inline Json transition_json(const Transition& t) {
  Json j;
  j["source"] = to_string(t.source->process);
  j["label"] = to_string(t.label);
  j["target"] = to_string(t.target->process);
  if (!t.spawn_map.empty()) {
    Json m = Json::object();
    for (const auto& [from, to] : t.spawn_map) m[to_string(from)] = to_string(to);
    j["spawn_map"] = std::move(m);
  }
  return j;
}

inline Json trace_json(const Trace& tr) {
  Json j;
  j["start"] = Json{{"process", to_string(tr.start->process)},
                    {"type", to_string(tr.start->type)}};
  Json steps = Json::array();
  for (const auto& s : tr.steps)
    steps.push_back(Json{{"label", to_string(s.label)},
                         {"process", to_string(s.state->process)},
                         {"type", to_string(s.state->type)}});
  j["steps"] = std::move(steps);
  return j;
}

inline Json report_json(const PropertyReport& r) {
  Json j;
  j["seed"] = r.seed;
  j["property"] = r.property;
  j["verdict"] = r.ok ? "ok" : "violation";
  if (!r.ok) j["counterexample"] = r.detail;
  return j;
}

// One JSON object per line, in seed order.
inline std::string report_lines(const std::vector<PropertyReport>& rs) {
  std::string out;
  for (const auto& r : rs) {
    out += report_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace ct

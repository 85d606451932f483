#pragma once

// Golden-corpus checking. Each corpus entry is a bare process term in a
// .ct file with a frozen .expect.json sidecar carrying the expected type,
// the expected transition set, and optionally expected type-input steps.
// Targets are compared up to renaming of bound names and transition sets
// up to order; labels and rule tags are compared verbatim.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ct/lts.hpp"
#include "ct/parser.hpp"
#include "ct/typing.hpp"

namespace ct {

struct GoldenOutcome {
  std::vector<std::string> failures;  // empty means the entry matched
  std::set<std::string> lts_rules;    // rule tags exercised by the entry
  std::set<Rule> typing_rules;        // typing rules in the inferred derivation
};

namespace detail {

inline void collect_typing_rules(const DerivPtr& d, std::set<Rule>& out) {
  out.insert(d->rule);
  for (const auto& p : d->premises) collect_typing_rules(p, out);
}

inline std::string rules_text(const std::set<std::string>& rs) {
  std::string s;
  for (const auto& r : rs) {
    if (!s.empty()) s += ",";
    s += r;
  }
  return s;
}

// Order-free fingerprint of one transition: label text, target up to
// renaming, and the exact rule tag set.
inline std::string transition_fingerprint(const std::string& label,
                                          const std::string& target_canon,
                                          const std::set<std::string>& rules) {
  return label + "\x01" + target_canon + "\x01" + rules_text(rules);
}

}  // namespace detail

inline std::vector<std::filesystem::path> golden_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ct") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline GoldenOutcome check_golden(const std::filesystem::path& ct_file) {
  GoldenOutcome out;
  auto fail = [&](const std::string& msg) {
    out.failures.push_back(ct_file.filename().string() + ": " + msg);
  };

  std::ifstream src(ct_file);
  std::stringstream ss;
  ss << src.rdbuf();

  std::filesystem::path side = ct_file;
  side.replace_extension(".expect.json");
  std::ifstream sidecar(side);
  if (!sidecar) {
    fail("missing sidecar " + side.filename().string());
    return out;
  }
  nlohmann::json exp = nlohmann::json::parse(sidecar);

  DerivPtr d;
  try {
    d = infer(parse_proc(ss.str()));
  } catch (const std::exception& e) {
    fail(std::string("did not infer: ") + e.what());
    return out;
  }
  detail::collect_typing_rules(d, out.typing_rules);

  std::string want_type = exp.at("type").get<std::string>();
  if (want_type == "(empty)") {
    if (!d->type.sequents.empty())
      fail("expected the empty type, inferred " + to_string(d->type));
  } else if (!hs_equal(parse_hypersequent(want_type), d->type)) {
    fail("expected type " + want_type + ", inferred " + to_string(d->type));
  }

  if (exp.contains("transitions")) {
    std::vector<Transition> actual = transitions(d);
    std::multiset<std::string> got, want;
    std::map<std::string, const Transition*> by_label;
    for (const auto& t : actual) {
      got.insert(detail::transition_fingerprint(
          to_string(t.label), canon_key(t.target->process), t.rules));
      by_label.emplace(to_string(t.label), &t);
      for (const auto& r : t.rules) out.lts_rules.insert(r);
    }
    for (const auto& e : exp["transitions"]) {
      std::set<std::string> rules;
      for (const auto& r : e.at("rules")) rules.insert(r.get<std::string>());
      std::string label = e.at("label").get<std::string>();
      want.insert(detail::transition_fingerprint(
          label, canon_key(parse_proc(e.at("target").get<std::string>())), rules));
      if (e.contains("spawn_map")) {
        auto it = by_label.find(label);
        if (it == by_label.end()) {
          fail("no transition labelled " + label + " for the spawn_map check");
        } else {
          std::map<std::string, std::string> got_map;
          for (const auto& [from, to] : it->second->spawn_map)
            got_map[to_string(from)] = to_string(to);
          std::map<std::string, std::string> want_map =
              e["spawn_map"].get<std::map<std::string, std::string>>();
          if (got_map != want_map) fail("spawn_map mismatch on " + label);
        }
      }
    }
    if (got != want) {
      std::string msg = "transition set mismatch; actual:";
      for (const auto& t : actual)
        msg += "\n  `" + to_string(t.label) + "` -> `" + to_string(t.target->process) +
               "` [" + detail::rules_text(t.rules) + "]";
      fail(msg);
    }
  }

  if (exp.contains("type_inputs")) {
    for (const auto& e : exp["type_inputs"]) {
      Name x = name(e.at("name").get<std::string>());
      PropPtr witness = parse_type(e.at("witness").get<std::string>());
      try {
        Transition t = recv_type_step(d, x, witness);
        for (const auto& r : t.rules) out.lts_rules.insert(r);
        if (to_string(t.label) != e.at("label").get<std::string>())
          fail("type input label was " + to_string(t.label));
        if (canon_key(t.target->process) !=
            canon_key(parse_proc(e.at("target").get<std::string>())))
          fail("type input target was " + to_string(t.target->process));
        if (!hs_equal(t.target->type,
                      parse_hypersequent(e.at("type").get<std::string>())))
          fail("type input type was " + to_string(t.target->type));
      } catch (const std::exception& ex) {
        fail(std::string("type input failed: ") + ex.what());
      }
    }
  }

  return out;
}

}  // namespace ct

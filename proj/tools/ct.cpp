// Command-line front end for the process kernel: type checking, transition
// listing, scripted and interactive stepping, tau-quiescent runs, termination
// search, random generation of well-typed processes, and DOT export of
// reachable state spaces.
//
// Exit codes: 0 ok, 1 type error, 2 parse error, 3 budget exhausted,
// 4 usage error, 5 internal defect. Every failure prints one machine-parsable
// line `CT-ERR:<class>: <message>` on stderr, with <class> drawn from
// {type, parse, budget, usage, internal} to match the exit code.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ct/explorer.hpp"
#include "ct/json_io.hpp"
#include "ct/lts.hpp"
#include "ct/parser.hpp"
#include "ct/rng.hpp"
#include "ct/typing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitType = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUsage = 4;
constexpr int kExitInternal = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(const char* cls, const std::string& msg, int code) {
  std::cerr << "CT-ERR:" << cls << ": " << msg << "\n";
  return code;
}

// Styling is cosmetic only: enabled on a terminal unless CT_COLOR=0.
bool want_color() {
  static const bool v = [] {
    if (const char* c = std::getenv("CT_COLOR"); c && std::string(c) == "0")
      return false;
    return isatty(fileno(stdout)) != 0;
  }();
  return v;
}

std::string bold(const std::string& s) {
  return want_color() ? "\x1b[1m" + s + "\x1b[0m" : s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read `" + path + "`");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ct::DerivPtr load(const std::string& path) {
  return ct::infer(ct::parse_proc(read_file(path)));
}

// Transitions in a stable presentation order, so menus, scripts, and DOT
// output agree across runs and across the two stepping modes.
std::vector<ct::Transition> sorted_transitions(const ct::DerivPtr& d) {
  auto ts = ct::transitions(d);
  std::stable_sort(ts.begin(), ts.end(),
                   [](const ct::Transition& a, const ct::Transition& b) {
                     const std::string ka = ct::to_string(a.label);
                     const std::string kb = ct::to_string(b.label);
                     if (ka != kb) return ka < kb;
                     return ct::canon_key(a.target->process) <
                            ct::canon_key(b.target->process);
                   });
  return ts;
}

std::string trans_line(const ct::Transition& t) {
  return ct::to_string(t.label) + "  ==>  " + ct::to_string(t.target->process);
}

void print_state(const ct::DerivPtr& d) {
  std::cout << ct::to_string(d->process) << "\n  :: " << ct::to_string(d->type)
            << "\n";
}

void print_receivers(const std::vector<ct::Name>& rs) {
  for (const auto& x : rs)
    std::cout << "# " << ct::to_string(x) << " awaits a type\n";
}

// ---------------------------------------------------------------------------
// check: synthesize the type, optionally against an expected hypersequent.

int cmd_check(const std::string& path, const std::optional<std::string>& expect,
              bool json) {
  ct::DerivPtr d = load(path);
  if (expect) {
    ct::Hypersequent want = ct::parse_hypersequent(*expect);
    if (!ct::hs_equal(d->type, want)) {
      if (json) {
        ct::Json j;
        j["synthesized"] = ct::hypersequent_json(d->type);
        j["expected"] = ct::hypersequent_json(want);
        j["match"] = false;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "synthesized: " << ct::to_string(d->type) << "\n"
                  << "expected:    " << ct::to_string(want) << "\n";
      }
      return fail("type", "synthesized type differs from expected", kExitType);
    }
  }
  if (json)
    std::cout << ct::hypersequent_json(d->type).dump(2) << "\n";
  else
    std::cout << ct::to_string(d->type) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// trans: list enabled transitions; pending type receivers are noted but are
// not transitions, since firing one needs a witness from outside.

int cmd_trans(const std::string& path, bool json) {
  ct::DerivPtr d = load(path);
  auto ts = sorted_transitions(d);
  auto rs = ct::type_receivers(d);
  if (json) {
    ct::Json j;
    j["transitions"] = ct::Json::array();
    for (const auto& t : ts) j["transitions"].push_back(ct::transition_json(t));
    j["type_receivers"] = ct::Json::array();
    for (const auto& x : rs) j["type_receivers"].push_back(ct::to_string(x));
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& t : ts) std::cout << trans_line(t) << "\n";
    print_receivers(rs);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// step: apply transitions one at a time. A script is a list of label texts;
// interactive mode shows a numbered menu and accepts a number, a label text,
// or q. Both modes select from the same sorted list, so identical label
// choices reach identical final states.

int cmd_step(const std::string& path, const std::vector<std::string>& script,
             bool interactive, bool json) {
  ct::DerivPtr d = load(path);
  ct::Trace trace{d, {}};
  auto apply = [&](const ct::Transition& t) {
    trace.steps.push_back({t.label, t.target});
    d = t.target;
  };
  auto find_label = [](const std::vector<ct::Transition>& ts,
                       const std::string& want) {
    return std::find_if(ts.begin(), ts.end(), [&](const ct::Transition& t) {
      return ct::to_string(t.label) == want;
    });
  };

  if (interactive) {
    for (;;) {
      print_state(d);
      if (ct::is_terminated(d->process)) {
        std::cout << bold("terminated.") << "\n";
        break;
      }
      auto ts = sorted_transitions(d);
      auto rs = ct::type_receivers(d);
      for (size_t i = 0; i < ts.size(); ++i)
        std::cout << "[" << (i + 1) << "] " << trans_line(ts[i]) << "\n";
      print_receivers(rs);
      if (ts.empty()) {
        std::cout << "no selectable transitions.\n";
        break;
      }
      std::cout << "choose (number, label, or q): " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) break;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
        line.pop_back();
      size_t at = line.find_first_not_of(' ');
      line = at == std::string::npos ? "" : line.substr(at);
      if (line.empty()) continue;
      if (line == "q" || line == "quit") break;
      if (std::all_of(line.begin(), line.end(),
                      [](unsigned char c) { return std::isdigit(c); })) {
        size_t i = std::stoul(line);
        if (i >= 1 && i <= ts.size()) {
          apply(ts[i - 1]);
        } else {
          std::cout << "no such choice.\n";
        }
        continue;
      }
      auto it = find_label(ts, line);
      if (it != ts.end())
        apply(*it);
      else
        std::cout << "no transition labelled `" << line << "`.\n";
    }
  } else {
    for (const auto& want : script) {
      auto ts = sorted_transitions(d);
      auto it = find_label(ts, want);
      if (it == ts.end()) {
        std::vector<std::string> avail;
        for (const auto& t : ts) avail.push_back(ct::to_string(t.label));
        std::vector<std::string> recv;
        for (const auto& x : ct::type_receivers(d))
          recv.push_back(ct::to_string(x));
        throw ct::NoSuchTransition(want, avail, recv);
      }
      if (!json) std::cout << trans_line(*it) << "\n";
      apply(*it);
    }
  }

  if (json) {
    std::cout << ct::trace_json(trace).dump(2) << "\n";
  } else {
    std::cout << bold("final:") << "\n";
    print_state(d);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run: fire tau transitions until none is enabled. Observable transitions
// and pending type receivers are the environment's choice, so they are
// reported at the quiescent state rather than fired.

int cmd_run(const std::string& path, long max_steps, const std::string& policy,
            std::uint64_t seed, bool json) {
  ct::DerivPtr d = load(path);
  ct::Rng rng{seed};
  ct::Trace trace{d, {}};
  long fired = 0;
  bool capped = false;
  for (;;) {
    auto ts = sorted_transitions(d);
    std::vector<ct::Transition> taus;
    for (const auto& t : ts)
      if (is_tau(t.label)) taus.push_back(t);
    if (taus.empty()) break;
    if (fired >= max_steps) {
      capped = true;
      break;
    }
    const ct::Transition& t =
        policy == "random" ? taus[rng.below(taus.size())] : taus.front();
    if (!json) std::cout << trans_line(t) << "\n";
    trace.steps.push_back({t.label, t.target});
    d = t.target;
    ++fired;
  }

  auto ts = sorted_transitions(d);
  auto rs = ct::type_receivers(d);
  if (json) {
    ct::Json j;
    j["trace"] = ct::trace_json(trace);
    j["quiescent"] = !capped;
    j["observables"] = ct::Json::array();
    for (const auto& t : ts)
      if (!is_tau(t.label)) j["observables"].push_back(ct::to_string(t.label));
    j["type_receivers"] = ct::Json::array();
    for (const auto& x : rs) j["type_receivers"].push_back(ct::to_string(x));
    std::cout << j.dump(2) << "\n";
  } else {
    if (!capped)
      std::cout << bold("quiescent") << " after " << fired << " step(s)\n";
    std::cout << bold("final:") << "\n";
    print_state(d);
    for (const auto& t : ts)
      if (!is_tau(t.label))
        std::cout << "observable: " << ct::to_string(t.label) << "\n";
    print_receivers(rs);
  }
  if (capped)
    return fail("budget",
                "tau steps remain after " + std::to_string(max_steps) +
                    " step(s)",
                kExitBudget);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// explore: search for a terminating trace, or enumerate the bounded
// reachable state space. The budget is expansions for terminate and a step
// bound for graph; 0 picks a per-goal default.

int cmd_explore(const std::string& path, long budget, const std::string& goal,
                bool json) {
  ct::DerivPtr d = load(path);
  if (goal == "terminate") {
    if (budget <= 0) budget = 100000;
    ct::TerminationResult r = ct::find_terminating_trace(d, budget);
    if (json) {
      ct::Json j;
      j["expansions"] = r.expansions;
      j["trace"] = r.trace ? ct::trace_json(*r.trace) : ct::Json(nullptr);
      std::cout << j.dump(2) << "\n";
    } else if (r.trace) {
      for (const auto& s : r.trace->steps)
        std::cout << ct::to_string(s.label) << "  ==>  "
                  << ct::to_string(s.state->process) << "\n";
      std::cout << "terminating trace: " << r.trace->steps.size()
                << " step(s), " << r.expansions << " expansion(s)\n";
    }
    if (!r.trace)
      return fail("budget",
                  "no terminating trace within " + std::to_string(budget) +
                      " expansions",
                  kExitBudget);
    return kExitOk;
  }

  if (budget <= 0) budget = 8;
  if (budget > std::numeric_limits<int>::max())
    throw UsageError("step budget too large");
  ct::ReachResult r = ct::reachable(d, static_cast<int>(budget));
  if (json) {
    ct::Json j;
    j["states"] = ct::Json::array();
    for (const auto& st : r.states)
      j["states"].push_back({{"process", ct::to_string(st->process)},
                             {"type", ct::hypersequent_json(st->type)}});
    j["truncated"] = r.truncated;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << r.states.size() << " state(s) within " << budget
              << " step(s)\n";
    for (const auto& st : r.states) print_state(st);
  }
  if (r.truncated)
    return fail("budget",
                "state space truncated at " + std::to_string(budget) +
                    " step(s)",
                kExitBudget);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen: derive random well-typed processes. Consecutive seeds starting at
// --seed, one process each.

int cmd_gen(std::uint64_t seed, int depth, int count, bool json) {
  ct::Json arr = ct::Json::array();
  for (int i = 0; i < count; ++i) {
    ct::GenConfig cfg;
    cfg.seed = seed + static_cast<std::uint64_t>(i);
    cfg.max_depth = depth;
    ct::DerivPtr d = ct::generate(cfg);
    if (json) {
      arr.push_back({{"seed", cfg.seed},
                     {"process", ct::to_string(d->process)},
                     {"type", ct::hypersequent_json(d->type)}});
    } else {
      std::cout << "# seed " << cfg.seed << "\n";
      print_state(d);
    }
  }
  if (json) std::cout << arr.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// graph: breadth-first reachable state space, bounded by a state count,
// written as a DOT digraph. Nodes are canonically renamed process texts, so
// alpha-equivalent states collapse to one node.

std::string dot_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o;
}

int cmd_graph(const std::string& path, int max_states, const std::string& out,
              bool json) {
  ct::DerivPtr d = load(path);
  const std::string start = ct::canon_key(d->process);
  // Node id: canonically renamed text, collapsing alpha-equivalent states.
  // Node label: the first representative's own text.
  std::vector<std::pair<std::string, std::string>> nodes = {
      {start, ct::to_string(d->process)}};
  std::set<std::string> seen = {start};
  std::vector<std::array<std::string, 3>> edges;
  std::set<std::string> edge_keys;
  std::deque<ct::DerivPtr> frontier = {d};
  bool truncated = false;
  while (!frontier.empty()) {
    ct::DerivPtr cur = frontier.front();
    frontier.pop_front();
    const std::string from = ct::canon_key(cur->process);
    for (const auto& t : sorted_transitions(cur)) {
      const std::string to = ct::canon_key(t.target->process);
      if (!seen.count(to)) {
        if (static_cast<int>(seen.size()) >= max_states) {
          truncated = true;
          continue;
        }
        seen.insert(to);
        nodes.push_back({to, ct::to_string(t.target->process)});
        frontier.push_back(t.target);
      }
      const std::string label = ct::to_string(t.label);
      if (edge_keys.insert(from + "\x01" + label + "\x01" + to).second)
        edges.push_back({from, label, to});
    }
  }

  std::ostringstream os;
  if (json) {
    ct::Json j;
    j["nodes"] = ct::Json::array();
    for (const auto& [id, text] : nodes)
      j["nodes"].push_back({{"id", id}, {"label", text}});
    j["edges"] = ct::Json::array();
    for (const auto& e : edges)
      j["edges"].push_back({{"from", e[0]}, {"label", e[1]}, {"to", e[2]}});
    j["truncated"] = truncated;
    os << j.dump(2) << "\n";
  } else {
    os << "digraph ct {\n  rankdir=LR;\n  node [shape=box];\n";
    if (truncated) os << "  // truncated at " << max_states << " state(s)\n";
    for (const auto& [id, text] : nodes) {
      os << "  \"" << dot_escape(id) << "\" [label=\"" << dot_escape(text)
         << "\"";
      if (id == start) os << ", peripheries=2";
      os << "];\n";
    }
    for (const auto& e : edges)
      os << "  \"" << dot_escape(e[0]) << "\" -> \"" << dot_escape(e[2])
         << "\" [label=\"" << dot_escape(e[1]) << "\"];\n";
    os << "}\n";
  }

  if (out.empty() || out == "-") {
    std::cout << os.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot write `" + out + "`");
    f << os.str();
  }
  return kExitOk;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ct::ParseError& e) {
    return fail("parse", e.what(), kExitParse);
  } catch (const ct::TypeError& e) {
    return fail("type", e.what(), kExitType);
  } catch (const ct::NoSuchTransition& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const ct::InternalInvariantViolation& e) {
    return fail("internal", e.what(), kExitInternal);
  } catch (const std::invalid_argument& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ct: typed process kernel. Checks session-typed processes, lists and "
      "applies labelled transitions, searches for terminating runs, and "
      "renders reachable state spaces."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 1 type error, 2 parse error, 3 budget exhausted,\n"
      "4 usage error, 5 internal defect. Failures print one\n"
      "`CT-ERR:<class>: <message>` line on stderr. CT_COLOR=0 disables\n"
      "styling. Process files use the .ct extension.");

  std::string path;
  std::optional<std::string> expect;
  std::vector<std::string> script;
  bool interactive = false;
  bool json = false;
  long max_steps = 256;
  std::string policy = "first";
  std::uint64_t seed = 0;
  long budget = 0;
  std::string goal = "terminate";
  int depth = 4;
  int count = 1;
  int max_states = 64;
  std::string out = "-";

  CLI::App* c_check = app.add_subcommand("check", "Synthesize a type");
  c_check->add_option("file", path, "process file")->required();
  c_check->add_option("--expect", expect,
                      "hypersequent the synthesized type must equal");
  c_check->add_flag("--json", json, "emit JSON");

  CLI::App* c_trans =
      app.add_subcommand("trans", "List enabled transitions");
  c_trans->add_option("file", path, "process file")->required();
  c_trans->add_flag("--json", json, "emit JSON");

  CLI::App* c_step = app.add_subcommand(
      "step", "Apply transitions from a label script or interactively");
  c_step->add_option("file", path, "process file")->required();
  c_step->add_option("labels", script, "label texts to apply in order");
  c_step->add_flag("--interactive", interactive, "choose from a menu");
  c_step->add_flag("--json", json, "emit the applied trace as JSON");

  CLI::App* c_run = app.add_subcommand(
      "run", "Fire tau transitions until none is enabled");
  c_run->add_option("file", path, "process file")->required();
  c_run->add_option("--max-steps", max_steps, "tau budget")
      ->capture_default_str();
  c_run->add_option("--policy", policy, "tau choice: first or random")
      ->check(CLI::IsMember({"first", "random"}))
      ->capture_default_str();
  c_run->add_option("--seed", seed, "seed for --policy random")
      ->capture_default_str();
  c_run->add_flag("--json", json, "emit JSON");

  CLI::App* c_explore = app.add_subcommand(
      "explore", "Search for termination or map the reachable states");
  c_explore->add_option("file", path, "process file")->required();
  c_explore
      ->add_option("--budget", budget,
                   "expansions (terminate) or step bound (graph); 0 = auto")
      ->capture_default_str();
  c_explore->add_option("--goal", goal, "terminate or graph")
      ->check(CLI::IsMember({"terminate", "graph"}))
      ->capture_default_str();
  c_explore->add_flag("--json", json, "emit JSON");

  CLI::App* c_gen =
      app.add_subcommand("gen", "Generate random well-typed processes");
  c_gen->add_option("--seed", seed, "first seed")->capture_default_str();
  c_gen->add_option("--depth", depth, "derivation depth bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_gen->add_option("--count", count, "processes to generate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_gen->add_flag("--json", json, "emit JSON");

  CLI::App* c_graph = app.add_subcommand(
      "graph", "Write the reachable transition system as DOT");
  c_graph->add_option("file", path, "process file")->required();
  c_graph->add_option("--max-states", max_states, "node budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_graph->add_option("--out", out, "output path, - for stdout")
      ->capture_default_str();
  c_graph->add_flag("--json", json, "emit JSON instead of DOT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitUsage);
  }

  if (c_step->parsed() && interactive && !script.empty())
    return fail("usage", "--interactive and a label script are exclusive",
                kExitUsage);

  return guarded([&]() -> int {
    if (c_check->parsed()) return cmd_check(path, expect, json);
    if (c_trans->parsed()) return cmd_trans(path, json);
    if (c_step->parsed()) return cmd_step(path, script, interactive, json);
    if (c_run->parsed()) return cmd_run(path, max_steps, policy, seed, json);
    if (c_explore->parsed()) return cmd_explore(path, budget, goal, json);
    if (c_gen->parsed()) return cmd_gen(seed, depth, count, json);
    if (c_graph->parsed()) return cmd_graph(path, max_states, out, json);
    throw UsageError("no command given");
  });
}

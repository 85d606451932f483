#pragma once

// State-space exploration and the metatheory harness: random generation of
// well-typed derivations, bounded reachability, terminating-trace search,
// per-state audits (type preservation, progress), and bounded saturation of
// the derivable judgements for the independence check.
//
// Everything here is deterministic per seed: randomness comes only from an
// explicit Rng, and all containers iterate in a defined order. Suites shard
// by seed across workers with no shared mutable state.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ct/hypersequent.hpp"
#include "ct/lts.hpp"
#include "ct/name.hpp"
#include "ct/process.hpp"
#include "ct/proposition.hpp"
#include "ct/rng.hpp"
#include "ct/typing.hpp"

namespace ct {

// ---------------------------------------------------------------------------
// Traces.

struct TraceStep {
  Label label;
  DerivPtr state;
};

struct Trace {
  DerivPtr start;
  std::vector<TraceStep> steps;
};

// Transitions plus one type-input step per waiting receiver, instantiated
// with the unit type. Receivers branch over infinitely many types, so search
// and audits sample this single canonical witness.
inline std::vector<Transition> all_successors(const DerivPtr& d) {
  std::vector<Transition> out = transitions(d);
  for (const Name& x : type_receivers(d)) out.push_back(recv_type_step(d, x, one()));
  return out;
}

// Search priority: disposals shrink the state, silent steps make progress,
// spawns grow the state and go last. A silent step that spawns or disposes
// under the hood is classified by what it does, not by its label.
inline int successor_class(const Transition& t) {
  for (const char* r : {"spawn-acc", "spawn-req", "cut-spawn"})
    if (t.rules.count(r)) return 3;
  for (const char* r : {"disp-acc", "disp-req", "cut-dispose"})
    if (t.rules.count(r)) return 0;
  return is_tau(t.label) ? 1 : 2;
}

// ---------------------------------------------------------------------------
// Random well-typed derivations.
//
// The pool starts with leaf derivations and grows by weight-sampled rule
// applications; every application respects the typing side conditions, and
// the result is re-inferred so a generator defect fails loudly instead of
// producing an ill-typed state. max_depth counts derivation levels (a leaf
// is depth 1).

struct GenConfig {
  std::uint64_t seed = 0;
  int max_depth = 4;
  // Weight per rule tag ("ax", "cut", "mix0", "mix", "one", "bot", "tensor",
  // "parr", "plus1", "plus2", "with", "exists", "forall", "bang", "quest",
  // "weaken", "contract"); missing tags weigh 1. Must not sum to zero.
  std::map<std::string, double> rule_weights;
  std::vector<std::string> atom_pool = {"X", "Y"};
};

namespace detail {

// Caps keeping generated populations desk-scale: randomly drawn annotation
// propositions stay shallow and no sequent accumulates more than two client
// endpoints (structural composition may still exceed either).
constexpr int kGenAnnotationDepth = 3;
constexpr int kGenClientCap = 2;

struct GenItem {
  ProcPtr proc;
  DerivPtr d;
  int height;  // edges on the longest derivation path; leaf = 0
};

// Names free in some server body are serviced through that server's own
// disposal and duplication; cutting them directly has no transition rule,
// so the generator never restricts them.
inline void collect_server_deps(const ProcPtr& p, NameSet& out) {
  if (!p) return;
  if (p->kind == ProcKind::Server) {
    NameSet fn = free_names(p->p);
    fn.erase(p->b);
    out.insert(fn.begin(), fn.end());
  }
  collect_server_deps(p->p, out);
  collect_server_deps(p->q, out);
}

struct Gen {
  Rng rng;
  const GenConfig& cfg;
  std::vector<GenItem> pool;
  int chan_counter = 0;
  int tyvar_counter = 0;
  std::vector<Rule> rule_order;
  std::vector<double> rule_cum;
  std::map<Rule, double> eff_weight;

  explicit Gen(const GenConfig& c) : rng(c.seed), cfg(c) {
    static const Rule all[] = {
        Rule::Ax,     Rule::Cut,    Rule::Mix0, Rule::Mix,    Rule::One,
        Rule::Bot,    Rule::Tensor, Rule::Parr, Rule::Plus1,  Rule::Plus2,
        Rule::With,   Rule::Exists, Rule::Forall, Rule::Bang, Rule::Quest,
        Rule::Weaken, Rule::Contract};
    double total = 0;
    for (Rule r : all) {
      auto it = cfg.rule_weights.find(rule_name(r));
      double w = it == cfg.rule_weights.end() ? 1.0 : it->second;
      if (w < 0) throw std::invalid_argument("rule weights must be non-negative");
      total += w;
      eff_weight[r] = w;
      rule_order.push_back(r);
      rule_cum.push_back(total);
    }
    if (total <= 0) throw std::invalid_argument("rule weights must not all be zero");
  }

  Rule sample_rule() {
    double u = rng.unit() * rule_cum.back();
    for (std::size_t i = 0; i < rule_cum.size(); ++i)
      if (u < rule_cum[i]) return rule_order[i];
    return rule_order.back();
  }

  Name fresh_chan() {
    static const char bases[] = "abcdef";
    int i = chan_counter++;
    std::string b(1, bases[i % 6]);
    if (i >= 6) b += std::to_string(i / 6);
    return name(b);
  }

  Name fresh_tyvar() { return name("Z" + std::to_string(tyvar_counter++)); }

  PropPtr rand_prop_rec(int depth, std::vector<Name>& bound) {
    if (depth <= 1 || rng.below(2) == 0) {
      std::vector<PropPtr> leaves = {one(), bot(), zero(), top()};
      for (const auto& a : cfg.atom_pool) {
        leaves.push_back(atom(name(a)));
        leaves.push_back(dual_atom(name(a)));
      }
      for (const auto& v : bound) {
        leaves.push_back(atom(v));
        leaves.push_back(dual_atom(v));
      }
      return leaves[rng.below(leaves.size())];
    }
    switch (rng.below(8)) {
      case 0: return tensor(rand_prop_rec(depth - 1, bound), rand_prop_rec(depth - 1, bound));
      case 1: return parr(rand_prop_rec(depth - 1, bound), rand_prop_rec(depth - 1, bound));
      case 2: return plus(rand_prop_rec(depth - 1, bound), rand_prop_rec(depth - 1, bound));
      case 3: return with(rand_prop_rec(depth - 1, bound), rand_prop_rec(depth - 1, bound));
      case 4: return of_course(rand_prop_rec(depth - 1, bound));
      case 5: return why_not(rand_prop_rec(depth - 1, bound));
      case 6: {
        Name v = fresh_tyvar();
        bound.push_back(v);
        PropPtr b = rand_prop_rec(depth - 1, bound);
        bound.pop_back();
        return exists(v, b);
      }
      default: {
        Name v = fresh_tyvar();
        bound.push_back(v);
        PropPtr b = rand_prop_rec(depth - 1, bound);
        bound.pop_back();
        return forall(v, b);
      }
    }
  }

  PropPtr rand_prop(int depth) {
    std::vector<Name> bound;
    return rand_prop_rec(depth, bound);
  }

  void push(ProcPtr proc, int height) {
    DerivPtr d;
    try {
      d = infer(proc);
    } catch (const TypeError& e) {
      throw std::logic_error(std::string("generate built an ill-typed term: ") +
                             e.what() + " in " + to_string(proc));
    }
    pool.push_back({std::move(proc), std::move(d), height});
  }

  GenItem take(std::size_t i) {
    GenItem it = std::move(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    return it;
  }

  // Leaf choice follows the leaf-rule weights, so a config pinned to one
  // rule seeds the pool with that rule alone.
  void push_leaf() {
    double wo = eff_weight[Rule::One], wa = eff_weight[Rule::Ax],
           wm = eff_weight[Rule::Mix0];
    double total = wo + wa + wm;
    double u = total > 0 ? rng.unit() * total : rng.unit() * 3;
    if (total <= 0) wo = wa = wm = 1;
    if (u < wo)
      push(close_(fresh_chan()), 0);
    else if (u < wo + wa)
      push(link(rand_prop(kGenAnnotationDepth), fresh_chan(), fresh_chan()), 0);
    else
      push(nil(), 0);
  }

  bool fits(int height) const { return height <= cfg.max_depth - 1; }

  const Sequent* only_seq(std::size_t i) const {
    return pool[i].d->type.sequents.size() == 1 ? &pool[i].d->type.sequents[0] : nullptr;
  }

  static int whynot_count(const Sequent& s) {
    int n = 0;
    for (const auto& [_, t] : s)
      if (t->kind == PropKind::WhyNot) ++n;
    return n;
  }

  bool apply_bot() {
    std::vector<std::size_t> cs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].d->type.sequents.size() <= 1 && fits(pool[i].height + 1)) cs.push_back(i);
    if (cs.empty()) return false;
    GenItem it = take(cs[rng.below(cs.size())]);
    push(wait_(fresh_chan(), it.proc), it.height + 1);
    return true;
  }

  bool apply_weaken() {
    std::vector<std::size_t> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].d->type.sequents.size() > 1 || !fits(pool[i].height + 1)) continue;
      if (!pool[i].d->type.sequents.empty() &&
          whynot_count(pool[i].d->type.sequents[0]) >= kGenClientCap)
        continue;
      cs.push_back(i);
    }
    if (cs.empty()) return false;
    GenItem it = take(cs[rng.below(cs.size())]);
    push(client_dispose(rand_prop(kGenAnnotationDepth - 1), fresh_chan(), it.proc),
         it.height + 1);
    return true;
  }

  bool apply_quest() {
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      int wn = whynot_count(*s);
      for (const auto& [y, t] : *s)
        if (wn - (t->kind == PropKind::WhyNot ? 1 : 0) + 1 <= kGenClientCap)
          cs.emplace_back(i, y);
    }
    if (cs.empty()) return false;
    auto [i, y] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    push(client_use(fresh_chan(), y, it.proc), it.height + 1);
    return true;
  }

  bool apply_contract() {
    std::vector<std::tuple<std::size_t, Name, Name>> direct;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      for (auto a = s->begin(); a != s->end(); ++a) {
        if (a->second->kind != PropKind::WhyNot) continue;
        for (auto b = std::next(a); b != s->end(); ++b)
          if (b->second->kind == PropKind::WhyNot && alpha_eq(a->second, b->second))
            direct.emplace_back(i, a->first, b->first);
      }
    }
    if (!direct.empty()) {
      auto [i, x, y] = direct[rng.below(direct.size())];
      GenItem it = take(i);
      push(client_spawn(x, y, it.proc), it.height + 1);
      return true;
    }
    // Detour through an extra disposal: the spawned copy is immediately the
    // twin of an existing client endpoint, so the conclusion is unchanged.
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 2)) continue;
      if (whynot_count(*s) >= kGenClientCap) continue;
      for (const auto& [y, t] : *s)
        if (t->kind == PropKind::WhyNot) cs.emplace_back(i, y);
    }
    if (cs.empty()) return false;
    auto [i, y] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    PropPtr under = (*it.d->type.type_of(y))->left;
    Name z = fresh_chan();
    push(client_spawn(y, z, client_dispose(under, z, it.proc)), it.height + 2);
    return true;
  }

  bool apply_bang() {
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      int wn = whynot_count(*s);
      for (const auto& [y, t] : *s) {
        int others = static_cast<int>(s->size()) - 1;
        int others_wn = wn - (t->kind == PropKind::WhyNot ? 1 : 0);
        if (others_wn == others) cs.emplace_back(i, y);
      }
    }
    if (cs.empty()) return false;
    auto [i, y] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    push(server(fresh_chan(), y, it.proc), it.height + 1);
    return true;
  }

  bool apply_parr() {
    std::vector<std::tuple<std::size_t, Name, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || s->size() < 2 || !fits(pool[i].height + 1)) continue;
      for (const auto& [x, _] : *s)
        for (const auto& [y, __] : *s)
          if (!(x == y)) cs.emplace_back(i, x, y);
    }
    if (cs.empty()) return false;
    auto [i, x, y] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    push(recv(x, y, it.proc), it.height + 1);
    return true;
  }

  bool apply_tensor() {
    // Prefer a continuation already split in two independent parts.
    std::vector<std::tuple<std::size_t, Name, Name>> direct;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& ss = pool[i].d->type.sequents;
      if (ss.size() != 2 || !fits(pool[i].height + 1)) continue;
      for (int o = 0; o < 2; ++o)
        for (const auto& [y, _] : ss[o])
          for (const auto& [x, __] : ss[1 - o]) direct.emplace_back(i, x, y);
    }
    if (!direct.empty()) {
      auto [i, x, y] = direct[rng.below(direct.size())];
      GenItem it = take(i);
      push(send(x, y, it.proc), it.height + 1);
      return true;
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (i == j || !only_seq(i) || !only_seq(j)) continue;
        if (!fits(2 + std::max(pool[i].height, pool[j].height))) continue;
        pairs.emplace_back(i, j);
      }
    if (pairs.empty()) return false;
    auto [i, j] = pairs[rng.below(pairs.size())];
    const Sequent* si = only_seq(i);
    const Sequent* sj = only_seq(j);
    std::vector<Name> is, js;
    for (const auto& [n, _] : *si) is.push_back(n);
    for (const auto& [n, _] : *sj) js.push_back(n);
    Name y = is[rng.below(is.size())];
    Name x = js[rng.below(js.size())];
    GenItem a = take(std::max(i, j));
    GenItem b = take(std::min(i, j));
    const GenItem& obj = i < j ? b : a;
    const GenItem& subj = i < j ? a : b;
    push(send(x, y, par(obj.proc, subj.proc)), 2 + std::max(a.height, b.height));
    return true;
  }

  bool apply_plus(bool left) {
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      for (const auto& [x, _] : *s) cs.emplace_back(i, x);
    }
    if (cs.empty()) return false;
    auto [i, x] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    PropPtr b = rand_prop(kGenAnnotationDepth - 1);
    push(left ? inl(x, b, it.proc) : inr(x, b, it.proc), it.height + 1);
    return true;
  }

  bool apply_with() {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (i == j) continue;
        const Sequent* si = only_seq(i);
        const Sequent* sj = only_seq(j);
        if (!si || !sj || si->size() != 1 || sj->size() != 1) continue;
        if (!fits(1 + std::max(pool[i].height, pool[j].height))) continue;
        pairs.emplace_back(i, j);
      }
    bool use_pair = !pairs.empty() && rng.below(10) < 7;
    if (!use_pair) {
      std::vector<std::pair<std::size_t, Name>> cs;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const Sequent* s = only_seq(i);
        if (!s || !fits(pool[i].height + 1)) continue;
        for (const auto& [x, _] : *s) cs.emplace_back(i, x);
      }
      if (!cs.empty()) {
        auto [i, x] = cs[rng.below(cs.size())];
        GenItem it = take(i);
        push(case_(x, it.proc, it.proc), it.height + 1);
        return true;
      }
      if (pairs.empty()) return false;
    }
    auto [i, j] = pairs[rng.below(pairs.size())];
    Name ni = only_seq(i)->begin()->first;
    Name nj = only_seq(j)->begin()->first;
    GenItem a = take(std::max(i, j));
    GenItem b = take(std::min(i, j));
    const GenItem& l = i < j ? b : a;
    const GenItem& r = i < j ? a : b;
    Name x = fresh_chan();
    push(case_(x, rename(l.proc, {{ni, x}}), rename(r.proc, {{nj, x}})),
         1 + std::max(a.height, b.height));
    return true;
  }

  bool apply_exists() {
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      for (const auto& [x, _] : *s) cs.emplace_back(i, x);
    }
    if (cs.empty()) return false;
    auto [i, x] = cs[rng.below(cs.size())];
    PropPtr t = *pool[i].d->type.type_of(x);
    // An identity scheme over an endpoint whose type is itself an identity
    // existential would send a witness alpha-equal to the scheme type, the
    // one observable step that reproduces the whole judgement and so trips
    // the dichotomy audited by check_subject_reduction. Such endpoints get
    // the constant scheme instead.
    const bool degenerate = t->kind == PropKind::Exists &&
                            t->left->kind == PropKind::Atom &&
                            t->left->var == t->var;
    const bool constant_ok = prop_depth(t) + 1 <= kGenAnnotationDepth;
    if (degenerate && !constant_ok) return false;
    GenItem it = take(i);
    Name v = fresh_tyvar();
    if (constant_ok && (degenerate || rng.below(2) == 0)) {
      // Constant scheme: the witness is irrelevant to the continuation.
      push(send_type(x, rand_prop(kGenAnnotationDepth - 1), v, t, it.proc), it.height + 1);
    } else {
      // Identity scheme: the witness is the continuation's own type.
      push(send_type(x, t, v, atom(v), it.proc), it.height + 1);
    }
    return true;
  }

  bool apply_forall() {
    std::vector<std::pair<std::size_t, Name>> cs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sequent* s = only_seq(i);
      if (!s || !fits(pool[i].height + 1)) continue;
      for (const auto& [x, _] : *s) cs.emplace_back(i, x);
    }
    if (cs.empty()) return false;
    auto [i, x] = cs[rng.below(cs.size())];
    GenItem it = take(i);
    push(recv_type(x, fresh_tyvar(), it.proc), it.height + 1);
    return true;
  }

  bool cuttable(const NameSet& deps, const Name& x, const PropPtr& t) const {
    return t->kind != PropKind::WhyNot || !deps.count(x);
  }

  bool apply_cut() {
    struct Cand {
      std::size_t i, j;  // i == j: both endpoints inside one item
      Name x, y;
    };
    std::vector<Cand> cs;
    std::vector<NameSet> deps(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) collect_server_deps(pool[i].proc, deps[i]);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& ss = pool[i].d->type.sequents;
      if (ss.size() >= 2 && fits(pool[i].height + 1)) {
        for (std::size_t a = 0; a < ss.size(); ++a)
          for (std::size_t b = 0; b < ss.size(); ++b) {
            if (a == b) continue;
            for (const auto& [x, tx] : ss[a])
              for (const auto& [y, ty] : ss[b])
                if (alpha_eq(dual(tx), ty) && cuttable(deps[i], x, tx) &&
                    cuttable(deps[i], y, ty))
                  cs.push_back({i, i, x, y});
          }
      }
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (i == j || !fits(2 + std::max(pool[i].height, pool[j].height))) continue;
        for (const auto& si : pool[i].d->type.sequents)
          for (const auto& [x, tx] : si)
            for (const auto& sj : pool[j].d->type.sequents)
              for (const auto& [y, ty] : sj)
                if (alpha_eq(dual(tx), ty) && cuttable(deps[i], x, tx) &&
                    cuttable(deps[j], y, ty))
                  cs.push_back({i, j, x, y});
      }
    }
    if (!cs.empty()) {
      Cand c = cs[rng.below(cs.size())];
      if (c.i == c.j) {
        GenItem it = take(c.i);
        push(res(c.x, c.y, it.proc), it.height + 1);
      } else {
        GenItem a = take(std::max(c.i, c.j));
        GenItem b = take(std::min(c.i, c.j));
        const GenItem& l = c.i < c.j ? b : a;
        const GenItem& r = c.i < c.j ? a : b;
        push(res(c.x, c.y, par(l.proc, r.proc)), 2 + std::max(a.height, b.height));
      }
      return true;
    }
    // Cut against a fresh forwarder: always available and type-preserving.
    std::vector<std::pair<std::size_t, Name>> fw;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!fits(pool[i].height + 2)) continue;
      for (const auto& s : pool[i].d->type.sequents)
        for (const auto& [x, tx] : s)
          if (cuttable(deps[i], x, tx)) fw.emplace_back(i, x);
    }
    if (fw.empty()) return false;
    auto [i, x] = fw[rng.below(fw.size())];
    GenItem it = take(i);
    PropPtr tx = *it.d->type.type_of(x);
    Name z = fresh_chan();
    Name w = fresh_chan();
    push(res(x, w, par(it.proc, link(dual(tx), z, w))), it.height + 2);
    return true;
  }

  bool apply_mix() {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j)
        if (fits(1 + std::max(pool[i].height, pool[j].height))) pairs.emplace_back(i, j);
    if (pairs.empty()) return false;
    auto [i, j] = pairs[rng.below(pairs.size())];
    GenItem b = take(j);
    GenItem a = take(i);
    push(par(a.proc, b.proc), 1 + std::max(a.height, b.height));
    return true;
  }

  bool apply(Rule r) {
    switch (r) {
      case Rule::One: push(close_(fresh_chan()), 0); return true;
      case Rule::Mix0: push(nil(), 0); return true;
      case Rule::Ax:
        push(link(rand_prop(kGenAnnotationDepth), fresh_chan(), fresh_chan()), 0);
        return true;
      case Rule::Bot: return apply_bot();
      case Rule::Weaken: return apply_weaken();
      case Rule::Quest: return apply_quest();
      case Rule::Contract: return apply_contract();
      case Rule::Bang: return apply_bang();
      case Rule::Parr: return apply_parr();
      case Rule::Tensor: return apply_tensor();
      case Rule::Plus1: return apply_plus(true);
      case Rule::Plus2: return apply_plus(false);
      case Rule::With: return apply_with();
      case Rule::Exists: return apply_exists();
      case Rule::Forall: return apply_forall();
      case Rule::Cut: return apply_cut();
      case Rule::Mix: return apply_mix();
    }
    return false;
  }
};

}  // namespace detail

inline DerivPtr generate(const GenConfig& cfg) {
  if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be positive");
  detail::Gen g(cfg);
  int leaves = 2 + static_cast<int>(g.rng.below(3));
  for (int i = 0; i < leaves; ++i) g.push_leaf();
  int draws = 3 * cfg.max_depth;
  for (int d = 0; d < draws; ++d) {
    bool applied = false;
    for (int attempt = 0; attempt < 8 && !applied; ++attempt)
      applied = g.apply(g.sample_rule());
    if (!applied) g.push_leaf();
  }
  std::size_t best = 0;
  int best_h = -1, best_n = -1;
  for (std::size_t i = 0; i < g.pool.size(); ++i) {
    int n = deriv_size(g.pool[i].d);
    if (g.pool[i].height > best_h || (g.pool[i].height == best_h && n > best_n)) {
      best = i;
      best_h = g.pool[i].height;
      best_n = n;
    }
  }
  return g.pool[best].d;
}

// ---------------------------------------------------------------------------
// Bounded reachability: breadth-first closure under transitions, states
// deduplicated up to renaming of bound names. States discovered at the step
// bound are kept but not expanded; the flag reports whether expanding them
// would have found anything new.

struct ReachResult {
  std::vector<DerivPtr> states;
  bool truncated = false;
};

inline ReachResult reachable(const DerivPtr& start, int max_steps) {
  ReachResult r;
  std::set<std::string> seen;
  std::vector<DerivPtr> frontier{start};
  seen.insert(canon_key(start->process));
  r.states.push_back(start);
  for (int depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<DerivPtr> next;
    for (const auto& d : frontier)
      for (const auto& t : transitions(d))
        if (seen.insert(canon_key(t.target->process)).second) {
          next.push_back(t.target);
          r.states.push_back(t.target);
        }
    frontier = std::move(next);
  }
  for (const auto& d : frontier)
    for (const auto& t : transitions(d))
      if (!seen.count(canon_key(t.target->process))) {
        r.truncated = true;
        return r;
      }
  return r;
}

// ---------------------------------------------------------------------------
// Terminating-trace search: iterative deepening, disposals first and spawns
// last, with a global budget on node expansions. An empty result is only
// inconclusive, never a disproof.

struct TerminationResult {
  std::optional<Trace> trace;
  long expansions = 0;
};

namespace detail {

struct TermSearch {
  long budget = 0;
  long expansions = 0;
  bool budget_out = false;
  std::map<std::string, long> seen;  // canon key -> largest remaining depth tried

  bool dfs(const DerivPtr& d, long remaining, bool& cutoff, std::vector<TraceStep>& steps) {
    if (is_terminated(d->process)) return true;
    if (remaining <= 0) {
      cutoff = true;
      return false;
    }
    std::string key = canon_key(d->process);
    auto it = seen.find(key);
    if (it != seen.end() && it->second >= remaining) return false;
    seen[key] = remaining;
    if (expansions >= budget) {
      budget_out = true;
      return false;
    }
    ++expansions;
    std::vector<Transition> succ = all_successors(d);
    std::stable_sort(succ.begin(), succ.end(), [](const Transition& a, const Transition& b) {
      int ca = successor_class(a), cb = successor_class(b);
      if (ca != cb) return ca < cb;
      return to_string(a.label) < to_string(b.label);
    });
    for (const auto& t : succ) {
      steps.push_back({t.label, t.target});
      if (dfs(t.target, remaining - 1, cutoff, steps)) return true;
      steps.pop_back();
      if (budget_out) return false;
    }
    return false;
  }
};

}  // namespace detail

inline TerminationResult find_terminating_trace(const DerivPtr& start, long budget) {
  TerminationResult res;
  detail::TermSearch s;
  s.budget = budget;
  long limit = std::max<long>(4, deriv_size(start));
  while (true) {
    s.seen.clear();
    bool cutoff = false;
    std::vector<TraceStep> steps;
    if (s.dfs(start, limit, cutoff, steps)) {
      res.trace = Trace{start, std::move(steps)};
      res.expansions = s.expansions;
      return res;
    }
    res.expansions = s.expansions;
    if (s.budget_out || !cutoff) return res;  // exhausted, or the space is finite and has no exit
    limit *= 2;
  }
}

// ---------------------------------------------------------------------------
// Per-state metatheory audits.

struct ProgressResult {
  bool ok = true;
  std::string detail;
};

// A well-typed state is either terminated or offers some step; a waiting
// type receiver counts, since it steps under every witness.
inline ProgressResult check_progress(const DerivPtr& d) {
  if (is_terminated(d->process)) return {};
  if (!transitions(d).empty()) return {};
  if (!type_receivers(d).empty()) return {};
  return {false, "stuck non-terminated state " + to_string(d->process) + " : " +
                     to_string(d->type)};
}

struct SRViolation {
  Label label;
  DerivPtr target;
  std::string reason;
};

// Silent steps must preserve the hypersequent exactly; observable steps must
// change it; every target must survive the independent derivation audit.
inline std::optional<SRViolation> check_subject_reduction(const DerivPtr& d) {
  auto audit = [&](const Transition& t) -> std::optional<SRViolation> {
    bool silent = is_tau(t.label);
    bool same = hs_equal(d->type, t.target->type);
    if (silent && !same)
      return SRViolation{t.label, t.target,
                         "silent step changed the type from " + to_string(d->type) +
                             " to " + to_string(t.target->type)};
    if (!silent && same)
      return SRViolation{t.label, t.target,
                         "observable step left the type unchanged: " + to_string(d->type)};
    if (auto why = validate_reason(t.target))
      return SRViolation{t.label, t.target, "target failed the derivation audit: " + *why};
    return std::nullopt;
  };
  for (const auto& t : all_successors(d))
    if (auto v = audit(t)) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bounded saturation of derivable judgements.
//
// Judgements are taken up to renaming of channel names, so a judgement is a
// multiset of components, each a multiset of propositions drawn from a fixed
// finite universe: depth <= 2 over the single atom X (binders canonical).
// Saturation applies every typing rule at the judgement level, layer by
// layer; layer h holds exactly the judgements derivable with proof height h
// (a leaf has height 0). Bounds: at most 4 names in a judgement.

namespace detail {
struct JudgeEngine;
}

class JudgementSpace {
 public:
  static constexpr int kPropDepthBound = 2;
  static constexpr int kNameBound = 4;

  int height_bound() const { return height_bound_; }
  std::size_t size() const { return acc_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  const std::vector<PropPtr>& universe() const { return universe_; }

  // Membership up to channel renaming; anything outside the proposition
  // universe is simply not a member.
  bool contains(const Hypersequent& h) const {
    auto key = key_of(h);
    return key && acc_.count(*key) != 0;
  }

  std::size_t multi_component_count() const {
    std::size_t n = 0;
    for (const auto& k : acc_)
      if (components(k) >= 2) ++n;
    return n;
  }

  // The independence property: every component of every member judgement is
  // itself a member. Returns a description of the first violation in a
  // deterministic order, if any.
  std::optional<std::string> independence_violation() const {
    std::vector<std::string> bad;
    for (const auto& k : acc_) {
      if (components(k) < 2) continue;
      for (const auto& comp : decode(k))
        if (!acc_.count(encode({comp})))
          bad.push_back("component " + to_string(materialize({comp})) +
                        " of judgement " + to_string(materialize(decode(k))) +
                        " is not derivable alone");
    }
    if (bad.empty()) return std::nullopt;
    std::sort(bad.begin(), bad.end());
    return bad.front();
  }

 private:
  friend struct detail::JudgeEngine;

  using Key = std::string;  // proposition indices + 1 as bytes; 0 separates components

  int height_bound_ = 0;
  std::vector<PropPtr> universe_;
  std::map<std::string, int> index_of_;  // canon_key -> universe index
  std::unordered_set<Key> acc_;
  std::vector<std::size_t> layer_sizes_;

  static std::size_t components(const Key& k) {
    if (k.empty()) return 0;
    std::size_t n = 1;
    for (char c : k)
      if (c == 0) ++n;
    return n;
  }

  static std::vector<std::vector<int>> decode(const Key& k) {
    std::vector<std::vector<int>> comps;
    if (k.empty()) return comps;
    comps.emplace_back();
    for (unsigned char c : k) {
      if (c == 0)
        comps.emplace_back();
      else
        comps.back().push_back(static_cast<int>(c) - 1);
    }
    return comps;
  }

  static Key encode(std::vector<std::vector<int>> comps) {
    std::vector<std::string> parts;
    for (auto& c : comps) {
      if (c.empty()) continue;
      std::sort(c.begin(), c.end());
      std::string p;
      for (int i : c) p.push_back(static_cast<char>(i + 1));
      parts.push_back(std::move(p));
    }
    std::sort(parts.begin(), parts.end());
    Key k;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) k.push_back(0);
      k += parts[i];
    }
    return k;
  }

  std::optional<Key> key_of(const Hypersequent& h) const {
    std::vector<std::vector<int>> comps;
    for (const auto& s : h.sequents) {
      comps.emplace_back();
      for (const auto& [_, t] : s) {
        auto it = index_of_.find(canon_key(t));
        if (it == index_of_.end()) return std::nullopt;
        comps.back().push_back(it->second);
      }
    }
    return encode(std::move(comps));
  }

  Hypersequent materialize(const std::vector<std::vector<int>>& comps) const {
    static const char* const bases[] = {"a", "b", "c", "d"};
    std::vector<Sequent> ss;
    std::size_t n = 0;
    for (const auto& comp : comps) {
      Sequent s;
      for (int i : comp) {
        Name x = n < 4 ? name(bases[n]) : name("e", static_cast<int>(n) - 3);
        ++n;
        s.emplace(x, universe_[static_cast<std::size_t>(i)]);
      }
      ss.push_back(std::move(s));
    }
    return Hypersequent::make(std::move(ss));
  }
};

JudgementSpace enumerate_judgements(int max_height);

namespace detail {

struct JudgeEngine {
  JudgementSpace& js;
  // Universe indices for the depth-1 layer (always the first six).
  std::vector<int> leaf_idx;
  std::vector<int> dual_of, quest_of, bang_of, forall_vac, forall_gen;
  std::vector<std::vector<int>> exists_of;
  std::vector<bool> depth1, whynot, free_x;
  // Binary tables over the depth-1 layer, indexed by universe index.
  std::map<std::pair<int, int>, int> tensor_of, parr_of, plus_of, with_of;

  explicit JudgeEngine(JudgementSpace& space) : js(space) { build_universe(); }

  int add(const PropPtr& p) {
    std::string k = canon_key(p);
    auto [it, fresh] = js.index_of_.emplace(k, static_cast<int>(js.universe_.size()));
    if (fresh) js.universe_.push_back(p);
    return it->second;
  }

  int lookup(const PropPtr& p) const {
    auto it = js.index_of_.find(canon_key(p));
    if (it == js.index_of_.end())
      throw std::logic_error("judgement universe is not closed under " + to_string(p));
    return it->second;
  }

  void build_universe() {
    Name X = name("X"), Y = name("Y");
    std::vector<PropPtr> l1 = {one(), bot(), zero(), top(), atom(X), dual_atom(X)};
    for (const auto& p : l1) leaf_idx.push_back(add(p));
    for (const auto& a : l1)
      for (const auto& b : l1) {
        add(tensor(a, b));
        add(parr(a, b));
        add(plus(a, b));
        add(with(a, b));
      }
    for (const auto& a : l1) {
      add(of_course(a));
      add(why_not(a));
    }
    std::vector<PropPtr> bodies = l1;
    bodies.push_back(atom(Y));
    bodies.push_back(dual_atom(Y));
    for (const auto& b : bodies) {
      add(exists(Y, b));
      add(forall(Y, b));
    }

    std::size_t n = js.universe_.size();
    dual_of.resize(n);
    quest_of.assign(n, -1);
    bang_of.assign(n, -1);
    forall_vac.assign(n, -1);
    forall_gen.assign(n, -1);
    exists_of.resize(n);
    depth1.resize(n);
    whynot.resize(n);
    free_x.resize(n);
    int ex_id = lookup(exists(Y, atom(Y)));
    int ex_dual = lookup(exists(Y, dual_atom(Y)));
    for (std::size_t i = 0; i < n; ++i) {
      const PropPtr& p = js.universe_[i];
      dual_of[i] = lookup(dual(p));
      depth1[i] = prop_depth(p) == 1;
      whynot[i] = p->kind == PropKind::WhyNot;
      free_x[i] = ftv(p).count(X) != 0;
      exists_of[i] = {ex_id, ex_dual};
      if (depth1[i]) {
        quest_of[i] = lookup(why_not(p));
        bang_of[i] = lookup(of_course(p));
        forall_vac[i] = lookup(forall(Y, p));
        exists_of[i].push_back(lookup(exists(Y, p)));
        if (p->kind == PropKind::Atom || p->kind == PropKind::DualAtom)
          if (p->var == X) forall_gen[i] = lookup(forall(X, p));
      }
    }
    for (int a : leaf_idx)
      for (int b : leaf_idx) {
        const PropPtr &pa = js.universe_[a], &pb = js.universe_[b];
        tensor_of[{a, b}] = lookup(tensor(pa, pb));
        parr_of[{a, b}] = lookup(parr(pa, pb));
        plus_of[{a, b}] = lookup(plus(pa, pb));
        with_of[{a, b}] = lookup(with(pa, pb));
      }
  }

  static std::size_t names_in(const std::vector<std::vector<int>>& comps) {
    std::size_t n = 0;
    for (const auto& c : comps) n += c.size();
    return n;
  }

  void run(int max_height) {
    js.height_bound_ = max_height;
    // Mix partners bucketed by name count; judgements of four names cannot
    // compose further and the empty judgement composes to a duplicate, so
    // neither is bucketed.
    std::vector<std::vector<JudgementSpace::Key>> bucket(JudgementSpace::kNameBound);
    std::vector<JudgementSpace::Key> last_new;

    auto insert = [&](std::vector<std::vector<int>> comps,
                      std::vector<JudgementSpace::Key>* out) {
      if (names_in(comps) > JudgementSpace::kNameBound) return;
      JudgementSpace::Key k = JudgementSpace::encode(std::move(comps));
      if (js.acc_.insert(k).second && out) out->push_back(std::move(k));
    };

    // Height 0: the leaf rules.
    insert({}, &last_new);
    insert({{leaf_idx[0]}}, &last_new);  // close: a single unit endpoint
    for (std::size_t i = 0; i < js.universe_.size(); ++i)
      insert({{dual_of[i], static_cast<int>(i)}}, &last_new);
    layer_done(last_new, bucket);

    for (int h = 1; h <= max_height && !last_new.empty(); ++h) {
      bool final_layer = h == max_height;
      std::vector<JudgementSpace::Key> cur;
      std::vector<JudgementSpace::Key>* out = final_layer ? nullptr : &cur;

      // Branch composition reads the accumulated set, so it runs before any
      // of this layer's insertions.
      std::vector<std::vector<std::vector<int>>> with_pending;
      for (const auto& key : last_new) {
        auto comps = JudgementSpace::decode(key);
        if (comps.size() != 1) continue;
        const auto& c = comps[0];
        for (std::size_t e = 0; e < c.size(); ++e) {
          if (!depth1[static_cast<std::size_t>(c[e])]) continue;
          std::vector<int> ctx = c;
          ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(e));
          for (int b : leaf_idx) {
            std::vector<int> partner = ctx;
            partner.push_back(b);
            if (!js.acc_.count(JudgementSpace::encode({partner}))) continue;
            for (int concl : {with_of[{c[e], b}], with_of[{b, c[e]}]}) {
              std::vector<int> out_c = ctx;
              out_c.push_back(concl);
              with_pending.push_back({out_c});
            }
          }
        }
      }
      for (auto& comps : with_pending) insert(std::move(comps), out);

      for (const auto& key : last_new) {
        auto comps = JudgementSpace::decode(key);
        std::size_t nc = comps.size();
        std::size_t names = names_in(comps);

        if (nc <= 1) {
          // Sequent growth: a fresh bottom or a fresh disposed client.
          std::vector<int> c = nc ? comps[0] : std::vector<int>{};
          if (names + 1 <= JudgementSpace::kNameBound) {
            std::vector<int> c2 = c;
            c2.push_back(leaf_idx[1]);
            insert({c2}, out);
            for (int b : leaf_idx) {
              std::vector<int> c3 = c;
              c3.push_back(quest_of[b]);
              insert({c3}, out);
            }
          }
        }
        if (nc == 1) {
          const auto& c = comps[0];
          int wn_total = 0, fx_others = 0;
          for (int i : c) {
            if (whynot[static_cast<std::size_t>(i)]) ++wn_total;
            if (free_x[static_cast<std::size_t>(i)]) ++fx_others;
          }
          for (std::size_t e = 0; e < c.size(); ++e) {
            std::size_t pe = static_cast<std::size_t>(c[e]);
            auto replaced = [&](int concl) {
              std::vector<int> c2 = c;
              c2[e] = concl;
              insert({c2}, out);
            };
            // Client conversion and server formation need shallow bodies.
            if (depth1[pe]) {
              replaced(quest_of[c[e]]);
              int others = static_cast<int>(c.size()) - 1;
              if (wn_total - (whynot[pe] ? 1 : 0) == others) replaced(bang_of[c[e]]);
              for (int b : leaf_idx) {
                replaced(plus_of[{c[e], b}]);
                replaced(plus_of[{b, c[e]}]);
              }
              replaced(forall_vac[c[e]]);
              if (forall_gen[c[e]] >= 0 &&
                  fx_others - (free_x[pe] ? 1 : 0) == 0)
                replaced(forall_gen[c[e]]);
            }
            for (int concl : exists_of[c[e]]) replaced(concl);
            // Receive: fold a second endpoint of this sequent into this one.
            for (std::size_t o = 0; o < c.size(); ++o) {
              if (o == e) continue;
              if (!depth1[pe] || !depth1[static_cast<std::size_t>(c[o])]) continue;
              std::vector<int> c2;
              for (std::size_t z = 0; z < c.size(); ++z)
                if (z != e && z != o) c2.push_back(c[z]);
              c2.push_back(parr_of[{c[o], c[e]}]);
              insert({c2}, out);
            }
            // Contraction: merge two equal client endpoints.
            if (whynot[pe] && e + 1 < c.size() && c[e + 1] == c[e]) {
              std::vector<int> c2 = c;
              c2.erase(c2.begin() + static_cast<std::ptrdiff_t>(e));
              insert({c2}, out);
            }
          }
        }
        if (nc == 2) {
          // Send: one endpoint from each side joins the two components.
          for (int side = 0; side < 2; ++side) {
            const auto& co = comps[static_cast<std::size_t>(side)];
            const auto& cs = comps[static_cast<std::size_t>(1 - side)];
            for (std::size_t oi = 0; oi < co.size(); ++oi) {
              if (!depth1[static_cast<std::size_t>(co[oi])]) continue;
              for (std::size_t si = 0; si < cs.size(); ++si) {
                if (!depth1[static_cast<std::size_t>(cs[si])]) continue;
                std::vector<int> merged;
                for (std::size_t z = 0; z < co.size(); ++z)
                  if (z != oi) merged.push_back(co[z]);
                for (std::size_t z = 0; z < cs.size(); ++z)
                  if (z != si) merged.push_back(cs[z]);
                merged.push_back(tensor_of[{co[oi], cs[si]}]);
                insert({merged}, out);
              }
            }
          }
        }
        if (nc >= 2) {
          // Restriction: join two dually-typed endpoints of distinct
          // components.
          for (std::size_t a = 0; a < nc; ++a)
            for (std::size_t b = 0; b < nc; ++b) {
              if (a == b) continue;
              for (std::size_t xa = 0; xa < comps[a].size(); ++xa)
                for (std::size_t xb = 0; xb < comps[b].size(); ++xb) {
                  if (dual_of[static_cast<std::size_t>(comps[a][xa])] != comps[b][xb])
                    continue;
                  std::vector<std::vector<int>> rest;
                  std::vector<int> merged;
                  for (std::size_t z = 0; z < nc; ++z) {
                    if (z == a || z == b) continue;
                    rest.push_back(comps[z]);
                  }
                  for (std::size_t z = 0; z < comps[a].size(); ++z)
                    if (z != xa) merged.push_back(comps[a][z]);
                  for (std::size_t z = 0; z < comps[b].size(); ++z)
                    if (z != xb) merged.push_back(comps[b][z]);
                  rest.push_back(std::move(merged));
                  insert(std::move(rest), out);
                }
            }
        }

        // Composition with every smaller accumulated judgement.
        if (names >= 1 && names < JudgementSpace::kNameBound) {
          for (std::size_t m = 1; m + names <= JudgementSpace::kNameBound; ++m)
            for (const auto& pk : bucket[m]) {
              auto pc = JudgementSpace::decode(pk);
              auto joined = comps;
              joined.insert(joined.end(), pc.begin(), pc.end());
              insert(std::move(joined), out);
            }
        }
      }

      js.layer_sizes_.push_back(final_layer ? js.acc_.size() - layer_prefix_total()
                                            : cur.size());
      if (!final_layer) layer_done(cur, bucket);
      last_new = std::move(cur);
    }
  }

  std::size_t layer_prefix_total() const {
    std::size_t n = 0;
    for (std::size_t s : js.layer_sizes_) n += s;
    return n;
  }

  void layer_done(const std::vector<JudgementSpace::Key>& fresh,
                  std::vector<std::vector<JudgementSpace::Key>>& bucket) {
    for (const auto& k : fresh) {
      std::size_t n = 0;
      for (char c : k)
        if (c != 0) ++n;
      if (n >= 1 && n < JudgementSpace::kNameBound) bucket[n].push_back(k);
    }
    if (js.layer_sizes_.empty() && !fresh.empty()) js.layer_sizes_.push_back(fresh.size());
  }
};

}  // namespace detail

inline JudgementSpace enumerate_judgements(int max_height) {
  if (max_height < 0) throw std::invalid_argument("height bound must be non-negative");
  JudgementSpace js;
  detail::JudgeEngine engine(js);
  engine.run(max_height);
  return js;
}

// ---------------------------------------------------------------------------
// Sharded property suites: one independent report per seed, workers striped
// over the seed range, results merged in seed order.

struct PropertyReport {
  std::uint64_t seed = 0;
  std::string property;
  bool ok = true;
  std::string detail;
};

template <class F>
inline std::vector<PropertyReport> run_sharded(std::uint64_t first_seed, int count,
                                               int workers, F per_seed) {
  std::vector<PropertyReport> out(static_cast<std::size_t>(std::max(count, 0)));
  if (workers < 1) workers = 1;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers)
        out[static_cast<std::size_t>(i)] = per_seed(first_seed + static_cast<std::uint64_t>(i));
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace ct

#pragma once

// The labelled transition relation over typed states. A state is a typing
// derivation: label payloads and dispose annotations are read off the types,
// and every transition target is re-inferred at the root, so each transition
// carries the target's derivation. A target that fails to re-infer raises
// InternalInvariantViolation: the transition rules must preserve typability,
// and this tripwire is how the test suite would catch a rule transcribed
// wrongly.
//
// Prefixes block: only the head constructor of each parallel component acts.
// Parallel composition interleaves child transitions whose bound label names
// avoid the sibling's free names (guaranteed by construction: binders are
// freshened against every name visible in the state), and synchronizes any
// two children firing dual labels. A restriction lets unrelated labels pass,
// consumes a synchronization on its own pair as an internal move rebuilding
// the target per the communicated shape, and consumes a forwarder label on
// either endpoint by renaming the partner channel.
//
// Type receivers are infinitely branching, so they are not enumerated as
// standalone transitions: they synchronize against a type sender (which
// fixes the received type as the dual of the sent one), or fire explicitly
// through recv_type_step with a caller-supplied witness.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ct/label.hpp"
#include "ct/typing.hpp"

namespace ct {

struct InternalInvariantViolation : std::logic_error {
  explicit InternalInvariantViolation(const std::string& msg)
      : std::logic_error("internal invariant violation: " + msg) {}
};

struct NoSuchTransition : std::runtime_error {
  std::string requested;
  std::vector<std::string> available;

  static std::string compose(const std::string& req,
                             const std::vector<std::string>& avail,
                             const std::vector<std::string>& receivers) {
    std::string m = "no transition labelled `" + req + "`";
    m += "; available: ";
    if (avail.empty()) {
      m += "none";
    } else {
      for (size_t i = 0; i < avail.size(); ++i) {
        if (i) m += ", ";
        m += "`" + avail[i] + "`";
      }
    }
    if (!receivers.empty()) {
      m += "; type receivers at: ";
      for (size_t i = 0; i < receivers.size(); ++i) {
        if (i) m += ", ";
        m += receivers[i];
      }
    }
    return m;
  }

  NoSuchTransition(std::string req, std::vector<std::string> avail,
                   std::vector<std::string> receivers = {})
      : std::runtime_error(compose(req, avail, receivers)),
        requested(std::move(req)),
        available(std::move(avail)) {}
};

// A single transition between typed states. `rules` names every transition
// rule applied in its derivation (axiom, propagation, synchronization and
// elimination steps); `spawn_map` records the renaming applied to the
// server's dependencies when a spawn produced a copy, and is what a
// spawn-consuming restriction turns into its prefix chain.
struct Transition {
  DerivPtr source;
  Label label;
  DerivPtr target;
  std::map<Name, Name> spawn_map;
  std::set<std::string> rules;
};

// Canonical list of transition-rule names, for coverage accounting.
inline const std::vector<std::string>& all_lts_rules() {
  static const std::vector<std::string> r = {
      "close",      "wait",      "send",     "recv",      "inl",
      "inr",        "case-l",    "case-r",   "send-type", "recv-type",
      "link",       "use-acc",   "disp-acc", "spawn-acc", "use-req",
      "spawn-req",  "disp-req",  "par-l",    "par-r",     "sync",
      "res",        "cut-unit",  "cut-pair", "cut-left",  "cut-right",
      "cut-type",   "cut-use",   "cut-dispose", "cut-spawn", "cut-fwd",
      "cut-bwd"};
  return r;
}

namespace detail {

struct RawTrans {
  Label label;
  ProcPtr target;
  std::map<Name, Name> spawn_map;
  std::set<std::string> rules;
};

// A pending type receive: fires only with a witness chosen from outside.
struct TypeOffer {
  Name subj;
  std::function<ProcPtr(const PropPtr&)> build;
  std::set<std::string> rules;
};

struct EnumResult {
  std::vector<RawTrans> trans;
  std::vector<TypeOffer> offers;
};

[[noreturn]] inline void iiv(const std::string& msg) {
  throw InternalInvariantViolation(msg);
}

// Subject type lookup with the shape the axiom requires.
inline PropPtr subject_type(const DerivPtr& d, const Name& x, PropKind want,
                            const char* what) {
  auto t = d->type.type_of(x);
  if (!t) iiv(std::string(what) + " subject " + to_string(x) + " untyped");
  if ((*t)->kind != want)
    iiv(std::string(what) + " subject " + to_string(x) +
        " has unexpected type " + to_string(*t));
  return *t;
}

// Expose a term binder in a label, renaming it apart when it would collide
// with a name visible elsewhere in the state.
inline std::pair<Name, ProcPtr> label_binder(const Name& y,
                                             const ProcPtr& cont,
                                             const NameSet& avoid) {
  if (!avoid.count(y)) return {y, cont};
  NameSet used = avoid;
  NameSet cfn = free_names(cont);
  used.insert(cfn.begin(), cfn.end());
  Name ny = fresh_suffixed(y, used);
  return {ny, rename(cont, {{y, ny}})};
}

// Pair a left and a right child transition firing dual labels. The output
// side always comes first in the pair; if both components expose the same
// bound name the input side is renamed apart.
inline RawTrans make_sync(const RawTrans& lt0, const RawTrans& rt0,
                          const NameSet& avoid) {
  RawTrans lt = lt0, rt = rt0;
  RawTrans& out = is_output_form(lt.label.kind) ? lt : rt;
  RawTrans& in = is_output_form(lt.label.kind) ? rt : lt;
  if (has_bound_name(in.label.kind) &&
      bound_names(out.label).count(in.label.obj)) {
    NameSet used = avoid;
    NameSet f1 = free_names(lt.target), f2 = free_names(rt.target);
    used.insert(f1.begin(), f1.end());
    used.insert(f2.begin(), f2.end());
    used.insert(out.label.obj);
    Name y = in.label.obj;
    Name ny = fresh_suffixed(y, used);
    in.target = rename(in.target, {{y, ny}});
    in.label.obj = ny;
  }
  RawTrans s;
  s.label = sync_l(out.label, in.label);
  s.target = par(lt.target, rt.target);
  s.spawn_map = lt.spawn_map;
  s.spawn_map.insert(rt.spawn_map.begin(), rt.spawn_map.end());
  s.rules = lt.rules;
  s.rules.insert(rt.rules.begin(), rt.rules.end());
  s.rules.insert("sync");
  return s;
}

// Synchronize a type sender with a pending receiver on the other side. The
// receiver's label reports the dual of the sent type (the interface it
// observes), but its scheme is instantiated with the sent witness itself:
// duality commutes with substitution at the same witness, the dual atoms of
// the receiving scheme doing the flipping, so only that choice keeps the
// re-cut dual.
inline RawTrans make_type_sync(const RawTrans& snd, const TypeOffer& off,
                               bool sender_on_left) {
  RawTrans s;
  s.label = sync_l(snd.label, recv_ty_l(off.subj, dual(snd.label.t1)));
  ProcPtr rcv = off.build(snd.label.t1);
  s.target = sender_on_left ? par(snd.target, rcv) : par(rcv, snd.target);
  s.spawn_map = snd.spawn_map;
  s.rules = snd.rules;
  s.rules.insert(off.rules.begin(), off.rules.end());
  s.rules.insert("sync");
  return s;
}

// Rebuild the target of a synchronization consumed at its restriction.
// `bd` is the restriction body's derivation (source side); `t` the body's
// synchronization transition.
inline RawTrans eliminate(const DerivPtr& bd, const RawTrans& t,
                          const Name& a, const Name& b) {
  const Label& out = *t.label.out;
  const Label& in = *t.label.in;
  RawTrans nt;
  nt.label = tau_l();
  nt.spawn_map = t.spawn_map;
  nt.rules = t.rules;
  switch (out.kind) {
    case LabelKind::Close:
      nt.target = t.target;
      nt.rules.insert("cut-unit");
      break;
    case LabelKind::Send:
      nt.target = res(a, b, res(out.obj, in.obj, t.target));
      nt.rules.insert("cut-pair");
      break;
    case LabelKind::InlSel:
      nt.target = res(a, b, t.target);
      nt.rules.insert("cut-left");
      break;
    case LabelKind::InrSel:
      nt.target = res(a, b, t.target);
      nt.rules.insert("cut-right");
      break;
    case LabelKind::SendTy:
      nt.target = res(a, b, t.target);
      nt.rules.insert("cut-type");
      break;
    case LabelKind::UseReq:
      nt.target = res(out.obj, in.obj, t.target);
      nt.rules.insert("cut-use");
      break;
    case LabelKind::DispReq: {
      // The disposed server's dependencies vanish from the target; dispose
      // them explicitly, annotated from the body's typing.
      NameSet before = free_names(bd->process);
      NameSet after = free_names(t.target);
      std::vector<std::pair<Name, PropPtr>> chain;
      for (const Name& z : before) {
        if (z == a || z == b || after.count(z)) continue;
        auto zt = bd->type.type_of(z);
        if (!zt)
          iiv("disposed dependency " + to_string(z) + " missing from typing");
        if ((*zt)->kind != PropKind::WhyNot)
          iiv("disposed dependency " + to_string(z) + " not client-typed");
        chain.emplace_back(z, (*zt)->left);
      }
      ProcPtr q = t.target;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        q = client_dispose(it->second, it->first, q);
      nt.target = q;
      nt.rules.insert("cut-dispose");
      break;
    }
    case LabelKind::SpawnReq: {
      // The copy's dependencies are fresh in the target; spawn them from
      // their originals, pairing each with its recorded copy.
      ProcPtr q = res(a, b, res(out.obj, in.obj, t.target));
      for (auto it = t.spawn_map.rbegin(); it != t.spawn_map.rend(); ++it)
        q = client_spawn(it->first, it->second, q);
      nt.target = q;
      nt.rules.insert("cut-spawn");
      break;
    }
    default:
      iiv("unexpected synchronization at a restriction: " +
          to_string(t.label));
  }
  return nt;
}

// Enumerate the transitions and pending type receives of the state rooted
// at `d`. `avoid` holds every name visible from outside this subterm (free
// names of the whole state, restriction binders crossed, sibling free
// names); label binders are freshened against it.
inline EnumResult enumerate_rec(const DerivPtr& d, const NameSet& avoid) {
  EnumResult r;
  const ProcPtr& p = d->process;
  switch (p->kind) {
    case ProcKind::Nil:
      break;

    case ProcKind::Close:
      r.trans.push_back({close_l(p->a), nil(), {}, {"close"}});
      break;

    case ProcKind::Wait:
      r.trans.push_back({wait_l(p->a), p->p, {}, {"wait"}});
      break;

    case ProcKind::Send: {
      PropPtr t = subject_type(d, p->a, PropKind::Tensor, "send");
      auto [y, cont] = label_binder(p->b, p->p, avoid);
      r.trans.push_back(
          {send_l(p->a, y, t->left, t->right), cont, {}, {"send"}});
      break;
    }

    case ProcKind::Recv: {
      PropPtr t = subject_type(d, p->a, PropKind::Par, "receive");
      auto [y, cont] = label_binder(p->b, p->p, avoid);
      r.trans.push_back(
          {recv_l(p->a, y, t->left, t->right), cont, {}, {"recv"}});
      break;
    }

    case ProcKind::InL: {
      PropPtr t = subject_type(d, p->a, PropKind::Plus, "select");
      r.trans.push_back({inl_sel_l(p->a, t), p->p, {}, {"inl"}});
      break;
    }

    case ProcKind::InR: {
      PropPtr t = subject_type(d, p->a, PropKind::Plus, "select");
      r.trans.push_back({inr_sel_l(p->a, t), p->p, {}, {"inr"}});
      break;
    }

    case ProcKind::Case: {
      PropPtr t = subject_type(d, p->a, PropKind::With, "offer");
      r.trans.push_back({inl_off_l(p->a, t), p->p, {}, {"case-l"}});
      r.trans.push_back({inr_off_l(p->a, t), p->q, {}, {"case-r"}});
      break;
    }

    case ProcKind::SendType:
      r.trans.push_back({send_ty_l(p->a, p->t1), p->p, {}, {"send-type"}});
      break;

    case ProcKind::RecvType: {
      Name x = p->a, v = p->tv;
      ProcPtr body = p->p;
      r.offers.push_back({x,
                          [v, body](const PropPtr& w) {
                            return subst_type(body, v, w);
                          },
                          {"recv-type"}});
      break;
    }

    case ProcKind::Link:
      r.trans.push_back({link_l(p->a, p->b, p->t1), nil(), {}, {"link"}});
      break;

    case ProcKind::Server: {
      PropPtr t = subject_type(d, p->a, PropKind::OfCourse, "server");
      const PropPtr& obj = t->left;
      auto [y, body] = label_binder(p->b, p->p, avoid);
      r.trans.push_back({use_acc_l(p->a, y, obj), body, {}, {"use-acc"}});
      r.trans.push_back({disp_acc_l(p->a, obj), nil(), {}, {"disp-acc"}});
      // Spawn: a copy of the server whose subject and free dependencies are
      // renamed to fresh primed names; the object binder is shared.
      NameSet used = avoid;
      NameSet bfn = free_names(p->p);
      used.insert(bfn.begin(), bfn.end());
      used.insert(p->a);
      Name x2 = fresh_primed(p->a, used);
      used.insert(x2);
      std::map<Name, Name> m;
      for (const Name& z : bfn) {
        if (z == p->b) continue;
        Name z2 = fresh_primed(z, used);
        used.insert(z2);
        m.emplace(z, z2);
      }
      ProcPtr copy = m.empty() ? p->p : rename(p->p, m);
      r.trans.push_back({spawn_acc_l(p->a, x2, obj),
                         par(server(p->a, p->b, p->p), server(x2, p->b, copy)),
                         m,
                         {"spawn-acc"}});
      break;
    }

    case ProcKind::ClientUse: {
      PropPtr t = subject_type(d, p->a, PropKind::WhyNot, "use");
      auto [y, cont] = label_binder(p->b, p->p, avoid);
      r.trans.push_back({use_req_l(p->a, y, t->left), cont, {}, {"use-req"}});
      break;
    }

    case ProcKind::ClientSpawn: {
      PropPtr t = subject_type(d, p->a, PropKind::WhyNot, "spawn");
      auto [y, cont] = label_binder(p->b, p->p, avoid);
      r.trans.push_back(
          {spawn_req_l(p->a, y, t->left), cont, {}, {"spawn-req"}});
      break;
    }

    case ProcKind::ClientDispose:
      r.trans.push_back({disp_req_l(p->a, p->t1), p->p, {}, {"disp-req"}});
      break;

    case ProcKind::Par: {
      const ProcPtr& lp = p->p;
      const ProcPtr& rp = p->q;
      NameSet lfn = free_names(lp), rfn = free_names(rp);
      NameSet avl = avoid, avr = avoid;
      avl.insert(rfn.begin(), rfn.end());
      avr.insert(lfn.begin(), lfn.end());
      EnumResult L = enumerate_rec(d->premises[0], avl);
      EnumResult R = enumerate_rec(d->premises[1], avr);
      for (const auto& t : L.trans) {
        for (const Name& n : bound_names(t.label))
          if (rfn.count(n))
            iiv("bound label name " + to_string(n) +
                " collides with a sibling's free name");
        RawTrans nt{t.label, par(t.target, rp), t.spawn_map, t.rules};
        nt.rules.insert("par-l");
        r.trans.push_back(std::move(nt));
      }
      for (const auto& t : R.trans) {
        for (const Name& n : bound_names(t.label))
          if (lfn.count(n))
            iiv("bound label name " + to_string(n) +
                " collides with a sibling's free name");
        RawTrans nt{t.label, par(lp, t.target), t.spawn_map, t.rules};
        nt.rules.insert("par-r");
        r.trans.push_back(std::move(nt));
      }
      for (const auto& lt : L.trans)
        for (const auto& rt : R.trans)
          if (label_dual(lt.label, rt.label))
            r.trans.push_back(make_sync(lt, rt, avoid));
      for (const auto& lt : L.trans)
        if (lt.label.kind == LabelKind::SendTy)
          for (const auto& ro : R.offers)
            r.trans.push_back(make_type_sync(lt, ro, true));
      for (const auto& rt : R.trans)
        if (rt.label.kind == LabelKind::SendTy)
          for (const auto& lo : L.offers)
            r.trans.push_back(make_type_sync(rt, lo, false));
      for (const auto& o : L.offers) {
        auto build = o.build;
        std::set<std::string> rules = o.rules;
        rules.insert("par-l");
        r.offers.push_back({o.subj,
                            [build, rp](const PropPtr& w) {
                              return par(build(w), rp);
                            },
                            std::move(rules)});
      }
      for (const auto& o : R.offers) {
        auto build = o.build;
        std::set<std::string> rules = o.rules;
        rules.insert("par-r");
        r.offers.push_back({o.subj,
                            [build, lp](const PropPtr& w) {
                              return par(lp, build(w));
                            },
                            std::move(rules)});
      }
      break;
    }

    case ProcKind::Res: {
      const Name a = p->a, b = p->b;
      NameSet av2 = avoid;
      av2.insert(a);
      av2.insert(b);
      const DerivPtr& bd = d->premises[0];
      EnumResult B = enumerate_rec(bd, av2);
      for (const auto& t : B.trans) {
        if (t.label.kind == LabelKind::Sync) {
          NameSet ss = subjects(t.label);
          if (ss == NameSet{a, b}) {
            r.trans.push_back(eliminate(bd, t, a, b));
            continue;
          }
        } else if (t.label.kind == LabelKind::Link) {
          const Name& x = t.label.subj;
          const Name& y = t.label.obj;
          bool hit_first = (x == a || x == b);
          bool hit_second = (y == a || y == b);
          if (hit_first && hit_second)
            iiv("forwarder endpoints both bound by one restriction");
          if (hit_second) {
            // The partner channel takes over the forwarder's first name.
            Name partner = (y == a) ? b : a;
            RawTrans nt{tau_l(), rename(t.target, {{partner, x}}),
                        t.spawn_map, t.rules};
            nt.rules.insert("cut-fwd");
            r.trans.push_back(std::move(nt));
            continue;
          }
          if (hit_first) {
            Name partner = (x == a) ? b : a;
            RawTrans nt{tau_l(), rename(t.target, {{partner, y}}),
                        t.spawn_map, t.rules};
            nt.rules.insert("cut-bwd");
            r.trans.push_back(std::move(nt));
            continue;
          }
        }
        NameSet ln = label_names(t.label);
        if (!ln.count(a) && !ln.count(b)) {
          RawTrans nt{t.label, res(a, b, t.target), t.spawn_map, t.rules};
          nt.rules.insert("res");
          r.trans.push_back(std::move(nt));
        }
        // Otherwise the transition is blocked at this restriction.
      }
      for (const auto& o : B.offers) {
        if (o.subj == a || o.subj == b) continue;
        auto build = o.build;
        std::set<std::string> rules = o.rules;
        rules.insert("res");
        r.offers.push_back({o.subj,
                            [build, a, b](const PropPtr& w) {
                              return res(a, b, build(w));
                            },
                            std::move(rules)});
      }
      break;
    }
  }
  return r;
}

// Re-infer a transition target and assemble the public record.
inline Transition finish(const DerivPtr& src, const RawTrans& t) {
  DerivPtr tgt;
  try {
    tgt = infer(t.target);
  } catch (const TypeError& e) {
    iiv("transition target `" + to_string(t.target) +
        "` failed to re-infer after `" + to_string(t.label) +
        "`: " + e.what());
  }
  return {src, t.label, tgt, t.spawn_map, t.rules};
}

}  // namespace detail

// All transitions of a state, in a fixed order: each subterm's own actions
// first (in constructor order), then left-component propagations, right
// ones, and synchronizations pairing left transitions major.
inline std::vector<Transition> transitions(const DerivPtr& d) {
  detail::EnumResult er = detail::enumerate_rec(d, free_names(d->process));
  std::vector<Transition> out;
  out.reserve(er.trans.size());
  for (const auto& t : er.trans) out.push_back(detail::finish(d, t));
  return out;
}

// Names with a pending type receive (at most one per name).
inline std::vector<Name> type_receivers(const DerivPtr& d) {
  detail::EnumResult er = detail::enumerate_rec(d, free_names(d->process));
  std::vector<Name> out;
  out.reserve(er.offers.size());
  for (const auto& o : er.offers) out.push_back(o.subj);
  return out;
}

// The first transition whose label matches `l` up to alpha-equivalence.
// The enumeration order makes this the leftmost redex on a tie.
inline Transition step(const DerivPtr& d, const Label& l) {
  detail::EnumResult er = detail::enumerate_rec(d, free_names(d->process));
  for (const auto& t : er.trans)
    if (alpha_eq(t.label, l)) return detail::finish(d, t);
  std::vector<std::string> avail;
  avail.reserve(er.trans.size());
  for (const auto& t : er.trans) avail.push_back(to_string(t.label));
  std::vector<std::string> rcv;
  for (const auto& o : er.offers) rcv.push_back(to_string(o.subj));
  throw NoSuchTransition(to_string(l), std::move(avail), std::move(rcv));
}

// Fire the pending type receive at `x` with the given witness type.
inline Transition recv_type_step(const DerivPtr& d, const Name& x,
                                 const PropPtr& witness) {
  detail::EnumResult er = detail::enumerate_rec(d, free_names(d->process));
  for (const auto& o : er.offers) {
    if (o.subj != x) continue;
    detail::RawTrans t{recv_ty_l(x, witness), o.build(witness), {}, o.rules};
    return detail::finish(d, t);
  }
  std::vector<std::string> avail;
  for (const auto& t : er.trans) avail.push_back(to_string(t.label));
  std::vector<std::string> rcv;
  for (const auto& o : er.offers) rcv.push_back(to_string(o.subj));
  throw NoSuchTransition(to_string(recv_ty_l(x, witness)), std::move(avail),
                         std::move(rcv));
}

}  // namespace ct

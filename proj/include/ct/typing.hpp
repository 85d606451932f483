#pragma once

// Type synthesis for process terms. Every well-typed process determines a
// unique derivation; infer builds it bottom-up and throws a TypeError with
// the offending subterm's path otherwise. validate is an independent audit
// of an existing derivation tree: it rechecks every rule application locally
// without re-running synthesis.
//
// A hypersequent collects the name-disjoint sequents of independent
// processes composed in one term. Rules that act on a single endpoint work
// inside one sequent; composition merges hypersequents; a restriction joins
// two dually-typed sequents; a send joins two sequents of its continuation.
// Prefix rules admit no ambient sequents besides the ones they mention.

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ct/hypersequent.hpp"
#include "ct/name.hpp"
#include "ct/process.hpp"
#include "ct/proposition.hpp"

namespace ct {

enum class Rule {
  Ax, Cut, Mix0, Mix, One, Bot, Tensor, Parr, Plus1, Plus2, With,
  Exists, Forall, Bang, Quest, Weaken, Contract,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Ax: return "ax";
    case Rule::Cut: return "cut";
    case Rule::Mix0: return "mix0";
    case Rule::Mix: return "mix";
    case Rule::One: return "one";
    case Rule::Bot: return "bot";
    case Rule::Tensor: return "tensor";
    case Rule::Parr: return "parr";
    case Rule::Plus1: return "plus1";
    case Rule::Plus2: return "plus2";
    case Rule::With: return "with";
    case Rule::Exists: return "exists";
    case Rule::Forall: return "forall";
    case Rule::Bang: return "bang";
    case Rule::Quest: return "quest";
    case Rule::Weaken: return "weaken";
    case Rule::Contract: return "contract";
  }
  return "?";
}

inline Rule rule_of_kind(ProcKind k) {
  switch (k) {
    case ProcKind::Nil: return Rule::Mix0;
    case ProcKind::Par: return Rule::Mix;
    case ProcKind::Res: return Rule::Cut;
    case ProcKind::Send: return Rule::Tensor;
    case ProcKind::Recv: return Rule::Parr;
    case ProcKind::Close: return Rule::One;
    case ProcKind::Wait: return Rule::Bot;
    case ProcKind::InL: return Rule::Plus1;
    case ProcKind::InR: return Rule::Plus2;
    case ProcKind::Case: return Rule::With;
    case ProcKind::SendType: return Rule::Exists;
    case ProcKind::RecvType: return Rule::Forall;
    case ProcKind::Link: return Rule::Ax;
    case ProcKind::Server: return Rule::Bang;
    case ProcKind::ClientUse: return Rule::Quest;
    case ProcKind::ClientSpawn: return Rule::Contract;
    case ProcKind::ClientDispose: return Rule::Weaken;
  }
  throw std::logic_error("rule_of_kind: bad kind");
}

enum class ErrClass {
  SubjectMissing,         // an endpoint the rule consumes is not in context
  UnboundName,            // a received type variable would escape its scope
  NameClash,              // an endpoint introduced twice
  NotDual,                // restriction joins non-dual endpoints
  NotInDistinctSequents,  // endpoints that must be independent are not
  BranchMismatch,         // case branches type in different contexts
  ContractionMismatch,    // spawn copies disagree or are not client-typed
  NonClientContext,       // server body captures a non-client endpoint
  AmbientContext,         // a prefix rule saw sequents it cannot carry
  AnnotationMismatch,     // a type annotation contradicts the synthesis
  TypeMismatch,           // synthesized type differs from the requested one
};

inline const char* err_class_name(ErrClass c) {
  switch (c) {
    case ErrClass::SubjectMissing: return "subject-missing";
    case ErrClass::UnboundName: return "unbound-name";
    case ErrClass::NameClash: return "name-clash";
    case ErrClass::NotDual: return "not-dual";
    case ErrClass::NotInDistinctSequents: return "not-in-distinct-sequents";
    case ErrClass::BranchMismatch: return "branch-mismatch";
    case ErrClass::ContractionMismatch: return "contraction-mismatch";
    case ErrClass::NonClientContext: return "non-client-context";
    case ErrClass::AmbientContext: return "ambient-context";
    case ErrClass::AnnotationMismatch: return "annotation-mismatch";
    case ErrClass::TypeMismatch: return "type-mismatch";
  }
  return "?";
}

inline std::string path_str(const std::vector<int>& path) {
  if (path.empty()) return "(root)";
  std::string s;
  for (int i : path) s += "." + std::to_string(i);
  return s;
}

struct TypeError : std::runtime_error {
  ErrClass cls;
  std::vector<int> path;  // child indices from the root to the failing node
  TypeError(ErrClass c, std::vector<int> p, const std::string& msg)
      : std::runtime_error(std::string(err_class_name(c)) + " at " +
                           path_str(p) + ": " + msg),
        cls(c),
        path(std::move(p)) {}
};

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  Rule rule;
  ProcPtr process;
  Hypersequent type;
  std::vector<DerivPtr> premises;
};

inline DerivPtr deriv(Rule r, ProcPtr p, Hypersequent h,
                      std::vector<DerivPtr> prem = {}) {
  return std::make_shared<Derivation>(
      Derivation{r, std::move(p), std::move(h), std::move(prem)});
}

inline int deriv_size(const DerivPtr& d) {
  int n = 1;
  for (const auto& pr : d->premises) n += deriv_size(pr);
  return n;
}

namespace detail {

inline Hypersequent single(Sequent s) {
  return Hypersequent::make({std::move(s)});
}

inline DerivPtr infer_rec(const ProcPtr& p, std::vector<int>& path) {
  auto err = [&](ErrClass c, const std::string& msg) -> TypeError {
    return TypeError(c, path, msg);
  };
  auto child = [&](int i, const ProcPtr& sub) {
    path.push_back(i);
    DerivPtr d = infer_rec(sub, path);
    path.pop_back();
    return d;
  };
  switch (p->kind) {
    case ProcKind::Nil:
      return deriv(Rule::Mix0, p, Hypersequent{});

    case ProcKind::Par: {
      DerivPtr dl = child(0, p->p);
      DerivPtr dr = child(1, p->q);
      auto merged = hs_merge(dl->type, dr->type);
      if (!merged) {
        NameSet ln = dl->type.names();
        for (const auto& n : dr->type.names())
          if (ln.count(n))
            throw err(ErrClass::NameClash,
                      "'" + to_string(n) + "' is used by both sides of the composition");
        throw err(ErrClass::NameClash, "composition reuses an endpoint");
      }
      return deriv(Rule::Mix, p, *merged, {dl, dr});
    }

    case ProcKind::Close:
      return deriv(Rule::One, p, single({{p->a, one()}}));

    case ProcKind::Wait: {
      DerivPtr d = child(0, p->p);
      if (d->type.sequents.size() > 1)
        throw err(ErrClass::AmbientContext,
                  "the continuation of 'wait " + to_string(p->a) +
                      "' must type in a single sequent");
      if (d->type.type_of(p->a))
        throw err(ErrClass::NameClash,
                  "'" + to_string(p->a) + "' is already used in the continuation");
      Sequent s = d->type.sequents.empty() ? Sequent{} : d->type.sequents[0];
      s[p->a] = bot();
      return deriv(Rule::Bot, p, single(std::move(s)), {d});
    }

    case ProcKind::Send: {
      if (p->a == p->b)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' is shadowed by its own object");
      DerivPtr d = child(0, p->p);
      const Sequent* sy = d->type.find(p->b);
      if (!sy)
        throw err(ErrClass::SubjectMissing,
                  "object '" + to_string(p->b) + "' has no type in the continuation");
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      if (sy == sx)
        throw err(ErrClass::NotInDistinctSequents,
                  "'" + to_string(p->b) + "' and '" + to_string(p->a) +
                      "' must be independent to be sent together");
      if (d->type.sequents.size() != 2)
        throw err(ErrClass::AmbientContext,
                  "a send admits exactly the two sequents of its object and subject");
      Sequent s;
      for (const auto& [n, t] : *sy)
        if (n != p->b) s.emplace(n, t);
      for (const auto& [n, t] : *sx)
        if (n != p->a) s.emplace(n, t);
      s[p->a] = tensor(sy->at(p->b), sx->at(p->a));
      return deriv(Rule::Tensor, p, single(std::move(s)), {d});
    }

    case ProcKind::Recv: {
      if (p->a == p->b)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' is shadowed by its own object");
      DerivPtr d = child(0, p->p);
      const Sequent* sy = d->type.find(p->b);
      if (!sy)
        throw err(ErrClass::SubjectMissing,
                  "object '" + to_string(p->b) + "' has no type in the continuation");
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      if (sy != sx)
        throw err(ErrClass::AmbientContext,
                  "a receive needs '" + to_string(p->b) + "' and '" + to_string(p->a) +
                      "' in one sequent");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a receive admits exactly the sequent of its subject");
      Sequent s = *sx;
      PropPtr a_ = s.at(p->b);
      PropPtr b_ = s.at(p->a);
      s.erase(p->b);
      s[p->a] = parr(a_, b_);
      return deriv(Rule::Parr, p, single(std::move(s)), {d});
    }

    case ProcKind::InL:
    case ProcKind::InR: {
      DerivPtr d = child(0, p->p);
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a selection admits exactly the sequent of its subject");
      Sequent s = *sx;
      PropPtr cur = s.at(p->a);
      s[p->a] = p->kind == ProcKind::InL ? plus(cur, p->t1) : plus(p->t1, cur);
      return deriv(p->kind == ProcKind::InL ? Rule::Plus1 : Rule::Plus2, p,
                   single(std::move(s)), {d});
    }

    case ProcKind::Case: {
      DerivPtr dl = child(0, p->p);
      DerivPtr dr = child(1, p->q);
      auto branch_ctx = [&](const DerivPtr& d, const char* side) {
        const Sequent* sx = d->type.find(p->a);
        if (!sx)
          throw err(ErrClass::SubjectMissing,
                    "subject '" + to_string(p->a) + "' has no type in the " +
                        side + " branch");
        if (d->type.sequents.size() != 1)
          throw err(ErrClass::AmbientContext,
                    "a case admits exactly the sequent of its subject");
        return *sx;
      };
      Sequent sl = branch_ctx(dl, "left");
      Sequent sr = branch_ctx(dr, "right");
      PropPtr a_ = sl.at(p->a);
      PropPtr b_ = sr.at(p->a);
      sl.erase(p->a);
      sr.erase(p->a);
      if (!sequent_equal(sl, sr))
        throw err(ErrClass::BranchMismatch,
                  "the branches of 'case " + to_string(p->a) +
                      "' type in different contexts");
      Sequent s = sl;
      s[p->a] = with(a_, b_);
      return deriv(Rule::With, p, single(std::move(s)), {dl, dr});
    }

    case ProcKind::SendType: {
      DerivPtr d = child(0, p->p);
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a type send admits exactly the sequent of its subject");
      PropPtr expected = subst(p->t2, p->tv, p->t1);
      if (!alpha_eq(sx->at(p->a), expected))
        throw err(ErrClass::AnnotationMismatch,
                  "'" + to_string(p->a) + "' continues at " +
                      to_string(sx->at(p->a)) + " but the scheme instance is " +
                      to_string(expected));
      Sequent s = *sx;
      s[p->a] = exists(p->tv, p->t2);
      return deriv(Rule::Exists, p, single(std::move(s)), {d});
    }

    case ProcKind::RecvType: {
      DerivPtr d = child(0, p->p);
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a type receive admits exactly the sequent of its subject");
      for (const auto& [n, t] : *sx)
        if (n != p->a && ftv(t).count(p->tv))
          throw err(ErrClass::UnboundName,
                    "type variable '" + to_string(p->tv) + "' would escape through '" +
                        to_string(n) + "'");
      Sequent s = *sx;
      s[p->a] = forall(p->tv, s.at(p->a));
      return deriv(Rule::Forall, p, single(std::move(s)), {d});
    }

    case ProcKind::Link: {
      if (p->a == p->b)
        throw err(ErrClass::NameClash, "a forwarder needs two distinct endpoints");
      Sequent s;
      s.emplace(p->a, dual(p->t1));
      s.emplace(p->b, p->t1);
      return deriv(Rule::Ax, p, single(std::move(s)));
    }

    case ProcKind::Res: {
      if (p->a == p->b)
        throw err(ErrClass::NameClash, "a restriction binds two distinct endpoints");
      DerivPtr d = child(0, p->p);
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "'" + to_string(p->a) + "' has no type under the restriction");
      const Sequent* sy = d->type.find(p->b);
      if (!sy)
        throw err(ErrClass::SubjectMissing,
                  "'" + to_string(p->b) + "' has no type under the restriction");
      if (sx == sy)
        throw err(ErrClass::NotInDistinctSequents,
                  "'" + to_string(p->a) + "' and '" + to_string(p->b) +
                      "' must be independent to be joined");
      PropPtr ta = sx->at(p->a);
      PropPtr tb = sy->at(p->b);
      if (!alpha_eq(dual(ta), tb))
        throw err(ErrClass::NotDual, "'" + to_string(p->a) + "' : " + to_string(ta) +
                                         " and '" + to_string(p->b) + "' : " +
                                         to_string(tb) + " are not dual");
      std::vector<Sequent> out;
      Sequent merged;
      for (const auto& seq : d->type.sequents) {
        if (&seq == sx || &seq == sy) continue;
        out.push_back(seq);
      }
      for (const auto& [n, t] : *sx)
        if (n != p->a) merged.emplace(n, t);
      for (const auto& [n, t] : *sy)
        if (n != p->b) merged.emplace(n, t);
      out.push_back(std::move(merged));
      return deriv(Rule::Cut, p, Hypersequent::make(std::move(out)), {d});
    }

    case ProcKind::Server: {
      DerivPtr d = child(0, p->p);
      const Sequent* so = d->type.find(p->b);
      if (!so)
        throw err(ErrClass::SubjectMissing,
                  "object '" + to_string(p->b) + "' has no type in the body");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a server admits exactly the sequent of its body");
      Sequent s = *so;
      PropPtr a_ = s.at(p->b);
      s.erase(p->b);
      if (!is_client_context(s)) {
        Name bad;
        for (const auto& [n, t] : s)
          if (t->kind != PropKind::WhyNot) {
            bad = n;
            break;
          }
        throw err(ErrClass::NonClientContext,
                  "server body captures '" + to_string(bad) + "', which is not client-typed");
      }
      if (s.count(p->a))
        throw err(ErrClass::NameClash,
                  "'" + to_string(p->a) + "' is already used in the body");
      s[p->a] = of_course(a_);
      return deriv(Rule::Bang, p, single(std::move(s)), {d});
    }

    case ProcKind::ClientUse: {
      DerivPtr d = child(0, p->p);
      const Sequent* so = d->type.find(p->b);
      if (!so)
        throw err(ErrClass::SubjectMissing,
                  "object '" + to_string(p->b) + "' has no type in the continuation");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a client use admits exactly the sequent of its object");
      Sequent s = *so;
      PropPtr a_ = s.at(p->b);
      s.erase(p->b);
      if (s.count(p->a))
        throw err(ErrClass::NameClash,
                  "'" + to_string(p->a) + "' is already used in the continuation");
      s[p->a] = why_not(a_);
      return deriv(Rule::Quest, p, single(std::move(s)), {d});
    }

    case ProcKind::ClientSpawn: {
      if (p->a == p->b)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' is shadowed by its own copy");
      DerivPtr d = child(0, p->p);
      const Sequent* sx = d->type.find(p->a);
      if (!sx)
        throw err(ErrClass::SubjectMissing,
                  "subject '" + to_string(p->a) + "' has no type in the continuation");
      const Sequent* sc = d->type.find(p->b);
      if (!sc)
        throw err(ErrClass::SubjectMissing,
                  "copy '" + to_string(p->b) + "' has no type in the continuation");
      if (sx != sc)
        throw err(ErrClass::AmbientContext,
                  "a spawn needs '" + to_string(p->a) + "' and '" + to_string(p->b) +
                      "' in one sequent");
      if (d->type.sequents.size() != 1)
        throw err(ErrClass::AmbientContext,
                  "a spawn admits exactly the sequent of its subject");
      PropPtr tx = sx->at(p->a);
      PropPtr tc = sx->at(p->b);
      if (tx->kind != PropKind::WhyNot || tc->kind != PropKind::WhyNot)
        throw err(ErrClass::ContractionMismatch,
                  "spawn endpoints must be client-typed; got '" + to_string(p->a) +
                      "' : " + to_string(tx) + " and '" + to_string(p->b) + "' : " +
                      to_string(tc));
      if (!alpha_eq(tx, tc))
        throw err(ErrClass::ContractionMismatch,
                  "spawn copies disagree: '" + to_string(p->a) + "' : " + to_string(tx) +
                      " vs '" + to_string(p->b) + "' : " + to_string(tc));
      Sequent s = *sx;
      s.erase(p->b);
      return deriv(Rule::Contract, p, single(std::move(s)), {d});
    }

    case ProcKind::ClientDispose: {
      DerivPtr d = child(0, p->p);
      if (d->type.sequents.size() > 1)
        throw err(ErrClass::AmbientContext,
                  "the continuation of a dispose must type in a single sequent");
      if (d->type.type_of(p->a))
        throw err(ErrClass::NameClash,
                  "'" + to_string(p->a) + "' is already used in the continuation");
      Sequent s = d->type.sequents.empty() ? Sequent{} : d->type.sequents[0];
      s[p->a] = why_not(p->t1);
      return deriv(Rule::Weaken, p, single(std::move(s)), {d});
    }
  }
  throw std::logic_error("infer: bad kind");
}

}  // namespace detail

inline DerivPtr infer(const ProcPtr& p) {
  std::vector<int> path;
  return detail::infer_rec(p, path);
}

// Synthesize and compare against a requested type.
inline DerivPtr check(const ProcPtr& p, const Hypersequent& expected) {
  DerivPtr d = infer(p);
  if (!hs_equal(d->type, expected))
    throw TypeError(ErrClass::TypeMismatch, {},
                    "synthesized " + to_string(d->type) + " but expected " +
                        to_string(expected));
  return d;
}

// ---------------------------------------------------------------------------
// Independent audit of a derivation tree. Checks each node locally: the rule
// tag matches the term constructor, premise processes are the term's own
// children, the stated conclusion follows from the stated premises, and the
// side conditions hold. Returns an explanation for the first defect found.

namespace detail {

inline std::optional<std::string> validate_rec(const DerivPtr& d) {
  const ProcPtr& p = d->process;
  auto bad = [&](const std::string& why) {
    return std::optional<std::string>("rule " + std::string(rule_name(d->rule)) +
                                      " on '" + to_string(p) + "': " + why);
  };
  if (rule_of_kind(p->kind) != d->rule) return bad("rule does not fit the term");
  size_t want = 0;
  switch (d->rule) {
    case Rule::Ax:
    case Rule::Mix0:
    case Rule::One: want = 0; break;
    case Rule::Mix:
    case Rule::With: want = 2; break;
    default: want = 1; break;
  }
  if (d->premises.size() != want) return bad("wrong number of premises");
  if (want >= 1 && to_string(d->premises[0]->process) != to_string(p->p))
    return bad("first premise is not the term's child");
  if (want == 2 && to_string(d->premises[1]->process) != to_string(p->q))
    return bad("second premise is not the term's child");

  const Hypersequent& c = d->type;
  auto prem = [&](size_t i) -> const Hypersequent& { return d->premises[i]->type; };
  auto conclusion_is = [&](const Hypersequent& h) -> std::optional<std::string> {
    if (!hs_equal(c, h))
      return bad("conclusion is " + to_string(c) + " but the rule gives " + to_string(h));
    return std::nullopt;
  };

  switch (d->rule) {
    case Rule::Mix0:
      if (auto e = conclusion_is(Hypersequent{})) return e;
      break;
    case Rule::One:
      if (auto e = conclusion_is(single({{p->a, one()}}))) return e;
      break;
    case Rule::Ax: {
      if (p->a == p->b) return bad("forwarder endpoints coincide");
      Sequent s;
      s.emplace(p->a, dual(p->t1));
      s.emplace(p->b, p->t1);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Mix: {
      auto m = hs_merge(prem(0), prem(1));
      if (!m) return bad("the sides of the composition share an endpoint");
      if (auto e = conclusion_is(*m)) return e;
      break;
    }
    case Rule::Bot: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() > 1) return bad("premise carries ambient sequents");
      if (h.type_of(p->a)) return bad("endpoint reintroduced over its premise");
      Sequent s = h.sequents.empty() ? Sequent{} : h.sequents[0];
      s[p->a] = bot();
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Weaken: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() > 1) return bad("premise carries ambient sequents");
      if (h.type_of(p->a)) return bad("endpoint reintroduced over its premise");
      Sequent s = h.sequents.empty() ? Sequent{} : h.sequents[0];
      s[p->a] = why_not(p->t1);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Tensor: {
      const Hypersequent& h = prem(0);
      if (p->a == p->b) return bad("subject shadowed by its own object");
      if (h.sequents.size() != 2) return bad("premise must be exactly two sequents");
      const Sequent* sy = h.find(p->b);
      const Sequent* sx = h.find(p->a);
      if (!sy || !sx) return bad("object or subject missing from the premise");
      if (sy == sx) return bad("object and subject share a sequent");
      Sequent s;
      for (const auto& [n, t] : *sy)
        if (n != p->b) s.emplace(n, t);
      for (const auto& [n, t] : *sx)
        if (n != p->a) s.emplace(n, t);
      s[p->a] = tensor(sy->at(p->b), sx->at(p->a));
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Parr: {
      const Hypersequent& h = prem(0);
      if (p->a == p->b) return bad("subject shadowed by its own object");
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->a);
      if (!s0 || !s0->count(p->b)) return bad("object or subject missing from the premise");
      Sequent s = *s0;
      PropPtr a_ = s.at(p->b);
      PropPtr b_ = s.at(p->a);
      s.erase(p->b);
      s[p->a] = parr(a_, b_);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Plus1:
    case Rule::Plus2: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->a);
      if (!s0) return bad("subject missing from the premise");
      Sequent s = *s0;
      PropPtr cur = s.at(p->a);
      s[p->a] = d->rule == Rule::Plus1 ? plus(cur, p->t1) : plus(p->t1, cur);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::With: {
      const Hypersequent& hl = prem(0);
      const Hypersequent& hr = prem(1);
      if (hl.sequents.size() != 1 || hr.sequents.size() != 1)
        return bad("each branch premise must be one sequent");
      if (!hl.type_of(p->a) || !hr.type_of(p->a))
        return bad("subject missing from a branch premise");
      Sequent sl = hl.sequents[0];
      Sequent sr = hr.sequents[0];
      PropPtr a_ = sl.at(p->a);
      PropPtr b_ = sr.at(p->a);
      sl.erase(p->a);
      sr.erase(p->a);
      if (!sequent_equal(sl, sr)) return bad("branch contexts differ");
      sl[p->a] = with(a_, b_);
      if (auto e = conclusion_is(single(std::move(sl)))) return e;
      break;
    }
    case Rule::Exists: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->a);
      if (!s0) return bad("subject missing from the premise");
      if (!alpha_eq(s0->at(p->a), subst(p->t2, p->tv, p->t1)))
        return bad("premise type is not the scheme instance");
      Sequent s = *s0;
      s[p->a] = exists(p->tv, p->t2);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Forall: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->a);
      if (!s0) return bad("subject missing from the premise");
      for (const auto& [n, t] : *s0)
        if (n != p->a && ftv(t).count(p->tv))
          return bad("received type variable escapes through '" + to_string(n) + "'");
      Sequent s = *s0;
      s[p->a] = forall(p->tv, s.at(p->a));
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Cut: {
      const Hypersequent& h = prem(0);
      if (p->a == p->b) return bad("restriction endpoints coincide");
      const Sequent* sx = h.find(p->a);
      const Sequent* sy = h.find(p->b);
      if (!sx || !sy) return bad("a restricted endpoint is missing from the premise");
      if (sx == sy) return bad("restricted endpoints share a sequent");
      if (!alpha_eq(dual(sx->at(p->a)), sy->at(p->b)))
        return bad("restricted endpoints are not dual");
      std::vector<Sequent> out;
      Sequent merged;
      for (const auto& seq : h.sequents) {
        if (&seq == sx || &seq == sy) continue;
        out.push_back(seq);
      }
      for (const auto& [n, t] : *sx)
        if (n != p->a) merged.emplace(n, t);
      for (const auto& [n, t] : *sy)
        if (n != p->b) merged.emplace(n, t);
      out.push_back(std::move(merged));
      if (auto e = conclusion_is(Hypersequent::make(std::move(out)))) return e;
      break;
    }
    case Rule::Bang: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->b);
      if (!s0) return bad("object missing from the premise");
      Sequent s = *s0;
      PropPtr a_ = s.at(p->b);
      s.erase(p->b);
      if (!is_client_context(s)) return bad("body context is not all client-typed");
      if (s.count(p->a)) return bad("subject already used in the body");
      s[p->a] = of_course(a_);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Quest: {
      const Hypersequent& h = prem(0);
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->b);
      if (!s0) return bad("object missing from the premise");
      Sequent s = *s0;
      PropPtr a_ = s.at(p->b);
      s.erase(p->b);
      if (s.count(p->a)) return bad("subject already used in the continuation");
      s[p->a] = why_not(a_);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
    case Rule::Contract: {
      const Hypersequent& h = prem(0);
      if (p->a == p->b) return bad("subject shadowed by its own copy");
      if (h.sequents.size() != 1) return bad("premise must be one sequent");
      const Sequent* s0 = h.find(p->a);
      if (!s0 || !s0->count(p->b)) return bad("subject or copy missing from the premise");
      PropPtr tx = s0->at(p->a);
      PropPtr tc = s0->at(p->b);
      if (tx->kind != PropKind::WhyNot || tc->kind != PropKind::WhyNot)
        return bad("spawn endpoints are not client-typed");
      if (!alpha_eq(tx, tc)) return bad("spawn copies disagree");
      Sequent s = *s0;
      s.erase(p->b);
      if (auto e = conclusion_is(single(std::move(s)))) return e;
      break;
    }
  }
  for (const auto& pr : d->premises)
    if (auto e = validate_rec(pr)) return e;
  return std::nullopt;
}

}  // namespace detail

inline std::optional<std::string> validate_reason(const DerivPtr& d) {
  return detail::validate_rec(d);
}

inline bool validate(const DerivPtr& d) { return !detail::validate_rec(d).has_value(); }

}  // namespace ct

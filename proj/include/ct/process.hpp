#pragma once

// Process terms, as immutable shared trees.
//
//   P, Q ::= 0                      nil
//          | P | Q                  parallel
//          | new (x,y){P}           restriction, x and y bound in P
//          | x[y].P                 send fresh name y on x; y bound in P
//          | x(y).P                 receive y on x; y bound in P
//          | close x | wait x.P     unit session ends
//          | x[inl:B].P             select left (B: the unused right branch)
//          | x[inr:A].P             select right (A: the unused left branch)
//          | case x {inl:P; inr:Q}  offer both branches
//          | x[type A as ex X.B].P  send witness type A at scheme ex X.B
//          | x(type X).P            receive a type; X bound in P's annotations
//          | link [A] x y           forwarder; x gets ~A's side, y gets A
//          | !x(y).P                server; y bound in P
//          | ?x[y].P                client session use; y bound in P
//          | spawn x[x'].P          client duplication; x' bound in P
//          | dispose [A] x.P        client disposal
//
// Channel binders: the object of send/receive/server/use, the copy of spawn,
// both names of a restriction. Type binder: the variable of a type receive
// (scoping over annotations in the continuation); the scheme variable of a
// type send scopes over the scheme body only.

#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ct/name.hpp"
#include "ct/proposition.hpp"

namespace ct {

enum class ProcKind {
  Nil, Par, Res, Send, Recv, Close, Wait, InL, InR, Case,
  SendType, RecvType, Link, Server, ClientUse, ClientSpawn, ClientDispose,
};

struct Proc;
using ProcPtr = std::shared_ptr<const Proc>;

struct Proc {
  ProcKind kind;
  Name a;       // subject (or Link's first name, Res's first binder)
  Name b;       // object binder (or Link's second name, Res's second binder)
  Name tv;      // SendType scheme binder / RecvType binder
  PropPtr t1;   // annotation: Link A, InL B, InR A, dispose A, SendType witness
  PropPtr t2;   // SendType scheme body
  ProcPtr p;    // first child / continuation
  ProcPtr q;    // second child (Par right, Case right branch)
};

inline ProcPtr mk_proc(Proc n) { return std::make_shared<Proc>(std::move(n)); }

inline ProcPtr nil() { return mk_proc({ProcKind::Nil, {}, {}, {}, nullptr, nullptr, nullptr, nullptr}); }
inline ProcPtr par(ProcPtr l, ProcPtr r) { return mk_proc({ProcKind::Par, {}, {}, {}, nullptr, nullptr, std::move(l), std::move(r)}); }
inline ProcPtr res(Name x, Name y, ProcPtr body) { return mk_proc({ProcKind::Res, std::move(x), std::move(y), {}, nullptr, nullptr, std::move(body), nullptr}); }
inline ProcPtr send(Name x, Name y, ProcPtr cont) { return mk_proc({ProcKind::Send, std::move(x), std::move(y), {}, nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr recv(Name x, Name y, ProcPtr cont) { return mk_proc({ProcKind::Recv, std::move(x), std::move(y), {}, nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr close_(Name x) { return mk_proc({ProcKind::Close, std::move(x), {}, {}, nullptr, nullptr, nullptr, nullptr}); }
inline ProcPtr wait_(Name x, ProcPtr cont) { return mk_proc({ProcKind::Wait, std::move(x), {}, {}, nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr inl(Name x, PropPtr right_branch, ProcPtr cont) { return mk_proc({ProcKind::InL, std::move(x), {}, {}, std::move(right_branch), nullptr, std::move(cont), nullptr}); }
inline ProcPtr inr(Name x, PropPtr left_branch, ProcPtr cont) { return mk_proc({ProcKind::InR, std::move(x), {}, {}, std::move(left_branch), nullptr, std::move(cont), nullptr}); }
inline ProcPtr case_(Name x, ProcPtr l, ProcPtr r) { return mk_proc({ProcKind::Case, std::move(x), {}, {}, nullptr, nullptr, std::move(l), std::move(r)}); }
inline ProcPtr send_type(Name x, PropPtr witness, Name scheme_var, PropPtr scheme_body, ProcPtr cont) {
  return mk_proc({ProcKind::SendType, std::move(x), {}, std::move(scheme_var), std::move(witness), std::move(scheme_body), std::move(cont), nullptr});
}
inline ProcPtr recv_type(Name x, Name var, ProcPtr cont) { return mk_proc({ProcKind::RecvType, std::move(x), {}, std::move(var), nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr link(PropPtr t, Name x, Name y) { return mk_proc({ProcKind::Link, std::move(x), std::move(y), {}, std::move(t), nullptr, nullptr, nullptr}); }
inline ProcPtr server(Name x, Name y, ProcPtr body) { return mk_proc({ProcKind::Server, std::move(x), std::move(y), {}, nullptr, nullptr, std::move(body), nullptr}); }
inline ProcPtr client_use(Name x, Name y, ProcPtr cont) { return mk_proc({ProcKind::ClientUse, std::move(x), std::move(y), {}, nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr client_spawn(Name x, Name copy, ProcPtr cont) { return mk_proc({ProcKind::ClientSpawn, std::move(x), std::move(copy), {}, nullptr, nullptr, std::move(cont), nullptr}); }
inline ProcPtr client_dispose(PropPtr t, Name x, ProcPtr cont) { return mk_proc({ProcKind::ClientDispose, std::move(x), {}, {}, std::move(t), nullptr, std::move(cont), nullptr}); }

// True when the node is a prefix with subject `a`, object binder `b` and a
// single continuation.
inline bool binds_object(ProcKind k) {
  return k == ProcKind::Send || k == ProcKind::Recv || k == ProcKind::Server ||
         k == ProcKind::ClientUse || k == ProcKind::ClientSpawn;
}

inline void collect_free_names(const ProcPtr& pr, const NameSet& bound, NameSet& out) {
  auto add = [&](const Name& n) {
    if (!bound.count(n)) out.insert(n);
  };
  switch (pr->kind) {
    case ProcKind::Nil: return;
    case ProcKind::Par:
      collect_free_names(pr->p, bound, out);
      collect_free_names(pr->q, bound, out);
      return;
    case ProcKind::Res: {
      NameSet b2 = bound;
      b2.insert(pr->a);
      b2.insert(pr->b);
      collect_free_names(pr->p, b2, out);
      return;
    }
    case ProcKind::Close: add(pr->a); return;
    case ProcKind::Wait:
    case ProcKind::InL:
    case ProcKind::InR:
    case ProcKind::SendType:
    case ProcKind::RecvType:
    case ProcKind::ClientDispose:
      add(pr->a);
      collect_free_names(pr->p, bound, out);
      return;
    case ProcKind::Case:
      add(pr->a);
      collect_free_names(pr->p, bound, out);
      collect_free_names(pr->q, bound, out);
      return;
    case ProcKind::Link: add(pr->a); add(pr->b); return;
    default: {  // prefixes binding their object
      add(pr->a);
      NameSet b2 = bound;
      b2.insert(pr->b);
      collect_free_names(pr->p, b2, out);
      return;
    }
  }
}

inline NameSet free_names(const ProcPtr& p) {
  NameSet out;
  collect_free_names(p, {}, out);
  return out;
}

// Every channel name in the term, bound or free: the avoid set for picking
// fresh names that cannot collide anywhere in a state.
inline void collect_all_names(const ProcPtr& pr, NameSet& out) {
  switch (pr->kind) {
    case ProcKind::Nil: return;
    case ProcKind::Par:
    case ProcKind::Case:
      if (pr->kind == ProcKind::Case) out.insert(pr->a);
      collect_all_names(pr->p, out);
      collect_all_names(pr->q, out);
      return;
    case ProcKind::Link:
      out.insert(pr->a);
      out.insert(pr->b);
      return;
    case ProcKind::Close: out.insert(pr->a); return;
    default:
      if (pr->kind != ProcKind::Nil) out.insert(pr->a);
      if (pr->kind == ProcKind::Res || binds_object(pr->kind)) out.insert(pr->b);
      if (pr->p) collect_all_names(pr->p, out);
      if (pr->q) collect_all_names(pr->q, out);
      return;
  }
}

inline NameSet all_names(const ProcPtr& p) {
  NameSet out;
  collect_all_names(p, out);
  return out;
}

// Free type variables of the annotations, accounting for both type binders.
inline void collect_proc_ftv(const ProcPtr& pr, const NameSet& bound, NameSet& out) {
  auto add_prop = [&](const PropPtr& t) {
    if (!t) return;
    NameSet vs = ftv(t);
    for (const auto& v : vs)
      if (!bound.count(v)) out.insert(v);
  };
  switch (pr->kind) {
    case ProcKind::SendType: {
      add_prop(pr->t1);
      NameSet b2 = bound;
      b2.insert(pr->tv);
      NameSet vs = ftv(pr->t2);
      for (const auto& v : vs)
        if (!b2.count(v)) out.insert(v);
      collect_proc_ftv(pr->p, bound, out);
      return;
    }
    case ProcKind::RecvType: {
      NameSet b2 = bound;
      b2.insert(pr->tv);
      collect_proc_ftv(pr->p, b2, out);
      return;
    }
    default:
      add_prop(pr->t1);
      if (pr->p) collect_proc_ftv(pr->p, bound, out);
      if (pr->q) collect_proc_ftv(pr->q, bound, out);
      return;
  }
}

inline NameSet proc_ftv(const ProcPtr& p) {
  NameSet out;
  collect_proc_ftv(p, {}, out);
  return out;
}

namespace detail {

using NameMap = std::map<Name, Name>;

inline Name apply_map(const NameMap& m, const Name& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

// Simultaneous capture-avoiding renaming of free channel names.
inline ProcPtr rename_proc(const ProcPtr& pr, const NameMap& m);

// Rebind one object binder: drops it from the map and renames it apart when
// a name being substituted into the body would be captured.
inline std::pair<Name, ProcPtr> rebind(const Name& binder, const ProcPtr& body,
                                       NameMap m, const NameSet& extra_avoid) {
  m.erase(binder);
  NameSet body_fn = free_names(body);
  bool clash = false;
  NameSet incoming;
  for (const auto& [from, to] : m)
    if (body_fn.count(from)) {
      incoming.insert(to);
      if (to == binder) clash = true;
    }
  if (!clash) {
    if (m.empty()) return {binder, body};
    return {binder, rename_proc(body, m)};
  }
  NameSet avoid = incoming;
  avoid.insert(body_fn.begin(), body_fn.end());
  avoid.insert(extra_avoid.begin(), extra_avoid.end());
  Name fresh = fresh_suffixed(binder, avoid);
  m[binder] = fresh;
  return {fresh, rename_proc(body, m)};
}

inline ProcPtr rename_proc(const ProcPtr& pr, const NameMap& m) {
  if (m.empty()) return pr;
  switch (pr->kind) {
    case ProcKind::Nil: return pr;
    case ProcKind::Par: return par(rename_proc(pr->p, m), rename_proc(pr->q, m));
    case ProcKind::Res: {
      NameMap m2 = m;
      m2.erase(pr->a);
      m2.erase(pr->b);
      NameSet body_fn = free_names(pr->p);
      NameSet incoming;
      for (const auto& [from, to] : m2)
        if (body_fn.count(from)) incoming.insert(to);
      Name na = pr->a, nb = pr->b;
      NameSet avoid = incoming;
      avoid.insert(body_fn.begin(), body_fn.end());
      if (incoming.count(na)) {
        na = fresh_suffixed(pr->a, avoid);
        avoid.insert(na);
        m2[pr->a] = na;
      }
      if (incoming.count(nb) || nb == na) {
        avoid.insert(na);
        nb = fresh_suffixed(pr->b, avoid);
        m2[pr->b] = nb;
      }
      return res(na, nb, m2.empty() ? pr->p : rename_proc(pr->p, m2));
    }
    case ProcKind::Close: return close_(apply_map(m, pr->a));
    case ProcKind::Wait: return wait_(apply_map(m, pr->a), rename_proc(pr->p, m));
    case ProcKind::InL: return inl(apply_map(m, pr->a), pr->t1, rename_proc(pr->p, m));
    case ProcKind::InR: return inr(apply_map(m, pr->a), pr->t1, rename_proc(pr->p, m));
    case ProcKind::Case:
      return case_(apply_map(m, pr->a), rename_proc(pr->p, m), rename_proc(pr->q, m));
    case ProcKind::SendType:
      return send_type(apply_map(m, pr->a), pr->t1, pr->tv, pr->t2, rename_proc(pr->p, m));
    case ProcKind::RecvType:
      return recv_type(apply_map(m, pr->a), pr->tv, rename_proc(pr->p, m));
    case ProcKind::Link: return link(pr->t1, apply_map(m, pr->a), apply_map(m, pr->b));
    case ProcKind::ClientDispose:
      return client_dispose(pr->t1, apply_map(m, pr->a), rename_proc(pr->p, m));
    default: {  // Send, Recv, Server, ClientUse, ClientSpawn
      Name subj = apply_map(m, pr->a);
      auto [nb, body] = rebind(pr->b, pr->p, m, {subj});
      Proc node = *pr;
      node.a = subj;
      node.b = nb;
      node.p = body;
      return mk_proc(std::move(node));
    }
  }
}

}  // namespace detail

inline ProcPtr rename(const ProcPtr& p, const std::map<Name, Name>& m) {
  return detail::rename_proc(p, m);
}

// Copy with one extra prime on every free name; the map records the renaming.
inline std::pair<ProcPtr, std::map<Name, Name>> prime_copy(const ProcPtr& p) {
  std::map<Name, Name> m;
  for (const auto& n : free_names(p)) m[n] = Name{n.base, n.primes + 1};
  return {detail::rename_proc(p, m), m};
}

inline bool is_terminated(const ProcPtr& p) {
  if (p->kind == ProcKind::Nil) return true;
  if (p->kind == ProcKind::Par) return is_terminated(p->p) && is_terminated(p->q);
  return false;
}

// ---------------------------------------------------------------------------
// Printing. `|` is lowest and left-associative; prefixes extend maximally
// right, so a parallel continuation needs parentheses.

namespace detail {

struct CanonEnv {
  std::vector<Name> chans;  // channel binders, outermost first
  std::vector<Name> tys;    // type binders, outermost first
};

inline std::string chan_str(const Name& n, const CanonEnv* env) {
  if (env) {
    for (size_t i = env->chans.size(); i-- > 0;)
      if (env->chans[i] == n) return "&" + std::to_string(env->chans.size() - 1 - i);
  }
  return to_string(n);
}

inline void print_annot(std::ostringstream& os, const PropPtr& t, CanonEnv* env) {
  if (env) {
    std::vector<Name> tys = env->tys;
    print_prop(os, t, 0, &tys);
  } else {
    print_prop(os, t, 0, nullptr);
  }
}

inline void print_proc(std::ostringstream& os, const ProcPtr& pr, bool par_ok,
                       CanonEnv* env) {
  auto sub = [&](const ProcPtr& child, bool ok) { print_proc(os, child, ok, env); };
  auto cont = [&](const ProcPtr& child) {
    os << '.';
    if (child->kind == ProcKind::Par) {
      os << '(';
      print_proc(os, child, true, env);
      os << ')';
    } else {
      print_proc(os, child, false, env);
    }
  };
  auto with_chan = [&](const Name& n, auto f) {
    if (env) {
      env->chans.push_back(n);
      f();
      env->chans.pop_back();
    } else {
      f();
    }
  };
  switch (pr->kind) {
    case ProcKind::Nil: os << '0'; break;
    case ProcKind::Par:
      if (!par_ok) {
        os << '(';
        print_proc(os, pr, true, env);
        os << ')';
        break;
      }
      sub(pr->p, true);
      os << " | ";
      sub(pr->q, pr->q->kind != ProcKind::Par);
      break;
    case ProcKind::Res:
      if (env) {
        env->chans.push_back(pr->a);
        env->chans.push_back(pr->b);
      }
      os << "new (" << chan_str(pr->a, env) << ',' << chan_str(pr->b, env) << "){";
      sub(pr->p, true);
      os << '}';
      if (env) {
        env->chans.pop_back();
        env->chans.pop_back();
      }
      break;
    case ProcKind::Send:
      os << chan_str(pr->a, env) << '[';
      with_chan(pr->b, [&] {
        os << chan_str(pr->b, env) << ']';
        cont(pr->p);
      });
      break;
    case ProcKind::Recv:
      os << chan_str(pr->a, env) << '(';
      with_chan(pr->b, [&] {
        os << chan_str(pr->b, env) << ')';
        cont(pr->p);
      });
      break;
    case ProcKind::Close: os << "close " << chan_str(pr->a, env); break;
    case ProcKind::Wait:
      os << "wait " << chan_str(pr->a, env);
      cont(pr->p);
      break;
    case ProcKind::InL:
      os << chan_str(pr->a, env) << "[inl:";
      print_annot(os, pr->t1, env);
      os << ']';
      cont(pr->p);
      break;
    case ProcKind::InR:
      os << chan_str(pr->a, env) << "[inr:";
      print_annot(os, pr->t1, env);
      os << ']';
      cont(pr->p);
      break;
    case ProcKind::Case:
      os << "case " << chan_str(pr->a, env) << " {inl: ";
      sub(pr->p, true);
      os << "; inr: ";
      sub(pr->q, true);
      os << '}';
      break;
    case ProcKind::SendType: {
      os << chan_str(pr->a, env) << "[type ";
      print_annot(os, pr->t1, env);
      os << " as ex ";
      if (env) {
        env->tys.push_back(pr->tv);
        os << '%' << env->tys.size() - 1 << '.';
        print_annot(os, pr->t2, env);
        env->tys.pop_back();
      } else {
        os << to_string(pr->tv) << '.';
        print_annot(os, pr->t2, env);
      }
      os << ']';
      cont(pr->p);
      break;
    }
    case ProcKind::RecvType:
      os << chan_str(pr->a, env) << "(type ";
      if (env) {
        env->tys.push_back(pr->tv);
        os << '%' << env->tys.size() - 1 << ')';
        cont(pr->p);
        env->tys.pop_back();
      } else {
        os << to_string(pr->tv) << ')';
        cont(pr->p);
      }
      break;
    case ProcKind::Link:
      os << "link [";
      print_annot(os, pr->t1, env);
      os << "] " << chan_str(pr->a, env) << ' ' << chan_str(pr->b, env);
      break;
    case ProcKind::Server:
      os << '!' << chan_str(pr->a, env) << '(';
      with_chan(pr->b, [&] {
        os << chan_str(pr->b, env) << ')';
        cont(pr->p);
      });
      break;
    case ProcKind::ClientUse:
      os << '?' << chan_str(pr->a, env) << '[';
      with_chan(pr->b, [&] {
        os << chan_str(pr->b, env) << ']';
        cont(pr->p);
      });
      break;
    case ProcKind::ClientSpawn:
      os << "spawn " << chan_str(pr->a, env) << '[';
      with_chan(pr->b, [&] {
        os << chan_str(pr->b, env) << ']';
        cont(pr->p);
      });
      break;
    case ProcKind::ClientDispose:
      os << "dispose [";
      print_annot(os, pr->t1, env);
      os << "] " << chan_str(pr->a, env);
      cont(pr->p);
      break;
  }
}

}  // namespace detail

inline std::string to_string(const ProcPtr& p) {
  std::ostringstream os;
  detail::print_proc(os, p, true, nullptr);
  return os.str();
}

// Canonical key: alpha-equivalent processes print identically (binders as
// de Bruijn indices, channel &k and type %k namespaces separate).
inline std::string canon_key(const ProcPtr& p) {
  std::ostringstream os;
  detail::CanonEnv env;
  detail::print_proc(os, p, true, &env);
  return os.str();
}

inline bool alpha_eq(const ProcPtr& p, const ProcPtr& q) {
  return canon_key(p) == canon_key(q);
}

// ---------------------------------------------------------------------------
// Substitution of a proposition for a type variable throughout a term's
// annotations (used when a type is received). Capture-avoiding in both the
// receive binders and scheme binders.

inline ProcPtr subst_type(const ProcPtr& pr, const Name& x, const PropPtr& a) {
  switch (pr->kind) {
    case ProcKind::Nil:
    case ProcKind::Close:
      return pr;
    case ProcKind::Link: return link(subst(pr->t1, x, a), pr->a, pr->b);
    case ProcKind::Par: return par(subst_type(pr->p, x, a), subst_type(pr->q, x, a));
    case ProcKind::Case:
      return case_(pr->a, subst_type(pr->p, x, a), subst_type(pr->q, x, a));
    case ProcKind::InL: return inl(pr->a, subst(pr->t1, x, a), subst_type(pr->p, x, a));
    case ProcKind::InR: return inr(pr->a, subst(pr->t1, x, a), subst_type(pr->p, x, a));
    case ProcKind::ClientDispose:
      return client_dispose(subst(pr->t1, x, a), pr->a, subst_type(pr->p, x, a));
    case ProcKind::SendType: {
      PropPtr w = subst(pr->t1, x, a);
      Name v = pr->tv;
      PropPtr body = pr->t2;
      if (v != x) {
        if (ftv(a).count(v)) {
          NameSet avoid = ftv(a);
          collect_all_tyvars(body, avoid);
          avoid.insert(x);
          Name v2 = fresh_suffixed(v, avoid);
          body = subst(body, v, atom(v2));
          v = v2;
        }
        body = subst(body, x, a);
      }
      return send_type(pr->a, w, v, body, subst_type(pr->p, x, a));
    }
    case ProcKind::RecvType: {
      if (pr->tv == x) return pr;  // shadowed
      Name v = pr->tv;
      ProcPtr body = pr->p;
      if (ftv(a).count(v)) {
        NameSet avoid = ftv(a);
        NameSet pv = proc_ftv(body);
        avoid.insert(pv.begin(), pv.end());
        avoid.insert(x);
        Name v2 = fresh_suffixed(v, avoid);
        body = subst_type(body, v, atom(v2));
        v = v2;
      }
      return recv_type(pr->a, v, subst_type(body, x, a));
    }
    default: {
      Proc node = *pr;
      node.p = subst_type(pr->p, x, a);
      return mk_proc(std::move(node));
    }
  }
}

}  // namespace ct

#pragma once

// Propositions of the session type language, as immutable shared trees.
//
//   A, B ::= A * B | A par B | A + B | A & B        (binary)
//          | 1 | bot | 0 | top                      (units)
//          | !A | ?A                                 (exponentials)
//          | ex X.A | all X.A                        (quantifiers, X bound in A)
//          | X | ~X                                  (atoms)
//
// Duality is an involution that swaps each connective with its partner and
// descends homomorphically; under a quantifier the bound variable is kept
// and the body dualized. Substitution is capture-avoiding.

#include <cassert>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ct/name.hpp"

namespace ct {

enum class PropKind {
  Tensor,    // A * B
  Par,       // A par B
  Plus,      // A + B
  With,      // A & B
  One,       // 1
  Bot,       // bot
  Zero,      // 0
  Top,       // top
  OfCourse,  // !A
  WhyNot,    // ?A
  Exists,    // ex X.A
  Forall,    // all X.A
  Atom,      // X
  DualAtom,  // ~X
};

struct Prop;
using PropPtr = std::shared_ptr<const Prop>;

struct Prop {
  PropKind kind;
  PropPtr left;   // binary: left operand; unary/quantifier: body
  PropPtr right;  // binary: right operand
  Name var;       // Atom/DualAtom: the atom; Exists/Forall: the binder
};

inline PropPtr mk_prop(PropKind k, PropPtr l = nullptr, PropPtr r = nullptr,
                       Name v = {}) {
  return std::make_shared<Prop>(Prop{k, std::move(l), std::move(r), std::move(v)});
}

inline PropPtr tensor(PropPtr a, PropPtr b) { return mk_prop(PropKind::Tensor, a, b); }
inline PropPtr parr(PropPtr a, PropPtr b) { return mk_prop(PropKind::Par, a, b); }
inline PropPtr plus(PropPtr a, PropPtr b) { return mk_prop(PropKind::Plus, a, b); }
inline PropPtr with(PropPtr a, PropPtr b) { return mk_prop(PropKind::With, a, b); }
inline PropPtr one() { return mk_prop(PropKind::One); }
inline PropPtr bot() { return mk_prop(PropKind::Bot); }
inline PropPtr zero() { return mk_prop(PropKind::Zero); }
inline PropPtr top() { return mk_prop(PropKind::Top); }
inline PropPtr of_course(PropPtr a) { return mk_prop(PropKind::OfCourse, a); }
inline PropPtr why_not(PropPtr a) { return mk_prop(PropKind::WhyNot, a); }
inline PropPtr exists(Name x, PropPtr a) { return mk_prop(PropKind::Exists, a, nullptr, x); }
inline PropPtr forall(Name x, PropPtr a) { return mk_prop(PropKind::Forall, a, nullptr, x); }
inline PropPtr atom(Name x) { return mk_prop(PropKind::Atom, nullptr, nullptr, x); }
inline PropPtr dual_atom(Name x) { return mk_prop(PropKind::DualAtom, nullptr, nullptr, x); }

inline bool is_binary(PropKind k) {
  return k == PropKind::Tensor || k == PropKind::Par || k == PropKind::Plus ||
         k == PropKind::With;
}
inline bool is_unit(PropKind k) {
  return k == PropKind::One || k == PropKind::Bot || k == PropKind::Zero ||
         k == PropKind::Top;
}
inline bool is_quantifier(PropKind k) {
  return k == PropKind::Exists || k == PropKind::Forall;
}
inline bool is_exponential(PropKind k) {
  return k == PropKind::OfCourse || k == PropKind::WhyNot;
}

inline PropPtr dual(const PropPtr& p) {
  switch (p->kind) {
    case PropKind::Tensor: return parr(dual(p->left), dual(p->right));
    case PropKind::Par: return tensor(dual(p->left), dual(p->right));
    case PropKind::Plus: return with(dual(p->left), dual(p->right));
    case PropKind::With: return plus(dual(p->left), dual(p->right));
    case PropKind::One: return bot();
    case PropKind::Bot: return one();
    case PropKind::Zero: return top();
    case PropKind::Top: return zero();
    case PropKind::OfCourse: return why_not(dual(p->left));
    case PropKind::WhyNot: return of_course(dual(p->left));
    case PropKind::Exists: return forall(p->var, dual(p->left));
    case PropKind::Forall: return exists(p->var, dual(p->left));
    case PropKind::Atom: return dual_atom(p->var);
    case PropKind::DualAtom: return atom(p->var);
  }
  throw std::logic_error("dual: bad kind");
}

inline void collect_ftv(const PropPtr& p, const NameSet& bound, NameSet& out) {
  switch (p->kind) {
    case PropKind::Atom:
    case PropKind::DualAtom:
      if (!bound.count(p->var)) out.insert(p->var);
      return;
    case PropKind::Exists:
    case PropKind::Forall: {
      NameSet b = bound;
      b.insert(p->var);
      collect_ftv(p->left, b, out);
      return;
    }
    default:
      if (p->left) collect_ftv(p->left, bound, out);
      if (p->right) collect_ftv(p->right, bound, out);
      return;
  }
}

inline NameSet ftv(const PropPtr& p) {
  NameSet out;
  collect_ftv(p, {}, out);
  return out;
}

// All names appearing in p, bound or free. Used for fresh-name avoid sets.
inline void collect_all_tyvars(const PropPtr& p, NameSet& out) {
  switch (p->kind) {
    case PropKind::Atom:
    case PropKind::DualAtom:
      out.insert(p->var);
      return;
    case PropKind::Exists:
    case PropKind::Forall:
      out.insert(p->var);
      collect_all_tyvars(p->left, out);
      return;
    default:
      if (p->left) collect_all_tyvars(p->left, out);
      if (p->right) collect_all_tyvars(p->right, out);
      return;
  }
}

// Capture-avoiding substitution of a for X. A dual atom ~X becomes dual(a).
inline PropPtr subst(const PropPtr& p, const Name& x, const PropPtr& a) {
  switch (p->kind) {
    case PropKind::Atom: return p->var == x ? a : p;
    case PropKind::DualAtom: return p->var == x ? dual(a) : p;
    case PropKind::One:
    case PropKind::Bot:
    case PropKind::Zero:
    case PropKind::Top: return p;
    case PropKind::OfCourse: return of_course(subst(p->left, x, a));
    case PropKind::WhyNot: return why_not(subst(p->left, x, a));
    case PropKind::Exists:
    case PropKind::Forall: {
      if (p->var == x) return p;  // shadowed
      NameSet fa = ftv(a);
      Name v = p->var;
      PropPtr body = p->left;
      if (fa.count(v)) {
        NameSet avoid = fa;
        collect_all_tyvars(body, avoid);
        avoid.insert(x);
        Name v2 = fresh_suffixed(v, avoid);
        body = subst(body, v, atom(v2));
        v = v2;
      }
      body = subst(body, x, a);
      return p->kind == PropKind::Exists ? exists(v, body) : forall(v, body);
    }
    default:
      return mk_prop(p->kind, subst(p->left, x, a), subst(p->right, x, a));
  }
}

inline int prop_depth(const PropPtr& p) {
  switch (p->kind) {
    case PropKind::Atom:
    case PropKind::DualAtom:
    case PropKind::One:
    case PropKind::Bot:
    case PropKind::Zero:
    case PropKind::Top: return 1;
    case PropKind::OfCourse:
    case PropKind::WhyNot:
    case PropKind::Exists:
    case PropKind::Forall: return 1 + prop_depth(p->left);
    default: return 1 + std::max(prop_depth(p->left), prop_depth(p->right));
  }
}

inline int prop_size(const PropPtr& p) {
  int n = 1;
  if (p->left) n += prop_size(p->left);
  if (p->right) n += prop_size(p->right);
  return n;
}

namespace detail {

// Alpha comparison with de Bruijn environments for the two sides.
inline bool alpha_eq_prop(const PropPtr& p, const PropPtr& q,
                          std::vector<Name>& envp, std::vector<Name>& envq) {
  if (p->kind != q->kind) return false;
  switch (p->kind) {
    case PropKind::Atom:
    case PropKind::DualAtom: {
      // Innermost binder wins on each side; both must resolve alike.
      for (size_t i = envp.size(); i-- > 0;) {
        bool bp = envp[i] == p->var, bq = envq[i] == q->var;
        if (bp || bq) return bp && bq;
      }
      return p->var == q->var;
    }
    case PropKind::Exists:
    case PropKind::Forall: {
      envp.push_back(p->var);
      envq.push_back(q->var);
      bool r = alpha_eq_prop(p->left, q->left, envp, envq);
      envp.pop_back();
      envq.pop_back();
      return r;
    }
    default:
      if (p->left && !alpha_eq_prop(p->left, q->left, envp, envq)) return false;
      if (p->right && !alpha_eq_prop(p->right, q->right, envp, envq)) return false;
      return true;
  }
}

}  // namespace detail

inline bool alpha_eq(const PropPtr& p, const PropPtr& q) {
  std::vector<Name> ep, eq_;
  return detail::alpha_eq_prop(p, q, ep, eq_);
}

// ---------------------------------------------------------------------------
// Printing. Precedence: atoms/units/exponentials bind tightest, then * and
// par, then + and &; quantifiers extend maximally to the right.

namespace detail {

enum PropPrec { PREC_BINDER = 0, PREC_ADDITIVE = 1, PREC_MULT = 2, PREC_UNARY = 3 };

inline int prop_prec(PropKind k) {
  switch (k) {
    case PropKind::Exists:
    case PropKind::Forall: return PREC_BINDER;
    case PropKind::Plus:
    case PropKind::With: return PREC_ADDITIVE;
    case PropKind::Tensor:
    case PropKind::Par: return PREC_MULT;
    default: return PREC_UNARY;
  }
}

// env maps binder names to de Bruijn levels when printing canonical keys.
inline void print_prop(std::ostringstream& os, const PropPtr& p, int min_prec,
                       std::vector<Name>* env) {
  int prec = prop_prec(p->kind);
  bool paren = prec < min_prec;
  if (paren) os << '(';
  auto var_str = [&](const Name& v) -> std::string {
    if (env) {
      for (size_t i = env->size(); i-- > 0;)
        if ((*env)[i] == v) return "%" + std::to_string(env->size() - 1 - i);
    }
    return to_string(v);
  };
  switch (p->kind) {
    case PropKind::One: os << '1'; break;
    case PropKind::Bot: os << "bot"; break;
    case PropKind::Zero: os << '0'; break;
    case PropKind::Top: os << "top"; break;
    case PropKind::Atom: os << var_str(p->var); break;
    case PropKind::DualAtom: os << '~' << var_str(p->var); break;
    case PropKind::OfCourse:
    case PropKind::WhyNot:
      os << (p->kind == PropKind::OfCourse ? '!' : '?');
      print_prop(os, p->left, PREC_UNARY, env);
      break;
    case PropKind::Exists:
    case PropKind::Forall: {
      os << (p->kind == PropKind::Exists ? "ex " : "all ");
      if (env) {
        env->push_back(p->var);
        os << "%" << env->size() - 1 << '.';
        print_prop(os, p->left, PREC_BINDER, env);
        env->pop_back();
      } else {
        os << to_string(p->var) << '.';
        print_prop(os, p->left, PREC_BINDER, env);
      }
      break;
    }
    case PropKind::Tensor:
    case PropKind::Par:
      // Right-associative: the left slot needs parens at equal precedence.
      print_prop(os, p->left, PREC_MULT + 1, env);
      os << (p->kind == PropKind::Tensor ? " * " : " par ");
      print_prop(os, p->right, PREC_MULT, env);
      break;
    case PropKind::Plus:
    case PropKind::With:
      print_prop(os, p->left, PREC_ADDITIVE + 1, env);
      os << (p->kind == PropKind::Plus ? " + " : " & ");
      print_prop(os, p->right, PREC_ADDITIVE, env);
      break;
  }
  if (paren) os << ')';
}

}  // namespace detail

inline std::string to_string(const PropPtr& p) {
  std::ostringstream os;
  detail::print_prop(os, p, 0, nullptr);
  return os.str();
}

// Canonical key: alpha-equal propositions print identically.
inline std::string canon_key(const PropPtr& p) {
  std::ostringstream os;
  std::vector<Name> env;
  detail::print_prop(os, p, 0, &env);
  return os.str();
}

}  // namespace ct

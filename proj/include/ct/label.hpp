#pragma once

// Transition labels.
//
//   close x      x[]              wait x        x()
//   send         x[y:A;B]         receive       x(y:A;B)
//   select       x[inl:A + B]     offer         x(inl:A & B)   (same for inr)
//   type send    x[type A]        type receive  x(type A)
//   use request  ?x[y:A]          use accept    !x(y:A)
//   spawn req    ?x[+y:A]         spawn accept  !x(+y:A)
//   dispose req  ?x[-:A]          dispose acc   !x(-:A)
//   forwarder    x<->y:A          synchronization <out,in>     silent tau
//
// The y of send/receive/use/spawn forms is a binder for the freshly created
// endpoint; it is irrelevant to label identity. Synchronization pairs an
// output-form label with the matching input-form label, output first.

#include <memory>
#include <sstream>
#include <stdexcept>

#include "ct/name.hpp"
#include "ct/proposition.hpp"

namespace ct {

enum class LabelKind {
  Close, Wait, Send, Recv, InlSel, InlOff, InrSel, InrOff,
  SendTy, RecvTy, UseReq, UseAcc, SpawnReq, SpawnAcc, DispReq, DispAcc,
  Link, Sync, Tau,
};

struct Label;
using LabelPtr = std::shared_ptr<const Label>;

struct Label {
  LabelKind kind = LabelKind::Tau;
  Name subj;          // acting endpoint (Link: first endpoint)
  Name obj;           // bound endpoint name (Link: second endpoint, free)
  PropPtr t1;         // payload type
  PropPtr t2;         // second payload (send/receive continuation type)
  LabelPtr out, in;   // Sync components
};

inline Label tau_l() { return {}; }
inline Label close_l(Name x) { return {LabelKind::Close, std::move(x), {}, nullptr, nullptr, nullptr, nullptr}; }
inline Label wait_l(Name x) { return {LabelKind::Wait, std::move(x), {}, nullptr, nullptr, nullptr, nullptr}; }
inline Label send_l(Name x, Name y, PropPtr a, PropPtr b) { return {LabelKind::Send, std::move(x), std::move(y), std::move(a), std::move(b), nullptr, nullptr}; }
inline Label recv_l(Name x, Name y, PropPtr a, PropPtr b) { return {LabelKind::Recv, std::move(x), std::move(y), std::move(a), std::move(b), nullptr, nullptr}; }
inline Label inl_sel_l(Name x, PropPtr sum) { return {LabelKind::InlSel, std::move(x), {}, std::move(sum), nullptr, nullptr, nullptr}; }
inline Label inl_off_l(Name x, PropPtr with_) { return {LabelKind::InlOff, std::move(x), {}, std::move(with_), nullptr, nullptr, nullptr}; }
inline Label inr_sel_l(Name x, PropPtr sum) { return {LabelKind::InrSel, std::move(x), {}, std::move(sum), nullptr, nullptr, nullptr}; }
inline Label inr_off_l(Name x, PropPtr with_) { return {LabelKind::InrOff, std::move(x), {}, std::move(with_), nullptr, nullptr, nullptr}; }
inline Label send_ty_l(Name x, PropPtr a) { return {LabelKind::SendTy, std::move(x), {}, std::move(a), nullptr, nullptr, nullptr}; }
inline Label recv_ty_l(Name x, PropPtr a) { return {LabelKind::RecvTy, std::move(x), {}, std::move(a), nullptr, nullptr, nullptr}; }
inline Label use_req_l(Name x, Name y, PropPtr a) { return {LabelKind::UseReq, std::move(x), std::move(y), std::move(a), nullptr, nullptr, nullptr}; }
inline Label use_acc_l(Name x, Name y, PropPtr a) { return {LabelKind::UseAcc, std::move(x), std::move(y), std::move(a), nullptr, nullptr, nullptr}; }
inline Label spawn_req_l(Name x, Name y, PropPtr a) { return {LabelKind::SpawnReq, std::move(x), std::move(y), std::move(a), nullptr, nullptr, nullptr}; }
inline Label spawn_acc_l(Name x, Name y, PropPtr a) { return {LabelKind::SpawnAcc, std::move(x), std::move(y), std::move(a), nullptr, nullptr, nullptr}; }
inline Label disp_req_l(Name x, PropPtr a) { return {LabelKind::DispReq, std::move(x), {}, std::move(a), nullptr, nullptr, nullptr}; }
inline Label disp_acc_l(Name x, PropPtr a) { return {LabelKind::DispAcc, std::move(x), {}, std::move(a), nullptr, nullptr, nullptr}; }
inline Label link_l(Name x, Name y, PropPtr a) { return {LabelKind::Link, std::move(x), std::move(y), std::move(a), nullptr, nullptr, nullptr}; }
inline Label sync_l(Label out, Label in) {
  Label s;
  s.kind = LabelKind::Sync;
  s.out = std::make_shared<Label>(std::move(out));
  s.in = std::make_shared<Label>(std::move(in));
  return s;
}

inline bool is_tau(const Label& l) { return l.kind == LabelKind::Tau; }

// Output forms use square brackets (the acting side); all client-side
// exponential actions are output forms.
inline bool is_output_form(LabelKind k) {
  switch (k) {
    case LabelKind::Close:
    case LabelKind::Send:
    case LabelKind::InlSel:
    case LabelKind::InrSel:
    case LabelKind::SendTy:
    case LabelKind::UseReq:
    case LabelKind::SpawnReq:
    case LabelKind::DispReq:
      return true;
    default:
      return false;
  }
}

inline bool has_bound_name(LabelKind k) {
  switch (k) {
    case LabelKind::Send:
    case LabelKind::Recv:
    case LabelKind::UseReq:
    case LabelKind::UseAcc:
    case LabelKind::SpawnReq:
    case LabelKind::SpawnAcc:
      return true;
    default:
      return false;
  }
}

inline void collect_label_names(const Label& l, NameSet& out) {
  switch (l.kind) {
    case LabelKind::Tau: return;
    case LabelKind::Sync:
      collect_label_names(*l.out, out);
      collect_label_names(*l.in, out);
      return;
    case LabelKind::Link:
      out.insert(l.subj);
      out.insert(l.obj);
      return;
    default:
      out.insert(l.subj);
      if (has_bound_name(l.kind)) out.insert(l.obj);
      return;
  }
}

inline NameSet label_names(const Label& l) {
  NameSet out;
  collect_label_names(l, out);
  return out;
}

inline void collect_bound_names(const Label& l, NameSet& out) {
  if (l.kind == LabelKind::Sync) {
    collect_bound_names(*l.out, out);
    collect_bound_names(*l.in, out);
  } else if (has_bound_name(l.kind)) {
    out.insert(l.obj);
  }
}

inline NameSet bound_names(const Label& l) {
  NameSet out;
  collect_bound_names(l, out);
  return out;
}

// The endpoints a label acts on (bound names excluded).
inline void collect_subjects(const Label& l, NameSet& out) {
  switch (l.kind) {
    case LabelKind::Tau: return;
    case LabelKind::Sync:
      collect_subjects(*l.out, out);
      collect_subjects(*l.in, out);
      return;
    case LabelKind::Link:
      out.insert(l.subj);
      out.insert(l.obj);
      return;
    default:
      out.insert(l.subj);
      return;
  }
}

inline NameSet subjects(const Label& l) {
  NameSet out;
  collect_subjects(l, out);
  return out;
}

// Duality on labels: an output form matches an input form when the payload
// types are componentwise dual (alpha-insensitive); endpoint names do not
// matter. Symmetric; tau, sync and forwarder labels match nothing.
inline bool label_dual(const Label& a, const Label& b) {
  const Label* o = &a;
  const Label* i = &b;
  if (!is_output_form(o->kind)) std::swap(o, i);
  if (!is_output_form(o->kind) || is_output_form(i->kind)) return false;
  auto dual_payload = [&](const PropPtr& x, const PropPtr& y) {
    return alpha_eq(dual(x), y);
  };
  switch (o->kind) {
    case LabelKind::Close: return i->kind == LabelKind::Wait;
    case LabelKind::Send:
      return i->kind == LabelKind::Recv && dual_payload(o->t1, i->t1) &&
             dual_payload(o->t2, i->t2);
    case LabelKind::InlSel: return i->kind == LabelKind::InlOff && dual_payload(o->t1, i->t1);
    case LabelKind::InrSel: return i->kind == LabelKind::InrOff && dual_payload(o->t1, i->t1);
    case LabelKind::SendTy: return i->kind == LabelKind::RecvTy && dual_payload(o->t1, i->t1);
    case LabelKind::UseReq: return i->kind == LabelKind::UseAcc && dual_payload(o->t1, i->t1);
    case LabelKind::SpawnReq: return i->kind == LabelKind::SpawnAcc && dual_payload(o->t1, i->t1);
    case LabelKind::DispReq: return i->kind == LabelKind::DispAcc && dual_payload(o->t1, i->t1);
    default: return false;
  }
}

namespace detail {

inline void print_label(std::ostringstream& os, const Label& l, bool canon) {
  auto prop = [&](const PropPtr& t) {
    if (canon) {
      std::vector<Name> env;
      print_prop(os, t, 0, &env);
    } else {
      print_prop(os, t, 0, nullptr);
    }
  };
  auto bound = [&](const Name& n) {
    if (canon)
      os << '&';
    else
      os << to_string(n);
  };
  switch (l.kind) {
    case LabelKind::Tau: os << "tau"; break;
    case LabelKind::Close: os << to_string(l.subj) << "[]"; break;
    case LabelKind::Wait: os << to_string(l.subj) << "()"; break;
    case LabelKind::Send:
    case LabelKind::Recv:
      os << to_string(l.subj) << (l.kind == LabelKind::Send ? '[' : '(');
      bound(l.obj);
      os << ':';
      prop(l.t1);
      os << ';';
      prop(l.t2);
      os << (l.kind == LabelKind::Send ? ']' : ')');
      break;
    case LabelKind::InlSel:
    case LabelKind::InrSel:
      os << to_string(l.subj) << (l.kind == LabelKind::InlSel ? "[inl:" : "[inr:");
      prop(l.t1);
      os << ']';
      break;
    case LabelKind::InlOff:
    case LabelKind::InrOff:
      os << to_string(l.subj) << (l.kind == LabelKind::InlOff ? "(inl:" : "(inr:");
      prop(l.t1);
      os << ')';
      break;
    case LabelKind::SendTy:
      os << to_string(l.subj) << "[type ";
      prop(l.t1);
      os << ']';
      break;
    case LabelKind::RecvTy:
      os << to_string(l.subj) << "(type ";
      prop(l.t1);
      os << ')';
      break;
    case LabelKind::UseReq:
    case LabelKind::SpawnReq:
      os << '?' << to_string(l.subj) << '[';
      if (l.kind == LabelKind::SpawnReq) os << '+';
      bound(l.obj);
      os << ':';
      prop(l.t1);
      os << ']';
      break;
    case LabelKind::UseAcc:
    case LabelKind::SpawnAcc:
      os << '!' << to_string(l.subj) << '(';
      if (l.kind == LabelKind::SpawnAcc) os << '+';
      bound(l.obj);
      os << ':';
      prop(l.t1);
      os << ')';
      break;
    case LabelKind::DispReq:
      os << '?' << to_string(l.subj) << "[-:";
      prop(l.t1);
      os << ']';
      break;
    case LabelKind::DispAcc:
      os << '!' << to_string(l.subj) << "(-:";
      prop(l.t1);
      os << ')';
      break;
    case LabelKind::Link:
      os << to_string(l.subj) << "<->" << to_string(l.obj) << ':';
      prop(l.t1);
      break;
    case LabelKind::Sync:
      os << '<';
      print_label(os, *l.out, canon);
      os << ',';
      print_label(os, *l.in, canon);
      os << '>';
      break;
  }
}

}  // namespace detail

inline std::string to_string(const Label& l) {
  std::ostringstream os;
  detail::print_label(os, l, false);
  return os.str();
}

// Canonical key: labels differing only in bound names or payload alpha
// renaming print identically.
inline std::string label_key(const Label& l) {
  std::ostringstream os;
  detail::print_label(os, l, true);
  return os.str();
}

inline bool alpha_eq(const Label& a, const Label& b) {
  return label_key(a) == label_key(b);
}

}  // namespace ct

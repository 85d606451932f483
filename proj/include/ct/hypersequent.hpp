#pragma once

// Typing contexts. A sequent maps channel names to propositions; a
// hypersequent is a multiset of sequents whose name sets are pairwise
// disjoint. Empty sequents are absorbed on construction, exchange is free
// (sequents are maps), and equality is alpha-aware on the propositions.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ct/name.hpp"
#include "ct/proposition.hpp"

namespace ct {

using Sequent = std::map<Name, PropPtr>;

struct Hypersequent {
  std::vector<Sequent> sequents;  // no empty sequents are stored

  static Hypersequent make(std::vector<Sequent> ss) {
    Hypersequent h;
    for (auto& s : ss)
      if (!s.empty()) h.sequents.push_back(std::move(s));
    return h;
  }

  bool empty() const { return sequents.empty(); }

  NameSet names() const {
    NameSet out;
    for (const auto& s : sequents)
      for (const auto& [n, _] : s) out.insert(n);
    return out;
  }

  // The sequent holding x, if any.
  const Sequent* find(const Name& x) const {
    for (const auto& s : sequents)
      if (s.count(x)) return &s;
    return nullptr;
  }

  std::optional<PropPtr> type_of(const Name& x) const {
    for (const auto& s : sequents) {
      auto it = s.find(x);
      if (it != s.end()) return it->second;
    }
    return std::nullopt;
  }
};

inline bool names_disjoint(const Hypersequent& a, const Hypersequent& b) {
  NameSet na = a.names();
  for (const auto& s : b.sequents)
    for (const auto& [n, _] : s)
      if (na.count(n)) return false;
  return true;
}

// Side-by-side composition of two hypersequents with disjoint names.
// Returns nothing if the names overlap.
inline std::optional<Hypersequent> hs_merge(const Hypersequent& a,
                                            const Hypersequent& b) {
  if (!names_disjoint(a, b)) return std::nullopt;
  Hypersequent out = a;
  out.sequents.insert(out.sequents.end(), b.sequents.begin(), b.sequents.end());
  return out;
}

inline bool sequent_equal(const Sequent& a, const Sequent& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  for (auto ib = b.begin(); ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!alpha_eq(ia->second, ib->second)) return false;
  }
  return true;
}

inline std::string sequent_key(const Sequent& s) {
  std::ostringstream os;
  for (const auto& [n, p] : s) os << to_string(n) << ':' << canon_key(p) << ',';
  return os.str();
}

// Multiset equality of sequents, alpha-aware on propositions.
inline bool hs_equal(const Hypersequent& a, const Hypersequent& b) {
  if (a.sequents.size() != b.sequents.size()) return false;
  std::vector<std::string> ka, kb;
  for (const auto& s : a.sequents) ka.push_back(sequent_key(s));
  for (const auto& s : b.sequents) kb.push_back(sequent_key(s));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka == kb;
}

// Canonical key for whole hypersequents (used for dedup in search).
inline std::string hs_key(const Hypersequent& h) {
  std::vector<std::string> ks;
  for (const auto& s : h.sequents) ks.push_back(sequent_key(s));
  std::sort(ks.begin(), ks.end());
  std::ostringstream os;
  for (const auto& k : ks) os << k << '|';
  return os.str();
}

// True when every entry is ?-typed: the shape a server body's context needs.
inline bool is_client_context(const Sequent& s) {
  for (const auto& [n, p] : s)
    if (p->kind != PropKind::WhyNot) return false;
  return true;
}

// Text form: sequents as "x : A, y : B", joined by " || ".
inline std::string to_string(const Hypersequent& h) {
  if (h.sequents.empty()) return "(empty)";
  std::ostringstream os;
  bool first_seq = true;
  for (const auto& s : h.sequents) {
    if (!first_seq) os << " || ";
    first_seq = false;
    bool first = true;
    for (const auto& [n, p] : s) {
      if (!first) os << ", ";
      first = false;
      os << to_string(n) << " : " << to_string(p);
    }
  }
  return os.str();
}

}  // namespace ct

#pragma once

// Channel and type-variable names. A name is a base identifier plus a prime
// count; primes mark copies made when a server is spawned, so they are part
// of the name's identity, not decoration.

#include <compare>
#include <set>
#include <string>

namespace ct {

struct Name {
  std::string base;
  int primes = 0;

  auto operator<=>(const Name&) const = default;
  bool operator==(const Name&) const = default;
};

using NameSet = std::set<Name>;

inline std::string to_string(const Name& n) {
  std::string s = n.base;
  s.append(static_cast<size_t>(n.primes), '\'');
  return s;
}

inline Name name(std::string base, int primes = 0) {
  return Name{std::move(base), primes};
}

// Fresh name with extra primes: used for spawned server copies. Picks the
// lowest prime count above the original that misses `avoid`.
inline Name fresh_primed(const Name& n, const NameSet& avoid) {
  Name c = n;
  do {
    ++c.primes;
  } while (avoid.count(c));
  return c;
}

// Fresh name by numeric suffix: used when a binder must be renamed apart.
// Suffixing keeps primes meaningful (they always denote copies).
inline Name fresh_suffixed(const Name& n, const NameSet& avoid) {
  for (int k = 1;; ++k) {
    Name c{n.base + std::to_string(k), n.primes};
    if (!avoid.count(c)) return c;
  }
}

// Fresh: keep the name if free, otherwise suffix it.
inline Name freshen(const Name& n, const NameSet& avoid) {
  if (!avoid.count(n)) return n;
  return fresh_suffixed(n, avoid);
}

}  // namespace ct

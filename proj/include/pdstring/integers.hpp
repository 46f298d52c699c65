#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pd {

using Integer = mpz_class;

// Thrown when a documented search bound is exhausted; callers surface the
// bound name and the radius reached.
struct BoundExceeded : std::runtime_error {
  explicit BoundExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Malformed user-facing input (CLI flags, group files, class specs).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

#define PD_CHECK(cond, msg)                                        \
  do {                                                             \
    if (!(cond)) throw std::logic_error(std::string("invariant: ") + (msg)); \
  } while (0)

inline Integer int_gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// Quotient minimizing |a - q*b|, ties toward the floor quotient; used by the
// Smith reduction to shrink entries as fast as possible, deterministically.
inline Integer nearest_quotient(const Integer& a, const Integer& b) {
  PD_CHECK(b != 0, "nearest_quotient by zero");
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Integer babs = abs(b);
  if (r * 2 > babs) q += 1;
  return q;
}

// Floor quotient: for b > 0 the remainder a - q*b lies in [0, b).
inline Integer floor_quotient(const Integer& a, const Integer& b) {
  PD_CHECK(b != 0, "floor_quotient by zero");
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline std::string to_string(const Integer& v) { return v.get_str(); }

// FNV-1a over a string; stable across runs/platforms (unlike std::hash).
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace pd

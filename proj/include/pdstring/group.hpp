#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pdstring/word.hpp"

namespace pd {

// Search / verification bounds. Every bounded search reports the bound it
// exhausted through BoundExceeded rather than guessing.
struct Options {
  long conjugacy_search_radius = 20000;  // node cap for conjugacy closures
  long coset_search_radius = 64;         // power-window cap for cyclic cosets
  int max_window_radius = 12;            // duality window deepening cap
  bool debug_checks = false;             // eager chain-level verification
};

// Oracle interface shared by the built-in groups. Words are plain syntax;
// the oracle decides equality, conjugacy and canonical spellings. normal_form
// returns the ShortLex-minimal representative, so Word equality after
// normal_form is group equality.
class Group {
 public:
  explicit Group(Options opts) : opts_(opts) {}
  virtual ~Group() = default;

  enum class Kind { FreeAbelian, Surface };
  virtual Kind kind() const = 0;

  // Duality dimension n of the group (the formal dimension of the oracle).
  virtual int dimension() const = 0;
  virtual int generator_count() const = 0;
  virtual const std::vector<std::string>& generator_names() const = 0;
  virtual std::string describe() const = 0;  // stable cache identity

  virtual Word normal_form(const Word& w) const = 0;

  Word multiply(const Word& a, const Word& b) const { return normal_form(a * b); }
  Word invert(const Word& a) const { return normal_form(a.inverse()); }
  bool is_identity(const Word& w) const { return normal_form(w).is_one(); }
  bool equal(const Word& a, const Word& b) const { return normal_form(a) == normal_form(b); }

  // Witness w with w*g*w^-1 = h, or nullopt when g,h are not conjugate.
  virtual std::optional<Word> conjugacy_witness(const Word& g, const Word& h) const = 0;

  bool are_conjugate(const Word& g, const Word& h) const {
    return conjugacy_witness(g, h).has_value();
  }

  // Canonical representative of the conjugacy class (ShortLex-minimal member
  // found by the class search).
  virtual Word conjugacy_label(const Word& g) const = 0;

  // g = root^k with k >= 1 and root not a proper power; g must not be trivial.
  virtual std::pair<Word, long> primitive_root(const Word& g) const = 0;

  // m with base^m = u, or nullopt; base must not be trivial.
  virtual std::optional<long> power_of(const Word& base, const Word& u) const = 0;

  // All elements of word length <= radius, ShortLex-sorted. Memoized.
  const std::vector<Word>& ball(int radius) const {
    std::lock_guard<std::mutex> lock(ball_mutex_);
    auto it = balls_.find(radius);
    if (it != balls_.end()) return it->second;
    return balls_.emplace(radius, compute_ball(radius)).first->second;
  }

  const Options& options() const { return opts_; }

  Word parse(const std::string& s) const { return parse_word(s, generator_names()); }
  std::string format(const Word& w) const { return format_word(w, generator_names()); }

 protected:
  virtual std::vector<Word> compute_ball(int radius) const {
    // Generic BFS through normal forms.
    std::map<Word, int, Word::ShortLex> seen;
    std::vector<Word> frontier{Word::one()};
    seen.emplace(Word::one(), 0);
    for (int layer = 0; layer < radius; ++layer) {
      std::vector<Word> next;
      for (const Word& w : frontier) {
        for (int g = 0; g < generator_count(); ++g) {
          for (int s : {1, -1}) {
            Word n = normal_form(w * Word::gen(g, s));
            if (seen.emplace(n, layer + 1).second) next.push_back(n);
          }
        }
      }
      frontier = std::move(next);
    }
    std::vector<Word> out;
    out.reserve(seen.size());
    for (auto& [w, d] : seen) out.push_back(w);
    return out;  // std::map iteration = ShortLex order
  }

  Options opts_;

 private:
  mutable std::mutex ball_mutex_;
  mutable std::map<int, std::vector<Word>> balls_;
};

using GroupPtr = std::shared_ptr<const Group>;

// Element of the integral group ring Z[G]: finitely supported map from
// normalized words to integers, ShortLex-ordered for determinism.
struct GroupRingElement {
  std::map<Word, Integer, Word::ShortLex> terms;

  static GroupRingElement unit() {
    GroupRingElement e;
    e.terms[Word::one()] = 1;
    return e;
  }

  void add(const Word& w, const Integer& c) {
    if (c == 0) return;
    auto [it, fresh] = terms.emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  GroupRingElement& operator+=(const GroupRingElement& o) {
    for (const auto& [w, c] : o.terms) add(w, c);
    return *this;
  }

  GroupRingElement negated() const {
    GroupRingElement r;
    for (const auto& [w, c] : terms) r.terms.emplace(w, -c);
    return r;
  }

  Integer augmentation() const {
    Integer s = 0;
    for (const auto& [w, c] : terms) s += c;
    return s;
  }

  bool zero() const { return terms.empty(); }
  friend bool operator==(const GroupRingElement&, const GroupRingElement&) = default;
};

inline GroupRingElement ring_mul(const Group& g, const GroupRingElement& a,
                                 const GroupRingElement& b) {
  GroupRingElement r;
  for (const auto& [wa, ca] : a.terms)
    for (const auto& [wb, cb] : b.terms) r.add(g.multiply(wa, wb), ca * cb);
  return r;
}

}  // namespace pd

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pdstring/integers.hpp"

namespace pd {

// Run-length letter: generator index with a nonzero exponent.
struct Letter {
  int gen;
  long exp;
  friend bool operator==(const Letter&, const Letter&) = default;
};

// Freely reduced word in the generators of some group (the group supplies
// meaning; Word is plain syntax). Invariant: no zero exponents, no two
// adjacent letters with the same generator.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> ls) : ls_(std::move(ls)) { reduce_(); }

  static Word one() { return Word(); }
  static Word gen(int g, long e = 1) { return Word({Letter{g, e}}); }

  const std::vector<Letter>& letters() const { return ls_; }
  bool is_one() const { return ls_.empty(); }

  long length() const {
    long n = 0;
    for (const auto& l : ls_) n += l.exp < 0 ? -l.exp : l.exp;
    return n;
  }

  Word inverse() const {
    std::vector<Letter> r;
    r.reserve(ls_.size());
    for (auto it = ls_.rbegin(); it != ls_.rend(); ++it) r.push_back({it->gen, -it->exp});
    return Word(std::move(r));
  }

  // Free concatenation (not group normalization).
  friend Word operator*(const Word& a, const Word& b) {
    std::vector<Letter> r = a.ls_;
    r.insert(r.end(), b.ls_.begin(), b.ls_.end());
    return Word(std::move(r));
  }

  // Single letters (gen, +-1), one entry per unit of length.
  std::vector<std::pair<int, int>> flat() const {
    std::vector<std::pair<int, int>> f;
    f.reserve(size_t(length()));
    for (const auto& l : ls_) {
      int s = l.exp < 0 ? -1 : 1;
      for (long i = 0; i < (l.exp < 0 ? -l.exp : l.exp); ++i) f.emplace_back(l.gen, s);
    }
    return f;
  }

  static Word from_flat(const std::vector<std::pair<int, int>>& f) {
    std::vector<Letter> ls;
    for (auto [g, s] : f) ls.push_back({g, s});
    return Word(std::move(ls));
  }

  friend bool operator==(const Word&, const Word&) = default;

  // ShortLex: length first, then the flattened letter sequence by rank
  // (gen ascending, positive exponent before negative).
  friend bool shortlex_less(const Word& a, const Word& b) {
    long la = a.length(), lb = b.length();
    if (la != lb) return la < lb;
    auto fa = a.flat(), fb = b.flat();
    for (size_t i = 0; i < fa.size(); ++i) {
      int ra = 2 * fa[i].first + (fa[i].second < 0 ? 1 : 0);
      int rb = 2 * fb[i].first + (fb[i].second < 0 ? 1 : 0);
      if (ra != rb) return ra < rb;
    }
    return false;
  }

  struct ShortLex {
    bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
  };

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (const auto& l : ls_) {
      mix(std::uint64_t(l.gen));
      mix(std::uint64_t(l.exp));
    }
    return h;
  }

 private:
  void reduce_() {
    std::vector<Letter> out;
    for (const auto& l : ls_) {
      if (l.exp == 0) continue;
      if (!out.empty() && out.back().gen == l.gen) {
        out.back().exp += l.exp;
        if (out.back().exp == 0) out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    ls_ = std::move(out);
  }

  std::vector<Letter> ls_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return std::size_t(w.hash()); }
};

// --- parsing / printing against a generator name table ------------------

// Syntax: gen1*gen2^-3*gen1^2 ; "1" or "" is the identity.
inline Word parse_word(const std::string& text, const std::vector<std::string>& names) {
  std::string s;
  for (char c : text)
    if (!isspace((unsigned char)c)) s.push_back(c);
  if (s.empty() || s == "1") return Word::one();
  std::vector<Letter> ls;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = i;
    while (j < s.size() && s[j] != '*' && s[j] != '^') ++j;
    std::string name = s.substr(i, j - i);
    int gen = -1;
    for (size_t g = 0; g < names.size(); ++g)
      if (names[g] == name) {
        gen = int(g);
        break;
      }
    if (gen < 0) throw SpecError("unknown generator '" + name + "' in word '" + text + "'");
    long exp = 1;
    i = j;
    if (i < s.size() && s[i] == '^') {
      ++i;
      size_t k = i;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      while (k < s.size() && isdigit((unsigned char)s[k])) ++k;
      if (k == i || (s[i] == '-' && k == i + 1))
        throw SpecError("bad exponent in word '" + text + "'");
      exp = std::stol(s.substr(i, k - i));
      i = k;
    }
    if (i < s.size()) {
      if (s[i] != '*') throw SpecError("expected '*' in word '" + text + "'");
      ++i;
      if (i == s.size()) throw SpecError("trailing '*' in word '" + text + "'");
    }
    ls.push_back({gen, exp});
  }
  return Word(std::move(ls));
}

inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.is_one()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& l : w.letters()) {
    if (!first) os << '*';
    first = false;
    os << names.at(size_t(l.gen));
    if (l.exp != 1) os << '^' << l.exp;
  }
  return os.str();
}

}  // namespace pd

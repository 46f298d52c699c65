#pragma once

#include <algorithm>
#include <numeric>

#include "pdstring/group.hpp"

namespace pd {

// Z^n with generators e1..en (n >= 0; rank 0 is the trivial group, used as
// the abstract oracle of trivial subgroups).
class FreeAbelianGroup final : public Group {
 public:
  explicit FreeAbelianGroup(int rank, Options opts = {})
      : Group(opts), rank_(rank) {
    PD_CHECK(rank >= 0, "free_abelian rank");
    for (int i = 1; i <= rank; ++i) names_.push_back("e" + std::to_string(i));
  }

  Kind kind() const override { return Kind::FreeAbelian; }
  int dimension() const override { return rank_; }
  int generator_count() const override { return rank_; }
  const std::vector<std::string>& generator_names() const override { return names_; }
  std::string describe() const override { return "free_abelian:" + std::to_string(rank_); }

  std::vector<long> coords(const Word& w) const {
    std::vector<long> v(size_t(rank_), 0);
    for (const auto& l : w.letters()) {
      PD_CHECK(l.gen >= 0 && l.gen < rank_, "generator out of range");
      v[size_t(l.gen)] += l.exp;
    }
    return v;
  }

  Word word_of(const std::vector<long>& v) const {
    std::vector<Letter> ls;
    for (int i = 0; i < rank_; ++i)
      if (v[size_t(i)] != 0) ls.push_back({i, v[size_t(i)]});
    return Word(std::move(ls));
  }

  Word normal_form(const Word& w) const override { return word_of(coords(w)); }

  std::optional<Word> conjugacy_witness(const Word& g, const Word& h) const override {
    if (normal_form(g) == normal_form(h)) return Word::one();
    return std::nullopt;
  }

  Word conjugacy_label(const Word& g) const override { return normal_form(g); }

  std::pair<Word, long> primitive_root(const Word& g) const override {
    std::vector<long> v = coords(g);
    long d = 0;
    for (long x : v) d = std::gcd(d, x);
    PD_CHECK(d > 0, "primitive_root of identity");
    for (long& x : v) x /= d;
    return {word_of(v), d};
  }

  std::optional<long> power_of(const Word& base, const Word& u) const override {
    std::vector<long> v = coords(base), w = coords(u);
    int piv = -1;
    for (int i = 0; i < rank_; ++i)
      if (v[size_t(i)] != 0) piv = i;
    PD_CHECK(piv >= 0, "power_of trivial base");
    if (w[size_t(piv)] % v[size_t(piv)] != 0) return std::nullopt;
    long m = w[size_t(piv)] / v[size_t(piv)];
    for (int i = 0; i < rank_; ++i)
      if (w[size_t(i)] != m * v[size_t(i)]) return std::nullopt;
    return m;
  }

 protected:
  std::vector<Word> compute_ball(int radius) const override {
    // Lattice points with |v|_1 <= radius, emitted via normal forms.
    std::vector<Word> out;
    std::vector<long> v(size_t(rank_), 0);
    enumerate_(0, radius, v, out);
    std::sort(out.begin(), out.end(), Word::ShortLex{});
    return out;
  }

 private:
  void enumerate_(int pos, int budget, std::vector<long>& v, std::vector<Word>& out) const {
    if (pos == rank_) {
      out.push_back(word_of(v));
      return;
    }
    for (long x = -budget; x <= budget; ++x) {
      v[size_t(pos)] = x;
      enumerate_(pos + 1, budget - int(x < 0 ? -x : x), v, out);
    }
    v[size_t(pos)] = 0;
  }

  int rank_;
  std::vector<std::string> names_;
};

}  // namespace pd

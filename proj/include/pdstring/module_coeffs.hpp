#pragma once

#include "pdstring/diagonal.hpp"
#include "pdstring/subgroup.hpp"

namespace pd {

// Coefficients Z[G/K]: basis the left cosets, acted on by left translation.
// Coset words are always stored canonically.
struct CosetModule {
  GroupPtr g;
  Subgroup k;
  Word canon(const Word& w) const { return k.left_coset(w).rep; }
};

struct PairModule {
  CosetModule first, second;
};

// Term of C_* (x)_G Z[G/K] (or of a Hom(C_*, Z[G/K]) cochain): the cell sits
// at the identity translate, the coset key carries the rest.
struct MTerm {
  int idx = 0;
  Word key;
  friend bool operator==(const MTerm&, const MTerm&) = default;
};
struct MTermLess {
  bool operator()(const MTerm& a, const MTerm& b) const {
    if (a.idx != b.idx) return a.idx < b.idx;
    return shortlex_less(a.key, b.key);
  }
};

struct MPairTerm {
  int idx = 0;
  Word key1, key2;
  friend bool operator==(const MPairTerm&, const MPairTerm&) = default;
};
struct MPairTermLess {
  bool operator()(const MPairTerm& a, const MPairTerm& b) const {
    if (a.idx != b.idx) return a.idx < b.idx;
    if (!(a.key1 == b.key1)) return shortlex_less(a.key1, b.key1);
    return shortlex_less(a.key2, b.key2);
  }
};

template <class Term, class Less>
class SparseVec {
 public:
  using Terms = std::map<Term, Integer, Less>;
  void add(const Term& t, const Integer& v) {
    if (v == 0) return;
    auto [it, fresh] = t_.emplace(t, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) t_.erase(it);
    }
  }
  void add(const SparseVec& o, const Integer& scale = 1) {
    for (const auto& [t, v] : o.t_) add(t, v * scale);
  }
  bool empty() const { return t_.empty(); }
  const Terms& terms() const { return t_; }
  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  Terms t_;
};

using MChain = SparseVec<MTerm, MTermLess>;      // homological, coeffs Z[G/K]
using MCochain = SparseVec<MTerm, MTermLess>;    // f(e_idx) = sum of cosets
using MPairChain = SparseVec<MPairTerm, MPairTermLess>;
using MPairCochain = SparseVec<MPairTerm, MPairTermLess>;

// d(e_i (x) key): boundary translates act on the key from the left-inverse
// side (coinvariants: u b (x) m = b (x) u^-1 m).
inline MChain mod_boundary(const Resolution& r, const CosetModule& m, int k,
                           const MChain& c) {
  MChain out;
  const Group& G = *r.group();
  for (const auto& [t, v] : c.terms()) {
    FreeChain d = r.boundary_cell(k, t.idx);
    for (const auto& [dc, dv] : d.terms())
      out.add(MTerm{dc.idx, m.canon(G.multiply(G.invert(dc.g), t.key))}, v * dv);
  }
  return out;
}

inline MPairChain mod_boundary_pair(const Resolution& r, const PairModule& m, int k,
                                    const MPairChain& c) {
  MPairChain out;
  const Group& G = *r.group();
  for (const auto& [t, v] : c.terms()) {
    FreeChain d = r.boundary_cell(k, t.idx);
    for (const auto& [dc, dv] : d.terms()) {
      Word ui = G.invert(dc.g);
      out.add(MPairTerm{dc.idx, m.first.canon(G.multiply(ui, t.key1)),
                        m.second.canon(G.multiply(ui, t.key2))},
              v * dv);
    }
  }
  return out;
}

// f(u * e_idx) = u * f(e_idx), as a list of (coset, coefficient) pairs.
inline std::vector<std::pair<Word, Integer>> evaluate(const CosetModule& m,
                                                      const MCochain& f, const Cell& cell) {
  std::vector<std::pair<Word, Integer>> out;
  const Group& G = *m.g;
  for (const auto& [t, v] : f.terms())
    if (t.idx == cell.idx) out.emplace_back(m.canon(G.multiply(cell.g, t.key)), v);
  return out;
}

// (delta f)(e) = f(d e); the sign-free convention, consistent with the
// sign-free cup and cap below (together they satisfy the textbook Leibniz
// rules and make the unit cocycle a two-sided identity on the nose).
inline MCochain mod_coboundary(const Resolution& r, const CosetModule& m, int q,
                               const MCochain& f) {
  MCochain out;
  for (int i = 0; i < r.rank(q + 1); ++i) {
    FreeChain d = r.boundary_cell(q + 1, i);
    for (const auto& [dc, dv] : d.terms())
      for (const auto& [key, v] : evaluate(m, f, dc)) out.add(MTerm{i, key}, dv * v);
  }
  return out;
}

inline std::vector<std::tuple<Word, Word, Integer>> evaluate_pair(const PairModule& m,
                                                                  const MPairCochain& f,
                                                                  const Cell& cell) {
  std::vector<std::tuple<Word, Word, Integer>> out;
  const Group& G = *m.first.g;
  for (const auto& [t, v] : f.terms())
    if (t.idx == cell.idx)
      out.emplace_back(m.first.canon(G.multiply(cell.g, t.key1)),
                       m.second.canon(G.multiply(cell.g, t.key2)), v);
  return out;
}

inline MPairCochain mod_coboundary_pair(const Resolution& r, const PairModule& m, int q,
                                        const MPairCochain& f) {
  MPairCochain out;
  for (int i = 0; i < r.rank(q + 1); ++i) {
    FreeChain d = r.boundary_cell(q + 1, i);
    for (const auto& [dc, dv] : d.terms())
      for (const auto& [k1, k2, v] : evaluate_pair(m, f, dc))
        out.add(MPairTerm{i, k1, k2}, dv * v);
  }
  return out;
}

// Cup product via the diagonal: (u cup v)(e) = sum over Delta(e) = sum x (x) y
// of u(x) v(y), landing in the pair module. Sign-free, matching the
// coboundary above: delta(u cup v) = delta(u) cup v + (-1)^|u| u cup delta(v).
inline MPairCochain cup(const DiagonalApproximation& diag, const CosetModule& m1,
                        const CosetModule& m2, int p, int q, const MCochain& u,
                        const MCochain& v) {
  MPairCochain out;
  const Resolution& r = diag.resolution();
  for (int i = 0; i < r.rank(p + q); ++i) {
    TensorChain dd = diag.diag_cell(p + q, i);
    for (const auto& [tc, w] : dd.terms()) {
      if (tc.p != p || tc.q != q) continue;
      auto ux = evaluate(m1, u, tc.a);
      if (ux.empty()) continue;
      auto vy = evaluate(m2, v, tc.b);
      for (const auto& [ka, ca] : ux)
        for (const auto& [kb, cb] : vy) out.add(MPairTerm{i, ka, kb}, w * ca * cb);
    }
  }
  return out;
}

// z cap f = (id (x) f)(Delta z), sign-free; the result is a degree (n - q)
// chain in coefficients, coinvariant-normalized. Against the coboundary
// above: d(z cap f) = (-1)^(n-q) z cap delta(f).
inline MChain cap_fundamental(const DiagonalApproximation& diag, const CosetModule& m,
                              int q, const MCochain& f) {
  MChain out;
  const Resolution& r = diag.resolution();
  const Group& G = *r.group();
  TensorChain dz = diag.apply(r.length(), r.fundamental_cycle());
  for (const auto& [tc, w] : dz.terms()) {
    if (tc.q != q) continue;
    for (const auto& [key, v] : evaluate(m, f, tc.b))
      out.add(MTerm{tc.a.idx, m.canon(G.multiply(G.invert(tc.a.g), key))}, w * v);
  }
  return out;
}

inline MPairChain cap_fundamental_pair(const DiagonalApproximation& diag,
                                       const PairModule& m, int q, const MPairCochain& f) {
  MPairChain out;
  const Resolution& r = diag.resolution();
  const Group& G = *r.group();
  TensorChain dz = diag.apply(r.length(), r.fundamental_cycle());
  for (const auto& [tc, w] : dz.terms()) {
    if (tc.q != q) continue;
    for (const auto& [k1, k2, v] : evaluate_pair(m, f, tc.b)) {
      Word xi = G.invert(tc.a.g);
      out.add(MPairTerm{tc.a.idx, m.first.canon(G.multiply(xi, k1)),
                        m.second.canon(G.multiply(xi, k2))},
              w * v);
    }
  }
  return out;
}

}  // namespace pd

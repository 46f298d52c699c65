#pragma once

#include "pdstring/resolution.hpp"

namespace pd {

// One term x (x) y of C_p (x) C_q with its bidegree; the group acts
// diagonally on the two translates.
struct TensorCell {
  int p = 0, q = 0;
  Cell a, b;
  friend bool operator==(const TensorCell&, const TensorCell&) = default;
};
struct TensorCellLess {
  bool operator()(const TensorCell& x, const TensorCell& y) const {
    if (x.p != y.p) return x.p < y.p;
    if (x.q != y.q) return x.q < y.q;
    CellLess cl;
    if (!(x.a == y.a)) return cl(x.a, y.a);
    return cl(x.b, y.b);
  }
};

class TensorChain {
 public:
  using Terms = std::map<TensorCell, Integer, TensorCellLess>;

  static TensorChain single(const TensorCell& c, Integer v = 1) {
    TensorChain t;
    t.add(c, v);
    return t;
  }

  void add(const TensorCell& cell, const Integer& v) {
    if (v == 0) return;
    auto [it, fresh] = t_.emplace(cell, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) t_.erase(it);
    }
  }
  void add(const TensorChain& o, const Integer& scale = 1) {
    for (const auto& [c, v] : o.t_) add(c, v * scale);
  }

  TensorChain translated(const Group& grp, const Word& u) const {
    TensorChain out;
    for (const auto& [c, v] : t_)
      out.add(TensorCell{c.p, c.q, Cell{c.a.idx, grp.multiply(u, c.a.g)},
                         Cell{c.b.idx, grp.multiply(u, c.b.g)}},
              v);
    return out;
  }

  bool empty() const { return t_.empty(); }
  const Terms& terms() const { return t_; }
  friend bool operator==(const TensorChain&, const TensorChain&) = default;

 private:
  Terms t_;
};

// d(x (x) y) = dx (x) y + (-1)^p x (x) dy.
inline TensorChain tensor_boundary(const Resolution& r, const TensorChain& t) {
  TensorChain out;
  const Group& G = *r.group();
  for (const auto& [c, v] : t.terms()) {
    if (c.p > 0) {
      FreeChain da = r.boundary_cell(c.p, c.a.idx);
      for (const auto& [dc, dv] : da.terms())
        out.add(TensorCell{c.p - 1, c.q, Cell{dc.idx, G.multiply(c.a.g, dc.g)}, c.b},
                v * dv);
    }
    if (c.q > 0) {
      Integer sign = (c.p % 2 == 0) ? 1 : -1;
      FreeChain db = r.boundary_cell(c.q, c.b.idx);
      for (const auto& [dc, dv] : db.terms())
        out.add(TensorCell{c.p, c.q - 1, c.a, Cell{dc.idx, G.multiply(c.b.g, dc.g)}},
                v * dv * sign);
    }
  }
  return out;
}

// Tensor contracting homotopy h(x (x) y) = h(x) (x) y + (unit eps)(x) (x) h(y);
// the second term only survives for p = 0, where (unit eps)(g e0) = e0.
inline TensorChain tensor_homotopy(const Resolution& r, const TensorChain& t) {
  TensorChain out;
  for (const auto& [c, v] : t.terms()) {
    FreeChain ha = r.homotopy_cell(c.p, c.a);
    for (const auto& [hc, hv] : ha.terms())
      out.add(TensorCell{c.p + 1, c.q, hc, c.b}, v * hv);
    if (c.p == 0) {
      FreeChain hb = r.homotopy_cell(c.q, c.b);
      for (const auto& [hc, hv] : hb.terms())
        out.add(TensorCell{0, c.q + 1, Cell{0, Word::one()}, hc}, v * hv);
    }
  }
  return out;
}

// (eps (x) id): keep p = 0 terms, drop the left factor.
inline FreeChain counit_left(const TensorChain& t) {
  FreeChain out;
  for (const auto& [c, v] : t.terms())
    if (c.p == 0) out.add(c.b, v);
  return out;
}

// (id (x) eps): keep q = 0 terms, drop the right factor.
inline FreeChain counit_right(const TensorChain& t) {
  FreeChain out;
  for (const auto& [c, v] : t.terms())
    if (c.q == 0) out.add(c.a, v);
  return out;
}

// Equivariant diagonal approximation C -> C (x) C lifting the identity of Z.
// Koszul gets the closed shuffle form; everything else is built degree by
// degree as Delta = h_tensor(Delta(d(cell))) from Delta(e0) = e0 (x) e0.
class DiagonalApproximation {
 public:
  explicit DiagonalApproximation(ResolutionPtr r) : r_(std::move(r)) {
    koszul_ = dynamic_cast<const KoszulResolution*>(r_.get());
  }

  const Resolution& resolution() const { return *r_; }

  TensorChain diag_cell(int k, int idx) const {
    std::pair<int, int> key{k, idx};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    TensorChain d = koszul_ ? shuffle_cell(k, idx) : inductive_cell(k, idx);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(d)).first->second;
  }

  TensorChain apply(int k, const FreeChain& c) const {
    TensorChain out;
    const Group& G = *r_->group();
    for (const auto& [cell, v] : c.terms())
      out.add(diag_cell(k, cell.idx).translated(G, cell.g), v);
    return out;
  }

  // Memo snapshot / prefill for persistent caching. Priming is logically
  // const: a primed entry must equal what diag_cell would compute.
  std::map<std::pair<int, int>, TensorChain> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_;
  }
  void prime(int k, int idx, TensorChain d) const {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(std::make_pair(k, idx), std::move(d));
  }

 private:
  // Delta(e_S) = sum over S = S1 (disjoint) S2 of
  //   (-1)^{#inversions(S1,S2)} e_S1 (x) t_S1 e_S2.
  TensorChain shuffle_cell(int k, int idx) const {
    TensorChain out;
    const std::vector<int>& s = koszul_->subset_of(k, idx);
    const auto* ab = static_cast<const FreeAbelianGroup*>(r_->group().get());
    const size_t n = s.size();
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
      std::vector<int> s1, s2;
      for (size_t j = 0; j < n; ++j) (mask >> j & 1 ? s1 : s2).push_back(s[j]);
      int inversions = 0;
      for (int i1 : s1)
        for (int j2 : s2)
          if (i1 > j2) ++inversions;
      std::vector<long> shift(size_t(ab->generator_count()), 0);
      for (int i1 : s1) shift[size_t(i1)] = 1;
      out.add(TensorCell{int(s1.size()), int(s2.size()),
                         Cell{koszul_->index_of(s1), Word::one()},
                         Cell{koszul_->index_of(s2), ab->word_of(shift)}},
              inversions % 2 == 0 ? 1 : -1);
    }
    return out;
  }

  TensorChain inductive_cell(int k, int idx) const {
    if (k == 0)
      return TensorChain::single(TensorCell{0, 0, Cell{0, Word::one()}, Cell{0, Word::one()}});
    FreeChain d = r_->boundary_cell(k, idx);
    TensorChain lower;
    const Group& G = *r_->group();
    for (const auto& [cell, v] : d.terms())
      lower.add(diag_cell(k - 1, cell.idx).translated(G, cell.g), v);
    return tensor_homotopy(*r_, lower);
  }

  ResolutionPtr r_;
  const KoszulResolution* koszul_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, TensorChain> cache_;
};

}  // namespace pd

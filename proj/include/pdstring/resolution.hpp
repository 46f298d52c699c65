#pragma once

#include <functional>
#include <map>
#include <numeric>

#include "pdstring/abelian_group.hpp"
#include "pdstring/free_abelian.hpp"
#include "pdstring/surface.hpp"

namespace pd {

// A translate of one free-module basis element: g * e_idx. Words are stored
// in normal form so cells compare and dedupe correctly.
struct Cell {
  int idx = 0;
  Word g;
  friend bool operator==(const Cell&, const Cell&) = default;
};
struct CellLess {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.idx != b.idx) return a.idx < b.idx;
    return shortlex_less(a.g, b.g);
  }
};

// Element of a free ZG-module with finitely many nonzero integer terms.
class FreeChain {
 public:
  using Terms = std::map<Cell, Integer, CellLess>;

  static FreeChain single(int idx, const Word& g, Integer v = 1) {
    FreeChain c;
    c.add(Cell{idx, g}, v);
    return c;
  }

  void add(const Cell& cell, const Integer& v) {
    if (v == 0) return;
    auto [it, fresh] = t_.emplace(cell, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) t_.erase(it);
    }
  }

  void add(const FreeChain& o, const Integer& scale = 1) {
    for (const auto& [c, v] : o.t_) add(c, v * scale);
  }

  // u * chain (module action; renormalizes translates).
  FreeChain translated(const Group& grp, const Word& u) const {
    FreeChain out;
    for (const auto& [c, v] : t_) out.add(Cell{c.idx, grp.multiply(u, c.g)}, v);
    return out;
  }

  bool empty() const { return t_.empty(); }
  const Terms& terms() const { return t_; }
  friend bool operator==(const FreeChain&, const FreeChain&) = default;

 private:
  Terms t_;
};

// Free resolution of Z over ZG, finite length, augmented, with an explicit
// contracting homotopy (exact degree-wise: dh + hd = id - unit*augmentation
// in degree 0, = id above). Homotopies are additive but not equivariant.
class Resolution {
 public:
  explicit Resolution(GroupPtr g) : g_(std::move(g)) {}
  virtual ~Resolution() = default;

  const GroupPtr& group() const { return g_; }
  int length() const { return g_->dimension(); }

  virtual int rank(int k) const = 0;
  // boundary of the identity translate of e_{k,idx}
  virtual FreeChain boundary_cell(int k, int idx) const = 0;
  virtual FreeChain homotopy_cell(int k, const Cell& cell) const = 0;
  virtual FreeChain fundamental_cycle() const = 0;  // degree length()

  // Stable display name of the identity translate of e_{k,idx}.
  virtual std::string cell_name(int k, int idx) const {
    return "c" + std::to_string(k) + "." + std::to_string(idx);
  }

  FreeChain boundary(int k, const FreeChain& c) const {
    FreeChain out;
    for (const auto& [cell, v] : c.terms())
      out.add(boundary_cell(k, cell.idx).translated(*g_, cell.g), v);
    return out;
  }

  FreeChain homotopy(int k, const FreeChain& c) const {
    FreeChain out;
    for (const auto& [cell, v] : c.terms()) out.add(homotopy_cell(k, cell), v);
    return out;
  }

  Integer epsilon(const FreeChain& c) const {
    Integer s = 0;
    for (const auto& [cell, v] : c.terms()) s += v;
    return s;
  }

 private:
  GroupPtr g_;
};

using ResolutionPtr = std::shared_ptr<const Resolution>;

// Koszul resolution of Z over Z[Z^n]: degree-k module is free on k-subsets
// S of the generators, d(e_S) = sum_j (-1)^(j-1) (t_{i_j} - 1) e_{S - i_j}.
// The homotopy is the tensor homotopy of n two-term complexes.
class KoszulResolution final : public Resolution {
 public:
  explicit KoszulResolution(GroupPtr g)
      : Resolution(g), ab_(dynamic_cast<const FreeAbelianGroup*>(g.get())) {
    PD_CHECK(ab_ != nullptr, "Koszul resolution needs a free abelian group");
    const int n = ab_->generator_count();
    subsets_.resize(size_t(n) + 1);
    std::vector<int> cur;
    build_subsets(0, n, cur);
    for (int k = 0; k <= n; ++k) {
      std::sort(subsets_[size_t(k)].begin(), subsets_[size_t(k)].end());
      for (size_t i = 0; i < subsets_[size_t(k)].size(); ++i)
        index_[subsets_[size_t(k)][i]] = int(i);
    }
  }

  int rank(int k) const override {
    if (k < 0 || k > length()) return 0;
    return int(subsets_[size_t(k)].size());
  }

  const std::vector<int>& subset_of(int k, int idx) const {
    return subsets_[size_t(k)][size_t(idx)];
  }
  int index_of(const std::vector<int>& s) const { return index_.at(s); }

  std::string cell_name(int k, int idx) const override {
    if (k == 0) return "pt";
    std::string out;
    for (int i : subset_of(k, idx)) {
      if (!out.empty()) out += "^";
      out += group()->generator_names()[size_t(i)];
    }
    return out;
  }

  FreeChain boundary_cell(int k, int idx) const override {
    FreeChain out;
    if (k <= 0 || k > length()) return out;
    const std::vector<int>& s = subset_of(k, idx);
    for (size_t j = 0; j < s.size(); ++j) {
      std::vector<int> sub = s;
      sub.erase(sub.begin() + long(j));
      int target = index_.at(sub);
      Integer sign = (j % 2 == 0) ? 1 : -1;
      out.add(Cell{target, Word::gen(s[j])}, sign);
      out.add(Cell{target, Word::one()}, -sign);
    }
    return out;
  }

  FreeChain homotopy_cell(int k, const Cell& cell) const override {
    FreeChain out;
    if (k < 0 || k >= length()) return out;
    const std::vector<int>& s = subset_of(k, cell.idx);
    const int stop = s.empty() ? ab_->generator_count() : s.front();
    std::vector<long> co = ab_->coords(cell.g);
    for (int i = 0; i < stop; ++i) {
      long ki = co[size_t(i)];
      if (ki == 0) continue;
      std::vector<int> sup = s;
      sup.insert(sup.begin(), i);
      int target = index_.at(sup);
      // translate: coords below i zeroed, i runs over the geometric range,
      // coords above i kept
      std::vector<long> base(co.size(), 0);
      for (size_t j = size_t(i) + 1; j < co.size(); ++j) base[j] = co[j];
      if (ki > 0) {
        for (long p = 0; p < ki; ++p) {
          base[size_t(i)] = p;
          out.add(Cell{target, ab_->word_of(base)}, 1);
        }
      } else {
        for (long p = ki; p <= -1; ++p) {
          base[size_t(i)] = p;
          out.add(Cell{target, ab_->word_of(base)}, -1);
        }
      }
    }
    return out;
  }

  // The top cell; with the sign-free cup/cap conventions this orientation
  // induces the standard intersection form (e_i . e_j = +[pt], i < j, on the
  // torus).
  FreeChain fundamental_cycle() const override {
    std::vector<int> full(static_cast<size_t>(length()));
    std::iota(full.begin(), full.end(), 0);
    return FreeChain::single(index_.at(full), Word::one());
  }

 private:
  void build_subsets(int from, int n, std::vector<int>& cur) {
    subsets_[cur.size()].push_back(cur);
    for (int i = from; i < n; ++i) {
      cur.push_back(i);
      build_subsets(i + 1, n, cur);
      cur.pop_back();
    }
  }

  const FreeAbelianGroup* ab_;
  std::vector<std::vector<std::vector<int>>> subsets_;  // by degree
  std::map<std::vector<int>, int> index_;
};

// The standard 2-dimensional resolution from the one-relator presentation of
// a surface group: ZG -> ZG^{2g} -> ZG, d2 = Fox derivatives of the relator,
// d1(e_x) = (x-1)e0. h0 telescopes along normal forms; h1 fills the loop
// nf(g) x nf(gx)^-1 with relator cells via Dehn's algorithm and verifies the
// filling exactly on every use.
class SurfaceResolution final : public Resolution {
 public:
  explicit SurfaceResolution(GroupPtr g)
      : Resolution(g), sg_(dynamic_cast<const SurfaceGroup*>(g.get())) {
    PD_CHECK(sg_ != nullptr, "surface resolution needs a surface group");
    const int genus = sg_->genus();
    Word prefix = Word::one();
    for (int i = 0; i < genus; ++i) {
      int a = 2 * i, b = 2 * i + 1;
      Word wa = Word::gen(a), wb = Word::gen(b);
      Word comm = wa * wb * wa.inverse() * wb.inverse();
      // d(r)/d(a_i) = p_i (1 - a b a^-1),  d(r)/d(b_i) = p_i (a - [a,b])
      fox_.add(Cell{a, sg_->normal_form(prefix)}, 1);
      fox_.add(Cell{a, sg_->normal_form(prefix * wa * wb * wa.inverse())}, -1);
      fox_.add(Cell{b, sg_->normal_form(prefix * wa)}, 1);
      fox_.add(Cell{b, sg_->normal_form(prefix * comm)}, -1);
      prefix = prefix * comm;
    }
  }

  int rank(int k) const override {
    if (k == 0 || k == 2) return 1;
    if (k == 1) return 2 * sg_->genus();
    return 0;
  }

  FreeChain boundary_cell(int k, int idx) const override {
    FreeChain out;
    if (k == 1) {
      out.add(Cell{0, Word::gen(idx)}, 1);
      out.add(Cell{0, Word::one()}, -1);
    } else if (k == 2) {
      PD_CHECK(idx == 0, "surface degree-2 basis");
      out = fox_;
    }
    return out;
  }

  FreeChain homotopy_cell(int k, const Cell& cell) const override {
    if (k == 0) return telescope(cell.g);
    if (k != 1) return FreeChain();
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = h1_cache_.find(cell);
      if (it != h1_cache_.end()) return it->second;
    }
    FreeChain out = fill_h1(cell);
    std::lock_guard<std::mutex> lock(mu_);
    return h1_cache_.emplace(cell, std::move(out)).first->second;
  }

  // The relator cell, oriented to match the free-abelian convention
  // (a_i . b_i = +[pt]).
  FreeChain fundamental_cycle() const override {
    return FreeChain::single(0, Word::one());
  }

  std::string cell_name(int k, int idx) const override {
    if (k == 0) return "pt";
    if (k == 1) return group()->generator_names()[size_t(idx)];
    return "sigma";
  }

 private:
  // h0(g e0): sum over letters of nf(g) of the edge cells of the path 1 -> g.
  FreeChain telescope(const Word& g) const {
    FreeChain out;
    Word prefix = Word::one();
    for (auto [gen, s] : sg_->normal_form(g).flat()) {
      if (s > 0) {
        out.add(Cell{gen, prefix}, 1);
        prefix = sg_->multiply(prefix, Word::gen(gen));
      } else {
        prefix = sg_->multiply(prefix, Word::gen(gen, -1));
        out.add(Cell{gen, prefix}, -1);
      }
    }
    return out;
  }

  FreeChain fill_h1(const Cell& cell) const {
    // target: c = g e_x - h0(d1(g e_x)); fill the loop word and verify.
    FreeChain c = FreeChain::single(cell.idx, cell.g);
    FreeChain d1 = boundary(1, FreeChain::single(cell.idx, cell.g));
    for (const auto& [c0, v] : d1.terms()) c.add(telescope(c0.g), -v);
    // loop word nf(g) * x * nf(g x)^-1; the way back must reverse the exact
    // path the telescope walks (normal forms do not commute with inversion)
    Word x = Word::gen(cell.idx);
    SurfaceGroup::Flat loop = sg_->normal_form(cell.g).flat();
    auto xf = x.flat();
    loop.insert(loop.end(), xf.begin(), xf.end());
    auto back = SurfaceGroup::inverse_flat(sg_->normal_form(sg_->multiply(cell.g, x)).flat());
    loop.insert(loop.end(), back.begin(), back.end());
    FreeChain w;
    for (auto& [translate, sign] : sg_->fill_trivial_word(loop))
      w.add(Cell{0, translate}, sign);
    PD_CHECK(boundary(2, w) == c, "surface h1: filling does not bound the loop");
    return w;
  }

  const SurfaceGroup* sg_;
  FreeChain fox_;
  mutable std::mutex mu_;
  mutable std::map<Cell, FreeChain, CellLess> h1_cache_;
};

inline ResolutionPtr make_resolution(const GroupPtr& g) {
  if (g->kind() == Group::Kind::FreeAbelian)
    return std::make_shared<KoszulResolution>(g);
  return std::make_shared<SurfaceResolution>(g);
}

// Boundary matrix of the coinvariant complex C_k tensor_G Z (kill the group
// action, keep integer coefficients): columns indexed by degree-k basis.
inline IntegerMatrix coinvariant_boundary_matrix(const Resolution& r, int k) {
  const int rows = r.rank(k - 1), cols = r.rank(k);
  IntegerMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    FreeChain d = r.boundary_cell(k, j);
    for (const auto& [cell, v] : d.terms()) m.at(cell.idx, j) += v;
  }
  return m;
}

// H_k(G; Z) presented by the coinvariant complex.
inline FGAbelianGroup group_homology(const Resolution& r, int k) {
  PD_CHECK(k >= 0, "group_homology degree");
  if (r.rank(k) == 0) return homology_of_pair(IntegerMatrix(0, 0), IntegerMatrix(0, 0));
  return homology_of_pair(coinvariant_boundary_matrix(r, k + 1),
                          coinvariant_boundary_matrix(r, k));
}

}  // namespace pd

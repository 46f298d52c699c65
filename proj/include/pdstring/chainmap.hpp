#pragma once

#include "pdstring/resolution.hpp"
#include "pdstring/subgroup.hpp"

namespace pd {

// Chain map between resolutions over a group morphism phi, lifting the
// identity of Z: f(e0) = e0 and f(cell) = h(f(d cell)) on identity
// translates, extended phi-equivariantly. Exactness of the target and
// epsilon-preservation make the result a chain map automatically.
class ChainMap {
 public:
  ChainMap(ResolutionPtr src, ResolutionPtr dst, std::function<Word(const Word&)> phi)
      : src_(std::move(src)), dst_(std::move(dst)), phi_(std::move(phi)) {}

  const Resolution& source() const { return *src_; }
  const Resolution& target() const { return *dst_; }
  Word morph(const Word& g) const { return phi_(g); }

  FreeChain apply(int k, const FreeChain& c) const {
    FreeChain out;
    const Group& T = *dst_->group();
    for (const auto& [cell, v] : c.terms())
      out.add(cell_image(k, cell.idx).translated(T, phi_(cell.g)), v);
    return out;
  }

  FreeChain cell_image(int k, int idx) const {
    const std::pair<int, int> key{k, idx};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    FreeChain img = k == 0 ? FreeChain::single(0, Word::one())
                           : dst_->homotopy(k - 1, apply(k - 1, src_->boundary_cell(k, idx)));
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(img)).first->second;
  }

  // Memo snapshot / prefill for persistent caching. Priming is logically
  // const: a primed entry must equal what cell_image would compute.
  std::map<std::pair<int, int>, FreeChain> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_;
  }
  void prime(int k, int idx, FreeChain img) const {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(std::make_pair(k, idx), std::move(img));
  }

 private:
  ResolutionPtr src_, dst_;
  std::function<Word(const Word&)> phi_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, FreeChain> cache_;
};

// K-equivariant comparison map from the ambient resolution, viewed as a
// complex of K-modules, to the resolution of K's abstract model, lifting the
// identity of Z. A translate splits through its right coset: u = k^-1 rep
// with rep canonical, the image of rep * e_idx is built inductively through
// the target homotopy, and k moves across via the abstract coordinates.
class SubgroupRestriction {
 public:
  SubgroupRestriction(Subgroup k, ResolutionPtr ambient, ResolutionPtr abstract_res)
      : k_(std::move(k)), amb_(std::move(ambient)), abs_(std::move(abstract_res)) {
    PD_CHECK(amb_->group()->describe() == k_.ambient()->describe(),
             "restriction: ambient resolution mismatch");
    PD_CHECK(abs_->group()->describe() == k_.abstract_group()->describe(),
             "restriction: abstract resolution mismatch");
  }

  const Subgroup& subgroup() const { return k_; }
  const Resolution& target() const { return *abs_; }

  FreeChain apply(int deg, const FreeChain& c) const {
    if (k_.kind() == Subgroup::Kind::Whole) return c;  // abstract model is ambient
    FreeChain out;
    const Group& G = *amb_->group();
    const Group& A = *abs_->group();
    for (const auto& [cell, v] : c.terms()) {
      CosetRep rc = k_.right_coset(cell.g);
      auto aw = k_.abstract_of(G.invert(rc.k));
      PD_CHECK(aw.has_value(), "restriction: coset member is not in the subgroup");
      out.add(rep_image(deg, cell.idx, rc.rep).translated(A, *aw), v);
    }
    return out;
  }

 private:
  FreeChain rep_image(int deg, int idx, const Word& rep) const {
    const std::pair<int, int> key{deg, idx};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_[key].find(rep);
      if (it != cache_[key].end()) return it->second;
    }
    FreeChain img;
    if (deg == 0) {
      img = FreeChain::single(0, Word::one());
    } else {
      FreeChain d = amb_->boundary_cell(deg, idx).translated(*amb_->group(), rep);
      img = abs_->homotopy(deg - 1, apply(deg - 1, d));
    }
    std::lock_guard<std::mutex> lock(mu_);
    return cache_[key].emplace(rep, std::move(img)).first->second;
  }

  Subgroup k_;
  ResolutionPtr amb_, abs_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::map<Word, FreeChain, Word::ShortLex>> cache_;
};

}  // namespace pd

#pragma once

#include <algorithm>
#include <set>

#include "pdstring/chainmap.hpp"
#include "pdstring/module_coeffs.hpp"

namespace pd {

// Transport kit for one subgroup K of the ambient group: the induction
// equivalence between homology of K's abstract model with Z coefficients and
// ambient homology with Z[G/K] coefficients, realized on chains in both
// directions.
struct ShapiroData {
  Subgroup k;
  ResolutionPtr amb, abs;
  std::shared_ptr<const ChainMap> fwd;              // R_abs -> R_amb over embed
  std::shared_ptr<const SubgroupRestriction> back;  // R_amb|_K -> R_abs
  CosetModule mod;
};

inline ShapiroData make_shapiro(const Subgroup& k, ResolutionPtr amb) {
  ResolutionPtr abs = make_resolution(k.abstract_group());
  Subgroup kc = k;
  auto fwd =
      std::make_shared<const ChainMap>(abs, amb, [kc](const Word& w) { return kc.embed(w); });
  auto back = std::make_shared<const SubgroupRestriction>(k, amb, abs);
  CosetModule mod{amb->group(), k};
  return ShapiroData{k, std::move(amb), std::move(abs), std::move(fwd), std::move(back),
                     std::move(mod)};
}

// Coinvariant cycle of the abstract complex -> chain with coset coefficients:
// e_i (x) 1 goes to fwd(e_i) (x) K, then each translate moves into the key.
inline MChain shapiro_forward(const ShapiroData& s, int deg, const std::vector<Integer>& coeffs) {
  PD_CHECK((int)coeffs.size() == s.abs->rank(deg), "shapiro_forward shape");
  MChain out;
  const Group& G = *s.amb->group();
  for (int idx = 0; idx < (int)coeffs.size(); ++idx) {
    if (coeffs[size_t(idx)] == 0) continue;
    FreeChain img = s.fwd->cell_image(deg, idx);
    for (const auto& [cell, v] : img.terms())
      out.add(MTerm{cell.idx, s.mod.canon(G.invert(cell.g))}, coeffs[size_t(idx)] * v);
  }
  return out;
}

// Chain with coset coefficients -> coinvariant vector of the abstract
// complex: b (x) wK rewrites to w^-1 b (x) K, restricts along K, and the
// abstract translates die in coinvariants.
inline std::vector<Integer> shapiro_backward(const ShapiroData& s, int deg, const MChain& c) {
  std::vector<Integer> out(size_t(s.abs->rank(deg)), 0);
  const Group& G = *s.amb->group();
  for (const auto& [t, v] : c.terms()) {
    FreeChain img = s.back->apply(deg, FreeChain::single(t.idx, G.invert(t.key)));
    for (const auto& [cell, w] : img.terms()) out[size_t(cell.idx)] += v * w;
  }
  return out;
}

// Homology coordinates of a cycle with coset coefficients.
inline std::vector<Integer> reduce_class(const ShapiroData& s, const FGAbelianGroup& h,
                                         int deg, const MChain& c) {
  return h.reduce(shapiro_backward(s, deg, c));
}

// Duality map: cocycles of degree q to cycles of degree (dimension - q).
inline MChain duality_cap(const DiagonalApproximation& diag, const ShapiroData& s, int q,
                          const MCochain& phi) {
  return cap_fundamental(diag, s.mod, q, phi);
}

// Exact inverse image under cap with the fundamental class: a degree-q
// cocycle phi with [z cap phi] = [c]. Unknown values live on coset keys
// drawn from balls of growing radius; each candidate system is solved over
// the integers, and a solution is re-verified independently before being
// returned. Throws BoundExceeded when the window cap is hit.
inline MCochain duality_inverse(const DiagonalApproximation& diag, const ShapiroData& s,
                                const FGAbelianGroup& h, int q, const MChain& c) {
  const Resolution& r = diag.resolution();
  const Group& G = *r.group();
  const int n = r.length(), deg = n - q;
  PD_CHECK(q >= 0 && q <= n, "duality_inverse degree");
  if (deg > 0)
    PD_CHECK(mod_boundary(r, s.mod, deg, c).empty(), "duality_inverse: target is not a cycle");
  const std::vector<Integer> target = h.reduce(shapiro_backward(s, deg, c));

  // per-unknown data, reused as the window grows
  struct UnknownData {
    MCochain delta;                 // coboundary of the unit cochain
    std::vector<Integer> backward;  // coinvariant image of z cap unit
  };
  std::map<MTerm, UnknownData, MTermLess> data;

  const int max_radius = G.options().max_window_radius;
  constexpr size_t kMaxWindowWords = 20000;
  const IntegerMatrix slack_src = coinvariant_boundary_matrix(*s.abs, deg + 1);

  // initial window: smallest radius that can express the target's own keys;
  // deepen from there so the certified window is as small as possible
  long start = 1;
  for (const auto& [t, v] : c.terms()) start = std::max(start, t.key.length());

  for (int radius = (int)start; radius <= max_radius; ++radius) {
    if (G.ball(radius).size() > 10 * kMaxWindowWords)
      throw BoundExceeded("duality inverse: window at radius " + std::to_string(radius) +
                          " exceeds " + std::to_string(10 * kMaxWindowWords) + " words");
    std::set<Word, Word::ShortLex> keys;
    for (const Word& w : G.ball(radius)) keys.insert(s.mod.canon(w));

    std::vector<MTerm> vars;
    for (int i = 0; i < r.rank(q); ++i)
      for (const Word& key : keys) vars.push_back(MTerm{i, key});
    if (vars.size() > kMaxWindowWords)
      throw BoundExceeded("duality inverse: " + std::to_string(vars.size()) +
                          " unknowns at radius " + std::to_string(radius) + " exceed " +
                          std::to_string(kMaxWindowWords));
    for (const MTerm& u : vars) {
      if (data.count(u)) continue;
      MCochain unit;
      unit.add(u, 1);
      UnknownData d;
      d.delta = mod_coboundary(r, s.mod, q, unit);
      d.backward = shapiro_backward(s, deg, duality_cap(diag, s, q, unit));
      data.emplace(u, std::move(d));
    }

    // rows: one per coboundary term seen, then the coinvariant class rows
    std::map<MTerm, int, MTermLess> corow;
    for (const MTerm& u : vars)
      for (const auto& [t, v] : data.at(u).delta.terms())
        corow.emplace(t, (int)corow.size());
    const int nco = (int)corow.size();
    const int nclass = s.abs->rank(deg);
    const int nx = (int)vars.size(), ns = slack_src.cols();
    IntegerMatrix a(nco + nclass, nx + ns);
    std::vector<Integer> b(size_t(nco + nclass), 0);
    for (int j = 0; j < nx; ++j) {
      const UnknownData& d = data.at(vars[size_t(j)]);
      for (const auto& [t, v] : d.delta.terms()) a.at(corow.at(t), j) += v;
      for (int i = 0; i < nclass; ++i) a.at(nco + i, j) = d.backward[size_t(i)];
    }
    for (int j = 0; j < ns; ++j)
      for (int i = 0; i < nclass; ++i) a.at(nco + i, nx + j) = -slack_src.at(i, j);
    std::vector<Integer> tvec = shapiro_backward(s, deg, c);
    for (int i = 0; i < nclass; ++i) b[size_t(nco + i)] = tvec[size_t(i)];

    auto sol = solve_integer_linear(a, b);
    if (!sol) continue;
    MCochain phi;
    for (int j = 0; j < nx; ++j) phi.add(vars[size_t(j)], (*sol)[size_t(j)]);

    // independent verification of both defining properties
    PD_CHECK(mod_coboundary(r, s.mod, q, phi).empty(), "duality inverse: not a cocycle");
    MChain zc = duality_cap(diag, s, q, phi);
    PD_CHECK(reduce_class(s, h, deg, zc) == target, "duality inverse: wrong class");
    return phi;
  }
  throw BoundExceeded("duality inverse: no cocycle within window radius " +
                      std::to_string(max_radius));
}

}  // namespace pd

#pragma once

#include <memory>
#include <numeric>
#include <sstream>

#include "pdstring/free_abelian.hpp"
#include "pdstring/matrix.hpp"
#include "pdstring/surface.hpp"

namespace pd {

// Canonical coset representative plus the member that realizes it:
// left coset gK:  rep = g * k;  right coset Kg:  rep = k * g  (k in K).
struct CosetRep {
  Word rep;
  Word k;
};

// rep = k * g * h with k in K, h in H.
struct DoubleCosetRep {
  Word rep;
  Word k;
  Word h;
};

// The subgroups the engine works with: the whole group, the trivial group,
// maximal-cyclic-type subgroups of a surface group, and sublattices of Z^n.
// Descriptors are canonical (cyclic roots ShortLex-minimized against their
// inverses, lattices in Hermite form), so equal subgroups compare equal.
class Subgroup {
 public:
  enum class Kind { Whole, Trivial, Cyclic, Lattice };

  static Subgroup whole(GroupPtr g) {
    auto st = std::make_shared<State>();
    st->kind = Kind::Whole;
    st->ambient = g;
    st->abstract_grp = g;
    st->id = "whole";
    return Subgroup(std::move(st));
  }

  static Subgroup trivial(GroupPtr g) {
    auto st = std::make_shared<State>();
    st->kind = Kind::Trivial;
    st->ambient = g;
    st->abstract_grp = std::make_shared<FreeAbelianGroup>(0, g->options());
    st->id = "trivial";
    return Subgroup(std::move(st));
  }

  static Subgroup cyclic(GroupPtr g, const Word& generator) {
    Word r = g->normal_form(generator);
    if (r.is_one()) return trivial(g);
    if (auto* ab = dynamic_cast<const FreeAbelianGroup*>(g.get())) {
      IntegerMatrix row(1, ab->generator_count());
      std::vector<long> v = ab->coords(r);
      for (int j = 0; j < row.cols(); ++j) row.at(0, j) = v[size_t(j)];
      return lattice(g, row);
    }
    Word ri = g->invert(r);
    auto st = std::make_shared<State>();
    st->kind = Kind::Cyclic;
    st->ambient = g;
    st->root = shortlex_less(ri, r) ? ri : r;
    st->abstract_grp = std::make_shared<FreeAbelianGroup>(1, g->options());
    st->id = "cyclic[" + g->format(st->root) + "]";
    return Subgroup(std::move(st));
  }

  static Subgroup lattice(GroupPtr g, const IntegerMatrix& rows) {
    auto* ab = dynamic_cast<const FreeAbelianGroup*>(g.get());
    PD_CHECK(ab != nullptr, "lattice subgroup needs a free abelian ambient");
    PD_CHECK(rows.cols() == ab->generator_count(), "lattice row width");
    IntegerMatrix h = hermite_row_basis(rows);
    if (h.rows() == 0) return trivial(g);
    if (h == IntegerMatrix::identity(h.cols())) return whole(g);
    auto st = std::make_shared<State>();
    st->kind = Kind::Lattice;
    st->ambient = g;
    st->basis = h;
    st->abstract_grp = std::make_shared<FreeAbelianGroup>(h.rows(), g->options());
    std::ostringstream os;
    os << "lattice[";
    for (int i = 0; i < h.rows(); ++i) {
      if (i) os << ';';
      for (int j = 0; j < h.cols(); ++j) {
        if (j) os << ',';
        os << h.at(i, j).get_str();
      }
    }
    os << ']';
    st->id = os.str();
    return Subgroup(std::move(st));
  }

  Kind kind() const { return st_->kind; }
  const GroupPtr& ambient() const { return st_->ambient; }
  const Word& root() const {
    PD_CHECK(st_->kind == Kind::Cyclic, "root of non-cyclic subgroup");
    return st_->root;
  }
  const IntegerMatrix& basis() const {
    PD_CHECK(st_->kind == Kind::Lattice, "basis of non-lattice subgroup");
    return st_->basis;
  }

  // The subgroup as a standalone group (Z^m for lattice/cyclic/trivial, the
  // ambient itself for the whole subgroup); resolutions are built over this.
  const GroupPtr& abstract_group() const { return st_->abstract_grp; }

  const std::string& id() const { return st_->id; }
  std::string full_id() const { return st_->ambient->describe() + "/" + st_->id; }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.full_id() == b.full_id();
  }
  struct Less {
    bool operator()(const Subgroup& a, const Subgroup& b) const {
      return a.full_id() < b.full_id();
    }
  };

  bool contains(const Word& g) const {
    const Group& G = *st_->ambient;
    switch (st_->kind) {
      case Kind::Whole:
        return true;
      case Kind::Trivial:
        return G.is_identity(g);
      case Kind::Cyclic:
        return G.power_of(st_->root, g).has_value();
      case Kind::Lattice:
        return solve_in_lattice(g).has_value();
    }
    return false;
  }

  // Translate a word of the abstract group into the ambient group.
  Word embed(const Word& w) const {
    const Group& G = *st_->ambient;
    switch (st_->kind) {
      case Kind::Whole:
        return G.normal_form(w);
      case Kind::Trivial:
        PD_CHECK(w.is_one(), "embed: nontrivial word in trivial subgroup");
        return Word::one();
      case Kind::Cyclic: {
        auto* ab = static_cast<const FreeAbelianGroup*>(st_->abstract_grp.get());
        return power_word(ab->coords(w)[0]);
      }
      case Kind::Lattice: {
        auto* ab = static_cast<const FreeAbelianGroup*>(st_->abstract_grp.get());
        std::vector<long> x = ab->coords(w);
        std::vector<long> v(size_t(st_->basis.cols()), 0);
        for (int i = 0; i < st_->basis.rows(); ++i)
          for (int j = 0; j < st_->basis.cols(); ++j)
            v[size_t(j)] += x[size_t(i)] * to_long(st_->basis.at(i, j));
        return ambient_abelian()->word_of(v);
      }
    }
    return Word::one();
  }

  // Inverse of embed on members; nullopt for non-members.
  std::optional<Word> abstract_of(const Word& g) const {
    const Group& G = *st_->ambient;
    switch (st_->kind) {
      case Kind::Whole:
        return G.normal_form(g);
      case Kind::Trivial:
        if (G.is_identity(g)) return Word::one();
        return std::nullopt;
      case Kind::Cyclic: {
        auto m = G.power_of(st_->root, g);
        if (!m) return std::nullopt;
        return Word::gen(0, *m);
      }
      case Kind::Lattice: {
        auto x = solve_in_lattice(g);
        if (!x) return std::nullopt;
        std::vector<Letter> ls;
        for (int i = 0; i < st_->basis.rows(); ++i)
          if ((*x)[size_t(i)] != 0) ls.push_back({i, to_long((*x)[size_t(i)])});
        return Word(std::move(ls));
      }
    }
    return std::nullopt;
  }

  CosetRep left_coset(const Word& g) const { return coset(g, true); }
  CosetRep right_coset(const Word& g) const { return coset(g, false); }

  // nf(root^m), cached (cyclic subgroups only).
  Word power_word(long m) const {
    PD_CHECK(st_->kind == Kind::Cyclic, "power_word of non-cyclic subgroup");
    const Group& G = *st_->ambient;
    std::lock_guard<std::mutex> lock(st_->mu);
    auto it = st_->powers.find(m);
    if (it != st_->powers.end()) return it->second;
    long base = 0;
    for (auto& [mm, ww] : st_->powers)
      if ((m >= 0) == (mm >= 0) && std::abs(mm) <= std::abs(m) &&
          std::abs(mm) > std::abs(base))
        base = mm;
    Word v = base == 0 ? Word::one() : st_->powers.at(base);
    Word step = m >= 0 ? st_->root : G.invert(st_->root);
    for (long i = std::abs(base); i < std::abs(m); ++i) v = G.multiply(v, step);
    return st_->powers.emplace(m, v).first->second;
  }

 private:
  struct State {
    Kind kind = Kind::Trivial;
    GroupPtr ambient;
    Word root;
    IntegerMatrix basis;
    GroupPtr abstract_grp;
    std::string id;
    mutable std::mutex mu;
    mutable std::map<long, Word> powers;
    mutable std::unordered_map<Word, CosetRep, WordHash> left_cache, right_cache;
  };

  explicit Subgroup(std::shared_ptr<State> st) : st_(std::move(st)) {}

  const FreeAbelianGroup* ambient_abelian() const {
    auto* ab = dynamic_cast<const FreeAbelianGroup*>(st_->ambient.get());
    PD_CHECK(ab != nullptr, "operation needs a free abelian ambient");
    return ab;
  }

  static long to_long(const Integer& v) {
    PD_CHECK(v.fits_slong_p(), "coordinate exceeds machine range");
    return v.get_si();
  }

  std::optional<std::vector<Integer>> solve_in_lattice(const Word& g) const {
    std::vector<long> v = ambient_abelian()->coords(st_->ambient->normal_form(g));
    std::vector<Integer> b(v.begin(), v.end());
    return solve_integer_linear(transpose(st_->basis), b);
  }

  CosetRep coset(const Word& g, bool left) const {
    const Group& G = *st_->ambient;
    Word key = G.normal_form(g);
    auto& cache = left ? st_->left_cache : st_->right_cache;
    {
      std::lock_guard<std::mutex> lock(st_->mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    CosetRep out = compute_coset(key, left);
    if (st_->ambient->options().debug_checks) {
      Word check = left ? G.multiply(key, out.k) : G.multiply(out.k, key);
      PD_CHECK(check == out.rep, "coset witness check");
      PD_CHECK(contains(out.k), "coset witness membership");
    }
    std::lock_guard<std::mutex> lock(st_->mu);
    return cache.emplace(key, out).first->second;
  }

  CosetRep compute_coset(const Word& g, bool left) const {
    const Group& G = *st_->ambient;
    switch (st_->kind) {
      case Kind::Whole:
        return {Word::one(), G.invert(g)};
      case Kind::Trivial:
        return {g, Word::one()};
      case Kind::Lattice: {
        // Hermite residue: unique coset representative, no search needed.
        std::vector<long> vl = ambient_abelian()->coords(g);
        std::vector<Integer> v(vl.begin(), vl.end());
        std::vector<Integer> kvec(v.size(), 0);
        const IntegerMatrix& B = st_->basis;
        for (int i = 0; i < B.rows(); ++i) {
          int pc = 0;
          while (B.at(i, pc) == 0) ++pc;
          Integer q = floor_quotient(v[size_t(pc)], B.at(i, pc));
          for (int j = 0; j < B.cols(); ++j) {
            v[size_t(j)] -= q * B.at(i, j);
            kvec[size_t(j)] -= q * B.at(i, j);
          }
        }
        std::vector<long> rep(v.size()), kk(v.size());
        for (size_t j = 0; j < v.size(); ++j) rep[j] = to_long(v[j]), kk[j] = to_long(kvec[j]);
        return {ambient_abelian()->word_of(rep), ambient_abelian()->word_of(kk)};
      }
      case Kind::Cyclic: {
        const long cap = G.options().coset_search_radius;
        Word rep = g;
        long total = 0;
        for (;;) {
          const long M = std::min(cap, 2 * rep.length() + 16);
          Word best = rep;
          long bestm = 0;
          Word fwd = rep, bwd = rep;
          Word rootw = st_->root, rinv = G.invert(st_->root);
          for (long m = 1; m <= M; ++m) {
            fwd = left ? G.multiply(fwd, rootw) : G.multiply(rootw, fwd);
            bwd = left ? G.multiply(bwd, rinv) : G.multiply(rinv, bwd);
            if (shortlex_less(fwd, best)) best = fwd, bestm = m;
            if (shortlex_less(bwd, best)) best = bwd, bestm = -m;
          }
          if (bestm == 0) {
            if (2 * rep.length() + 16 > cap)
              throw BoundExceeded("coset window " + std::to_string(2 * rep.length() + 16) +
                                  " exceeds coset_search_radius=" + std::to_string(cap));
            return {rep, power_word(total)};
          }
          rep = best;
          total += bestm;
        }
      }
    }
    return {g, Word::one()};
  }

  std::shared_ptr<State> st_;
};

inline Subgroup centralizer_of(const GroupPtr& g, const Word& w) {
  if (g->kind() == Group::Kind::FreeAbelian || g->is_identity(w)) return Subgroup::whole(g);
  return Subgroup::cyclic(g, g->primitive_root(w).first);
}

inline Subgroup conjugate_subgroup(const Subgroup& k, const Word& a) {
  const Group& G = *k.ambient();
  switch (k.kind()) {
    case Subgroup::Kind::Whole:
    case Subgroup::Kind::Trivial:
    case Subgroup::Kind::Lattice:
      return k;  // normal (whole/trivial) or abelian ambient
    case Subgroup::Kind::Cyclic:
      return Subgroup::cyclic(k.ambient(), G.multiply(G.multiply(a, k.root()), G.invert(a)));
  }
  return k;
}

namespace detail {
inline IntegerMatrix subgroup_rows(const Subgroup& s) {
  const int n = s.ambient()->generator_count();
  switch (s.kind()) {
    case Subgroup::Kind::Whole:
      return IntegerMatrix::identity(n);
    case Subgroup::Kind::Trivial:
      return IntegerMatrix(0, n);
    case Subgroup::Kind::Lattice:
      return s.basis();
    case Subgroup::Kind::Cyclic:
      break;
  }
  PD_CHECK(false, "subgroup_rows: cyclic in abelian ambient is normalized away");
  return IntegerMatrix(0, n);
}

inline IntegerMatrix vstack(const IntegerMatrix& a, const IntegerMatrix& b) {
  PD_CHECK(a.cols() == b.cols(), "vstack widths");
  IntegerMatrix m(a.rows() + b.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) m.at(a.rows() + i, j) = b.at(i, j);
  return m;
}
}  // namespace detail

inline Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  PD_CHECK(a.ambient()->describe() == b.ambient()->describe(), "intersect ambients");
  if (a.kind() == Subgroup::Kind::Whole) return b;
  if (b.kind() == Subgroup::Kind::Whole) return a;
  if (a.kind() == Subgroup::Kind::Trivial || b.kind() == Subgroup::Kind::Trivial)
    return Subgroup::trivial(a.ambient());
  if (a.kind() == Subgroup::Kind::Lattice && b.kind() == Subgroup::Kind::Lattice) {
    // left kernel of [A; B]: rows x with x_A * A = x_B * B give the meet
    IntegerMatrix stacked = detail::vstack(a.basis(), b.basis());
    SmithForm s = smith_normal_form(transpose(stacked));
    const int total = stacked.rows();
    IntegerMatrix meet(total - s.rank, stacked.cols());
    for (int t = s.rank; t < total; ++t) {
      for (int i = 0; i < a.basis().rows(); ++i)
        for (int j = 0; j < stacked.cols(); ++j)
          meet.at(t - s.rank, j) += s.v.at(i, t) * a.basis().at(i, j);
    }
    return Subgroup::lattice(a.ambient(), meet);
  }
  PD_CHECK(a.kind() == Subgroup::Kind::Cyclic && b.kind() == Subgroup::Kind::Cyclic,
           "intersect kinds");
  const Group& G = *a.ambient();
  auto [ra, na] = G.primitive_root(a.root());
  auto [rb, nb] = G.primitive_root(b.root());
  Word ca = shortlex_less(G.invert(ra), ra) ? G.invert(ra) : ra;
  Word cb = shortlex_less(G.invert(rb), rb) ? G.invert(rb) : rb;
  if (!(ca == cb)) return Subgroup::trivial(a.ambient());
  long l = std::lcm(na, nb);
  Word gen = Word::one();
  for (long i = 0; i < l; ++i) gen = G.multiply(gen, ca);
  return Subgroup::cyclic(a.ambient(), gen);
}

inline DoubleCosetRep double_coset(const Subgroup& K, const Word& g, const Subgroup& H) {
  PD_CHECK(K.ambient()->describe() == H.ambient()->describe(), "double_coset ambients");
  const Group& G = *K.ambient();
  Word gn = G.normal_form(g);
  if (G.kind() == Group::Kind::FreeAbelian) {
    auto* ab = dynamic_cast<const FreeAbelianGroup*>(K.ambient().get());
    IntegerMatrix ka = detail::subgroup_rows(K), hb = detail::subgroup_rows(H);
    IntegerMatrix stacked = detail::vstack(ka, hb);
    Subgroup sum = Subgroup::lattice(K.ambient(), stacked);
    CosetRep rep = sum.left_coset(gn);
    // split rep.k = k + h across the stacked generators
    std::vector<long> dl = ab->coords(rep.k);
    std::vector<Integer> delta(dl.begin(), dl.end());
    std::vector<long> kvec(size_t(stacked.cols()), 0), hvec(size_t(stacked.cols()), 0);
    if (stacked.rows() > 0) {
      auto x = solve_integer_linear(transpose(stacked), delta);
      PD_CHECK(x.has_value(), "double_coset: witness split");
      for (int i = 0; i < ka.rows(); ++i)
        for (int j = 0; j < stacked.cols(); ++j)
          kvec[size_t(j)] += long((*x)[size_t(i)].get_si()) * long(ka.at(i, j).get_si());
      for (int i = 0; i < hb.rows(); ++i)
        for (int j = 0; j < stacked.cols(); ++j)
          hvec[size_t(j)] += long((*x)[size_t(ka.rows() + i)].get_si()) *
                             long(hb.at(i, j).get_si());
    }
    return {rep.rep, ab->word_of(kvec), ab->word_of(hvec)};
  }
  if (K.kind() == Subgroup::Kind::Whole) return {Word::one(), G.invert(gn), Word::one()};
  if (H.kind() == Subgroup::Kind::Whole) return {Word::one(), Word::one(), G.invert(gn)};
  if (K.kind() == Subgroup::Kind::Trivial) {
    CosetRep c = H.left_coset(gn);
    return {c.rep, Word::one(), c.k};
  }
  if (H.kind() == Subgroup::Kind::Trivial) {
    CosetRep c = K.right_coset(gn);
    return {c.rep, c.k, Word::one()};
  }
  // cyclic x cyclic: window fixpoint over nf(r^m * g * s^l)
  const long cap = G.options().coset_search_radius;
  Word rep = gn, kacc = Word::one(), hacc = Word::one();
  const Word hstep = H.power_word(1), hstep_inv = H.power_word(-1);
  for (;;) {
    const long M = std::min(cap, 2 * rep.length() + 16);
    Word best = rep;
    long bestm = 0, bestl = 0;
    for (long m = -M; m <= M; ++m) {
      Word row = G.multiply(K.power_word(m), rep);
      if (shortlex_less(row, best)) best = row, bestm = m, bestl = 0;
      Word fwd = row, bwd = row;
      for (long l = 1; l <= M; ++l) {
        fwd = G.multiply(fwd, hstep);
        bwd = G.multiply(bwd, hstep_inv);
        if (shortlex_less(fwd, best)) best = fwd, bestm = m, bestl = l;
        if (shortlex_less(bwd, best)) best = bwd, bestm = m, bestl = -l;
      }
    }
    if (bestm == 0 && bestl == 0) break;
    kacc = G.multiply(K.power_word(bestm), kacc);
    hacc = G.multiply(hacc, H.power_word(bestl));
    rep = best;
  }
  if (2 * rep.length() + 16 > cap)
    throw BoundExceeded("double coset window " + std::to_string(2 * rep.length() + 16) +
                        " exceeds coset_search_radius=" + std::to_string(cap));
  if (G.options().debug_checks)
    PD_CHECK(G.multiply(G.multiply(kacc, gn), hacc) == rep, "double coset witness");
  return {rep, kacc, hacc};
}

}  // namespace pd

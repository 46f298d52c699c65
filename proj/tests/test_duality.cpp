#include <catch2/catch_amalgamated.hpp>

#include <pdstring/builtin.hpp>
#include <pdstring/duality.hpp>

#include <random>

using namespace pd;

namespace {

Word random_word(const Group& g, std::mt19937& rng, int len) {
  Word w = Word::one();
  for (int i = 0; i < len; ++i)
    w = w * Word::gen(int(rng() % unsigned(g.generator_count())), rng() % 2 ? 1 : -1);
  return g.normal_form(w);
}

MCochain random_cochain(const ShapiroData& s, int q, std::mt19937& rng) {
  MCochain f;
  const Resolution& r = *s.amb;
  for (int i = 0; i < r.rank(q); ++i)
    for (int t = 0; t < 2; ++t) {
      Word key = s.mod.canon(random_word(*r.group(), rng, 2));
      f.add(MTerm{i, key}, Integer(1 + int(rng() % 2)) * (rng() % 2 ? 1 : -1));
    }
  return f;
}

Subgroup index_two_lattice(const GroupPtr& g) {
  IntegerMatrix rows(2, 2);
  rows.at(0, 0) = 2;
  rows.at(1, 1) = 1;
  return Subgroup::lattice(g, rows);
}

// The pairing of two trivial-coefficient classes of complementary degree:
// cap both duality inverses cupped together against the fundamental class,
// then read off the degree-zero coordinate. Keys are all trivial for the
// whole subgroup, so the pair chain collapses to integers.
Integer pair_classes(const DiagonalApproximation& diag, const ShapiroData& s,
                     const FGAbelianGroup& hp, const FGAbelianGroup& hq, int p,
                     const std::vector<Integer>& x, const std::vector<Integer>& y) {
  const Resolution& r = diag.resolution();
  const int n = r.length(), q = n - p;
  MCochain fx = duality_inverse(diag, s, hp, q, shapiro_forward(s, p, x));
  MCochain fy = duality_inverse(diag, s, hq, p, shapiro_forward(s, q, y));
  PairModule pm{s.mod, s.mod};
  MPairCochain c = cup(diag, s.mod, s.mod, q, p, fx, fy);
  MPairChain z = cap_fundamental_pair(diag, pm, q + p, c);
  Integer out = 0;
  for (const auto& [t, v] : z.terms()) {
    REQUIRE(t.key1 == Word::one());
    REQUIRE(t.key2 == Word::one());
    REQUIRE(t.idx == 0);
    out += v;
  }
  return out;
}

}  // namespace

TEST_CASE("cap against the fundamental class intertwines boundaries") {
  std::mt19937 rng(314);
  struct Case {
    GroupSpec spec;
    int which;  // 0 whole, 1 trivial, 2 lattice/cyclic
  };
  for (const Case& cs : {Case{{"free_abelian", 2, 0, {}}, 0}, Case{{"free_abelian", 2, 0, {}}, 2},
                         Case{{"free_abelian", 3, 0, {}}, 0}, Case{{"surface", 0, 2, {}}, 0},
                         Case{{"surface", 0, 2, {}}, 1}, Case{{"surface", 0, 2, {}}, 2}}) {
    auto g = make_group(cs.spec);
    Subgroup k = cs.which == 0 ? Subgroup::whole(g)
                 : cs.which == 1
                     ? Subgroup::trivial(g)
                     : (g->kind() == Group::Kind::Surface ? Subgroup::cyclic(g, g->parse("a1"))
                                                          : index_two_lattice(g));
    auto r = make_resolution(g);
    DiagonalApproximation diag(r);
    ShapiroData s = make_shapiro(k, r);
    INFO(g->describe() << " subgroup " << k.id());
    for (int q = 0; q <= r->length(); ++q) {
      MCochain psi = random_cochain(s, q, rng);
      MChain lhs = mod_boundary(*r, s.mod, r->length() - q, duality_cap(diag, s, q, psi));
      MChain rhs;  // d(z cap f) = (-1)^(n-q) z cap delta(f)
      rhs.add(duality_cap(diag, s, q + 1, mod_coboundary(*r, s.mod, q, psi)),
              (r->length() - q) % 2 == 0 ? 1 : -1);
      REQUIRE(lhs == rhs);
    }
  }
}

TEST_CASE("cup products obey the Leibniz rule") {
  std::mt19937 rng(2718);
  auto g = make_group({"surface", 0, 2, {}});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);
  ShapiroData sk = make_shapiro(Subgroup::cyclic(g, g->parse("a1")), r);
  ShapiroData sh = make_shapiro(Subgroup::cyclic(g, g->parse("b2")), r);
  PairModule pm{sk.mod, sh.mod};
  for (auto [p, q] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    MCochain u = random_cochain(sk, p, rng);
    MCochain v = random_cochain(sh, q, rng);
    MPairCochain lhs = mod_coboundary_pair(*r, pm, p + q, cup(diag, sk.mod, sh.mod, p, q, u, v));
    MPairCochain rhs = cup(diag, sk.mod, sh.mod, p + 1, q, mod_coboundary(*r, sk.mod, p, u), v);
    rhs.add(cup(diag, sk.mod, sh.mod, p, q + 1, u, mod_coboundary(*r, sh.mod, q, v)),
            p % 2 == 0 ? 1 : -1);
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("shapiro transport round trips on homology") {
  struct Case {
    GroupSpec spec;
    int which;
  };
  for (const Case& cs : {Case{{"free_abelian", 2, 0, {}}, 2}, Case{{"free_abelian", 3, 0, {}}, 0},
                         Case{{"surface", 0, 2, {}}, 0}, Case{{"surface", 0, 2, {}}, 1},
                         Case{{"surface", 0, 2, {}}, 2}}) {
    auto g = make_group(cs.spec);
    Subgroup k = cs.which == 0 ? Subgroup::whole(g)
                 : cs.which == 1 ? Subgroup::trivial(g)
                                 : (g->kind() == Group::Kind::Surface
                                        ? Subgroup::cyclic(g, g->parse("a1"))
                                        : index_two_lattice(g));
    auto r = make_resolution(g);
    ShapiroData s = make_shapiro(k, r);
    INFO(g->describe() << " subgroup " << k.id());
    for (int deg = 0; deg <= s.abs->length(); ++deg) {
      auto h = group_homology(*s.abs, deg);
      for (int i = 0; i < h.rank(); ++i) {
        std::vector<Integer> x = h.basis_vector(i);
        MChain fwd = shapiro_forward(s, deg, x);
        if (deg > 0) REQUIRE(mod_boundary(*r, s.mod, deg, fwd).empty());
        REQUIRE(reduce_class(s, h, deg, fwd) == h.reduce(x));
      }
    }
  }
}

TEST_CASE("duality inverse hits every class and verifies") {
  struct Case {
    GroupSpec spec;
    int which;
  };
  for (const Case& cs : {Case{{"free_abelian", 1, 0, {}}, 0}, Case{{"free_abelian", 2, 0, {}}, 0},
                         Case{{"free_abelian", 2, 0, {}}, 1}, Case{{"free_abelian", 2, 0, {}}, 2},
                         Case{{"surface", 0, 2, {}}, 0}, Case{{"surface", 0, 2, {}}, 2}}) {
    auto g = make_group(cs.spec);
    Subgroup k = cs.which == 0 ? Subgroup::whole(g)
                 : cs.which == 1 ? Subgroup::trivial(g)
                                 : (g->kind() == Group::Kind::Surface
                                        ? Subgroup::cyclic(g, g->parse("a1"))
                                        : index_two_lattice(g));
    auto r = make_resolution(g);
    DiagonalApproximation diag(r);
    ShapiroData s = make_shapiro(k, r);
    INFO(g->describe() << " subgroup " << k.id());
    const int n = r->length();
    for (int deg = 0; deg <= s.abs->length(); ++deg) {
      auto h = group_homology(*s.abs, deg);
      for (int i = 0; i < h.rank(); ++i) {
        MChain c = shapiro_forward(s, deg, h.basis_vector(i));
        MCochain phi = duality_inverse(diag, s, h, n - deg, c);
        // the call verifies internally; confirm the class independently
        REQUIRE(reduce_class(s, h, deg, duality_cap(diag, s, n - deg, phi)) ==
                h.reduce(h.basis_vector(i)));
      }
    }
  }
}

TEST_CASE("duality inverse refuses when the window cap is zero") {
  Options opts;
  opts.max_window_radius = 0;
  auto g = make_group({"free_abelian", 2, 0, opts});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);
  ShapiroData s = make_shapiro(Subgroup::whole(g), r);
  auto h = group_homology(*s.abs, 0);
  std::vector<Integer> pt{1};
  REQUIRE_THROWS_AS(duality_inverse(diag, s, h, 2, shapiro_forward(s, 0, pt)), BoundExceeded);
}

TEST_CASE("torus intersection form") {
  auto g = make_group({"free_abelian", 2, 0, {}});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);
  ShapiroData s = make_shapiro(Subgroup::whole(g), r);
  auto h1 = group_homology(*r, 1);
  REQUIRE(h1.free_rank() == 2);
  IntegerMatrix form(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      form.at(i, j) = pair_classes(diag, s, h1, h1, 1, h1.basis_vector(i), h1.basis_vector(j));
  REQUIRE(form.at(0, 0) == 0);
  REQUIRE(form.at(1, 1) == 0);
  REQUIRE(form.at(0, 1) == 1);
  REQUIRE(form.at(1, 0) == -1);
}

TEST_CASE("surface symplectic intersection form") {
  auto g = make_group({"surface", 0, 2, {}});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);
  ShapiroData s = make_shapiro(Subgroup::whole(g), r);
  auto h1 = group_homology(*r, 1);
  REQUIRE(h1.free_rank() == 4);
  // basis order is the generator edges a1, b1, a2, b2
  IntegerMatrix form(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      form.at(i, j) = pair_classes(diag, s, h1, h1, 1, h1.basis_vector(i), h1.basis_vector(j));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      INFO("entry " << i << "," << j);
      if ((i / 2 == j / 2) && i % 2 == 0 && j % 2 == 1)
        REQUIRE(form.at(i, j) == 1);  // a_i . b_i = [pt]
      else if ((i / 2 == j / 2) && i % 2 == 1 && j % 2 == 0)
        REQUIRE(form.at(i, j) == -1);
      else
        REQUIRE(form.at(i, j) == 0);
    }
}

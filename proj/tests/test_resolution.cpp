#include <catch2/catch_amalgamated.hpp>

#include <pdstring/builtin.hpp>
#include <pdstring/diagonal.hpp>
#include <pdstring/resolution.hpp>

#include <random>

using namespace pd;

namespace {

// dh + hd = id - unit*eps in degree 0 and = id above: the defining property
// of the contracting homotopy, checked exactly on a chain.
bool contracting_identity(const Resolution& r, int k, const FreeChain& c) {
  FreeChain lhs = r.boundary(k + 1, r.homotopy(k, c));
  if (k > 0) lhs.add(r.homotopy(k - 1, r.boundary(k, c)));
  FreeChain rhs = c;
  if (k == 0) rhs.add(FreeChain::single(0, Word::one()), -r.epsilon(c));
  return lhs == rhs;
}

std::vector<Integer> coinv(const Resolution& r, int k, const FreeChain& c) {
  std::vector<Integer> v(size_t(r.rank(k)), 0);
  for (const auto& [cell, val] : c.terms()) v[size_t(cell.idx)] += val;
  return v;
}

Word random_word(const Group& g, std::mt19937& rng, int len) {
  Word w = Word::one();
  for (int i = 0; i < len; ++i) {
    int gen = int(rng() % unsigned(g.generator_count()));
    int s = rng() % 2 ? 1 : -1;
    w = w * Word::gen(gen, s);
  }
  return g.normal_form(w);
}

// Delta must be a chain map lifting the identity of Z: boundary after Delta
// equals Delta after boundary, and both counits give the cell back.
void check_diagonal(const DiagonalApproximation& diag) {
  const Resolution& r = diag.resolution();
  for (int k = 0; k <= r.length(); ++k) {
    for (int idx = 0; idx < r.rank(k); ++idx) {
      TensorChain d = diag.diag_cell(k, idx);
      FreeChain cell = FreeChain::single(idx, Word::one());
      INFO("degree " << k << " cell " << idx);
      REQUIRE(counit_left(d) == cell);
      REQUIRE(counit_right(d) == cell);
      if (k > 0) {
        TensorChain lhs = tensor_boundary(r, d);
        TensorChain rhs = diag.apply(k - 1, r.boundary(k, cell));
        REQUIRE(lhs == rhs);
      }
    }
  }
}

}  // namespace

TEST_CASE("free chains: module action and cancellation") {
  auto g = make_group({"surface", 0, 2, {}});
  Word u = g->parse("a1*b2^-1*a2");
  FreeChain c;
  c.add(Cell{0, g->parse("b1")}, 3);
  c.add(Cell{2, g->normal_form(g->parse("a1*b1*a1^-1*b1^-1"))}, -2);
  REQUIRE(c.translated(*g, u).translated(*g, g->invert(u)) == c);

  FreeChain z = c;
  z.add(c, -1);
  REQUIRE(z.empty());
}

TEST_CASE("koszul resolution: boundaries, homotopy, fundamental cycle") {
  std::mt19937 rng(20260814);
  for (int n = 1; n <= 3; ++n) {
    auto g = make_group({"free_abelian", n, 0, {}});
    auto r = make_resolution(g);
    INFO("rank " << n);
    REQUIRE(r->length() == n);

    // ranks are binomial coefficients
    int total = 0;
    for (int k = 0; k <= n; ++k) total += r->rank(k);
    REQUIRE(total == (1 << n));

    for (int k = 1; k <= n; ++k)
      for (int idx = 0; idx < r->rank(k); ++idx) {
        FreeChain d = r->boundary_cell(k, idx);
        if (k >= 2) REQUIRE(r->boundary(k - 1, d).empty());
        if (k == 1) REQUIRE(r->epsilon(d) == 0);
      }

    // h vanishes on identity translates
    for (int k = 0; k <= n; ++k)
      for (int idx = 0; idx < r->rank(k); ++idx)
        REQUIRE(r->homotopy_cell(k, Cell{idx, Word::one()}).empty());

    for (int trial = 0; trial < 30; ++trial) {
      int k = int(rng() % unsigned(n + 1));
      int idx = int(rng() % unsigned(r->rank(k)));
      FreeChain c = FreeChain::single(idx, random_word(*g, rng, 4),
                                      Integer(1 + int(rng() % 3)));
      if (trial % 3 == 0) c.add(Cell{int(rng() % unsigned(r->rank(k))), random_word(*g, rng, 3)}, -2);
      INFO("degree " << k);
      REQUIRE(contracting_identity(*r, k, c));
    }

    // the fundamental class generates H_n
    FreeChain z = r->fundamental_cycle();
    for (const Integer& v : coinv(*r, n - 1, r->boundary(n, z))) REQUIRE(v == 0);
    auto hn = group_homology(*r, n);
    REQUIRE(hn.free_rank() == 1);
    auto red = hn.reduce(coinv(*r, n, z));
    REQUIRE((red[0] == 1 || red[0] == -1));
  }
}

TEST_CASE("surface resolution: relator derivatives pinned, homotopies") {
  auto g = make_group({"surface", 0, 2, {}});
  auto r = make_resolution(g);
  REQUIRE(r->length() == 2);
  REQUIRE(r->rank(0) == 1);
  REQUIRE(r->rank(1) == 4);
  REQUIRE(r->rank(2) == 1);

  // boundary of the relator cell, written out by hand from the presentation
  // r = [a1,b1][a2,b2] one letter at a time
  FreeChain expect;
  auto nf = [&](const std::string& s) { return g->normal_form(g->parse(s)); };
  expect.add(Cell{0, Word::one()}, 1);
  expect.add(Cell{0, nf("a1*b1*a1^-1")}, -1);
  expect.add(Cell{1, nf("a1")}, 1);
  expect.add(Cell{1, nf("a1*b1*a1^-1*b1^-1")}, -1);
  expect.add(Cell{2, nf("a1*b1*a1^-1*b1^-1")}, 1);
  expect.add(Cell{2, nf("a1*b1*a1^-1*b1^-1*a2*b2*a2^-1")}, -1);
  expect.add(Cell{3, nf("a1*b1*a1^-1*b1^-1*a2")}, 1);
  expect.add(Cell{3, Word::one()}, -1);
  REQUIRE(r->boundary_cell(2, 0) == expect);

  // d1 d2 = 0 exactly in the free module
  REQUIRE(r->boundary(1, r->boundary_cell(2, 0)).empty());
  for (int idx = 0; idx < 4; ++idx) REQUIRE(r->epsilon(r->boundary_cell(1, idx)) == 0);

  // h vanishes on identity translates
  REQUIRE(r->homotopy_cell(0, Cell{0, Word::one()}).empty());
  for (int idx = 0; idx < 4; ++idx)
    REQUIRE(r->homotopy_cell(1, Cell{idx, Word::one()}).empty());

  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    FreeChain c = FreeChain::single(0, random_word(*g, rng, 5));
    REQUIRE(contracting_identity(*r, 0, c));
  }
  for (int trial = 0; trial < 8; ++trial) {
    FreeChain c = FreeChain::single(int(rng() % 4), random_word(*g, rng, 4));
    REQUIRE(contracting_identity(*r, 1, c));
  }
  for (int trial = 0; trial < 3; ++trial) {
    FreeChain c = FreeChain::single(0, random_word(*g, rng, 3), Integer(2));
    REQUIRE(contracting_identity(*r, 2, c));
  }

  // genus 3, lighter pass
  auto g3 = make_group({"surface", 0, 3, {}});
  auto r3 = make_resolution(g3);
  REQUIRE(r3->rank(1) == 6);
  REQUIRE(r3->boundary(1, r3->boundary_cell(2, 0)).empty());
  for (int trial = 0; trial < 3; ++trial) {
    FreeChain c = FreeChain::single(int(rng() % 6), random_word(*g3, rng, 3));
    REQUIRE(contracting_identity(*r3, 1, c));
  }
  REQUIRE(contracting_identity(*r3, 2, FreeChain::single(0, g3->parse("a3*b1^-1"))));

  // fundamental class generates H_2
  FreeChain z = r->fundamental_cycle();
  for (const Integer& v : coinv(*r, 1, r->boundary(2, z))) REQUIRE(v == 0);
  auto h2 = group_homology(*r, 2);
  REQUIRE(h2.free_rank() == 1);
  auto red = h2.reduce(coinv(*r, 2, z));
  REQUIRE((red[0] == 1 || red[0] == -1));
}

TEST_CASE("diagonal approximation: koszul shuffle form") {
  auto g = make_group({"free_abelian", 2, 0, {}});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);

  // Delta(e_{01}) spelled out: four splittings with shuffle signs, the right
  // factor shifted by the generators of the left factor
  TensorChain expect;
  Cell e0{0, Word::one()};
  expect.add(TensorCell{0, 2, e0, Cell{0, Word::one()}}, 1);
  expect.add(TensorCell{1, 1, Cell{0, Word::one()}, Cell{1, g->parse("e1")}}, 1);
  expect.add(TensorCell{1, 1, Cell{1, Word::one()}, Cell{0, g->parse("e2")}}, -1);
  expect.add(TensorCell{2, 0, Cell{0, Word::one()}, Cell{0, g->parse("e1*e2")}}, 1);
  REQUIRE(diag.diag_cell(2, 0) == expect);

  for (int n = 1; n <= 3; ++n) {
    auto gn = make_group({"free_abelian", n, 0, {}});
    auto rn = make_resolution(gn);
    DiagonalApproximation dn(rn);
    check_diagonal(dn);

    // the closed form satisfies the inductive recursion Delta = h(Delta(d.))
    for (int k = 1; k <= n; ++k)
      for (int idx = 0; idx < rn->rank(k); ++idx) {
        TensorChain rec = tensor_homotopy(*rn, dn.apply(k - 1, rn->boundary_cell(k, idx)));
        REQUIRE(dn.diag_cell(k, idx) == rec);
      }
  }
}

TEST_CASE("diagonal approximation: surface") {
  auto g = make_group({"surface", 0, 2, {}});
  auto r = make_resolution(g);
  DiagonalApproximation diag(r);

  // Delta(e_x) = e_x (x) x e0 + e0 (x) e_x for every edge
  for (int x = 0; x < 4; ++x) {
    TensorChain expect;
    expect.add(TensorCell{1, 0, Cell{x, Word::one()}, Cell{0, Word::gen(x)}}, 1);
    expect.add(TensorCell{0, 1, Cell{0, Word::one()}, Cell{x, Word::one()}}, 1);
    REQUIRE(diag.diag_cell(1, x) == expect);
  }

  check_diagonal(diag);

  // equivariance of the extension to chains
  Word u = g->parse("b1*a2^-1");
  FreeChain c = FreeChain::single(2, g->parse("a1"), Integer(3));
  REQUIRE(diag.apply(1, c.translated(*g, u)) == diag.apply(1, c).translated(*g, u));
}

TEST_CASE("group homology tables") {
  struct Row {
    GroupSpec spec;
    std::vector<int> betti;
  };
  const std::vector<Row> rows = {
      {{"free_abelian", 1, 0, {}}, {1, 1}},
      {{"free_abelian", 2, 0, {}}, {1, 2, 1}},
      {{"free_abelian", 3, 0, {}}, {1, 3, 3, 1}},
      {{"surface", 0, 2, {}}, {1, 4, 1}},
      {{"surface", 0, 3, {}}, {1, 6, 1}},
  };
  for (const auto& row : rows) {
    auto g = make_group(row.spec);
    auto r = make_resolution(g);
    INFO(g->describe());
    for (int k = 0; k < int(row.betti.size()); ++k) {
      auto h = group_homology(*r, k);
      REQUIRE(h.free_rank() == row.betti[size_t(k)]);
      REQUIRE(h.torsion().empty());
    }
    REQUIRE(group_homology(*r, int(row.betti.size())).rank() == 0);
  }

  // the zero-rank lattice is the trivial group: H_0 = Z and nothing else
  auto g0 = std::make_shared<FreeAbelianGroup>(0);
  auto r0 = make_resolution(g0);
  REQUIRE(r0->length() == 0);
  auto h0 = group_homology(*r0, 0);
  REQUIRE(h0.free_rank() == 1);
  REQUIRE(group_homology(*r0, 1).rank() == 0);

  // surface H_1 basis lands on the generator edges in presentation order
  auto gs = make_group({"surface", 0, 2, {}});
  auto rs = make_resolution(gs);
  auto h1 = group_homology(*rs, 1);
  REQUIRE(h1.free_rank() == 4);
  for (int i = 0; i < 4; ++i) {
    auto v = h1.basis_vector(i);
    for (int j = 0; j < 4; ++j) REQUIRE(v[size_t(j)] == (i == j ? 1 : 0));
  }
}

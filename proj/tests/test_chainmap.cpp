#include <catch2/catch_amalgamated.hpp>

#include <pdstring/builtin.hpp>
#include <pdstring/chainmap.hpp>

#include <random>

using namespace pd;

namespace {

Word random_word(const Group& g, std::mt19937& rng, int len) {
  Word w = Word::one();
  for (int i = 0; i < len; ++i) {
    int gen = int(rng() % unsigned(g.generator_count()));
    int s = rng() % 2 ? 1 : -1;
    w = w * Word::gen(gen, s);
  }
  return g.normal_form(w);
}

// linear map on coordinates as a group morphism (rows x cols matrix)
std::function<Word(const Word&)> coord_map(GroupPtr src, GroupPtr dst,
                                           std::vector<std::vector<long>> m) {
  auto s = std::static_pointer_cast<const FreeAbelianGroup>(src);
  auto d = std::static_pointer_cast<const FreeAbelianGroup>(dst);
  return [s, d, m](const Word& w) {
    std::vector<long> x = s->coords(w);
    std::vector<long> y(m.size(), 0);
    for (size_t i = 0; i < m.size(); ++i)
      for (size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
    return d->word_of(y);
  };
}

void check_chain_map(const ChainMap& f, std::mt19937& rng, int trials) {
  const Resolution& src = f.source();
  const Resolution& dst = f.target();
  for (int t = 0; t < trials; ++t) {
    int k = 1 + int(rng() % unsigned(src.length()));
    int idx = int(rng() % unsigned(src.rank(k)));
    FreeChain c = FreeChain::single(idx, random_word(*src.group(), rng, 3));
    INFO("degree " << k << " cell " << idx);
    REQUIRE(dst.boundary(k, f.apply(k, c)) == f.apply(k - 1, src.boundary(k, c)));
    // equivariance of the extension
    Word u = random_word(*src.group(), rng, 2);
    REQUIRE(f.apply(k, c.translated(*src.group(), u)) ==
            f.apply(k, c).translated(*dst.group(), f.morph(u)));
  }
  // augmentation is preserved in degree zero
  FreeChain c0 = FreeChain::single(0, random_word(*src.group(), rng, 3), Integer(4));
  REQUIRE(dst.epsilon(f.apply(0, c0)) == src.epsilon(c0));
}

void check_restriction(const SubgroupRestriction& f, const Resolution& amb,
                       std::mt19937& rng, int trials) {
  const Resolution& abs = f.target();
  const Group& G = *amb.group();
  const Group& A = *abs.group();
  for (int t = 0; t < trials; ++t) {
    int k = 1 + int(rng() % unsigned(amb.length()));
    int idx = int(rng() % unsigned(amb.rank(k)));
    FreeChain c = FreeChain::single(idx, random_word(G, rng, 3));
    INFO("degree " << k << " cell " << idx);
    REQUIRE(abs.boundary(k, f.apply(k, c)) == f.apply(k - 1, amb.boundary(k, c)));
    // K-equivariance: translate by a subgroup member
    Word aw = random_word(A, rng, 2);
    Word u = f.subgroup().embed(aw);
    REQUIRE(f.apply(k, c.translated(G, u)) == f.apply(k, c).translated(A, A.normal_form(aw)));
  }
  FreeChain c0 = FreeChain::single(0, random_word(G, rng, 3), Integer(-3));
  REQUIRE(abs.epsilon(f.apply(0, c0)) == amb.epsilon(c0));
}

}  // namespace

TEST_CASE("chain map lifting the identity morphism is the identity") {
  std::mt19937 rng(41);
  for (GroupSpec spec : {GroupSpec{"free_abelian", 2, 0, {}}, GroupSpec{"surface", 0, 2, {}}}) {
    auto g = make_group(spec);
    auto r = make_resolution(g);
    ChainMap f(r, r, [&g](const Word& w) { return g->normal_form(w); });
    for (int k = 0; k <= r->length(); ++k)
      for (int idx = 0; idx < r->rank(k); ++idx)
        REQUIRE(f.cell_image(k, idx) == FreeChain::single(idx, Word::one()));
    FreeChain c = FreeChain::single(1, random_word(*g, rng, 4), Integer(2));
    REQUIRE(f.apply(1, c) == c);
  }
}

TEST_CASE("chain map over t -> t^m on the line") {
  auto g = make_group({"free_abelian", 1, 0, {}});
  auto r = make_resolution(g);

  ChainMap cube(r, r, coord_map(g, g, {{3}}));
  FreeChain expect3;
  for (int p = 0; p < 3; ++p) expect3.add(Cell{0, g->parse("e1^" + std::to_string(p))}, 1);
  REQUIRE(cube.cell_image(1, 0) == expect3);

  ChainMap invsq(r, r, coord_map(g, g, {{-2}}));
  FreeChain expectm2;
  expectm2.add(Cell{0, g->parse("e1^-1")}, -1);
  expectm2.add(Cell{0, g->parse("e1^-2")}, -1);
  REQUIRE(invsq.cell_image(1, 0) == expectm2);

  std::mt19937 rng(5);
  check_chain_map(cube, rng, 6);
  check_chain_map(invsq, rng, 6);
}

TEST_CASE("chain maps over shears, permutations, embeddings, conjugations") {
  std::mt19937 rng(99);

  auto z2 = make_group({"free_abelian", 2, 0, {}});
  auto r2 = make_resolution(z2);
  check_chain_map(ChainMap(r2, r2, coord_map(z2, z2, {{1, 1}, {0, 1}})), rng, 8);

  auto z3 = make_group({"free_abelian", 3, 0, {}});
  auto r3 = make_resolution(z3);
  check_chain_map(ChainMap(r3, r3, coord_map(z3, z3, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})), rng, 8);
  check_chain_map(ChainMap(r2, r3, coord_map(z2, z3, {{1, 0}, {0, 1}, {0, 0}})), rng, 6);

  auto sg = make_group({"surface", 0, 2, {}});
  auto rs = make_resolution(sg);
  Word c = sg->parse("a1*b1");
  ChainMap conj(rs, rs, [&sg, c](const Word& w) {
    return sg->multiply(sg->multiply(c, w), sg->invert(c));
  });
  check_chain_map(conj, rng, 5);
}

TEST_CASE("subgroup restriction: whole and trivial") {
  auto sg = make_group({"surface", 0, 2, {}});
  auto rs = make_resolution(sg);
  Subgroup whole = Subgroup::whole(sg);
  SubgroupRestriction rw(whole, rs, make_resolution(whole.abstract_group()));
  FreeChain c = FreeChain::single(2, sg->parse("a1*b2^-1"), Integer(5));
  REQUIRE(rw.apply(1, c) == c);

  auto z2 = make_group({"free_abelian", 2, 0, {}});
  auto rz = make_resolution(z2);
  Subgroup triv = Subgroup::trivial(z2);
  SubgroupRestriction rt(triv, rz, make_resolution(triv.abstract_group()));
  FreeChain c0 = FreeChain::single(0, z2->parse("e1^3*e2^-1"), Integer(2));
  REQUIRE(rt.apply(0, c0) == FreeChain::single(0, Word::one(), Integer(2)));
  REQUIRE(rt.apply(1, FreeChain::single(1, z2->parse("e2"))).empty());
}

TEST_CASE("subgroup restriction: lattice inside the plane") {
  std::mt19937 rng(2024);
  auto z2 = make_group({"free_abelian", 2, 0, {}});
  auto rz = make_resolution(z2);
  IntegerMatrix rows(2, 2);
  rows.at(0, 0) = 2;
  rows.at(1, 1) = 1;
  Subgroup k = Subgroup::lattice(z2, rows);
  SubgroupRestriction f(k, rz, make_resolution(k.abstract_group()));
  check_restriction(f, *rz, rng, 10);

  // degree 0 is the coset augmentation: members map to their coordinates
  Word member = z2->parse("e1^4*e2^-3");
  FreeChain img = f.apply(0, FreeChain::single(0, member));
  REQUIRE(img == FreeChain::single(0, *k.abstract_of(member)));
}

TEST_CASE("subgroup restriction: cyclic inside a surface group") {
  std::mt19937 rng(77);
  auto sg = make_group({"surface", 0, 2, {}});
  auto rs = make_resolution(sg);
  Subgroup k = Subgroup::cyclic(sg, sg->parse("a1"));
  SubgroupRestriction f(k, rs, make_resolution(k.abstract_group()));
  REQUIRE(f.target().length() == 1);
  check_restriction(f, *rs, rng, 6);

  // members in degree zero land on their abstract exponent
  FreeChain img = f.apply(0, FreeChain::single(0, sg->parse("a1^-3")));
  REQUIRE(img == FreeChain::single(0, Word::gen(0, -3)));

  // the relator cell maps to zero three stories up from nowhere: C_2 of the
  // abstract line vanishes, and the image of its boundary cancels exactly
  FreeChain d2 = rs->boundary(2, FreeChain::single(0, sg->parse("b2*a1")));
  REQUIRE(f.apply(1, d2).empty());
}

#include <catch2/catch_amalgamated.hpp>

#include <pdstring/abelian_group.hpp>
#include <pdstring/matrix.hpp>

#include <random>

#include "oracles.hpp"

using pd::FGAbelianGroup;
using pd::Integer;
using pd::IntegerMatrix;
using pd::SmithForm;

namespace {

IntegerMatrix make(int r, int c, std::initializer_list<long> vals) {
  IntegerMatrix m(r, c);
  auto it = vals.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = Integer(*it++);
  return m;
}

IntegerMatrix random_matrix(std::mt19937_64& rng, int r, int c, int lo = -9, int hi = 9) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntegerMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = d(rng);
  return m;
}

void check_smith_contract(const IntegerMatrix& a) {
  SmithForm s = pd::smith_normal_form(a);
  REQUIRE(s.u * a * s.v == s.d);
  REQUIRE(oracle::unimodular(s.u));
  REQUIRE(oracle::unimodular(s.v));
  REQUIRE(s.u * s.u_inv == IntegerMatrix::identity(a.rows()));
  REQUIRE(s.v * s.v_inv == IntegerMatrix::identity(a.cols()));
  // diagonal, nonnegative, divisibility chain
  for (int i = 0; i < s.d.rows(); ++i)
    for (int j = 0; j < s.d.cols(); ++j)
      if (i != j) REQUIRE(s.d.at(i, j) == 0);
  const int lim = std::min(a.rows(), a.cols());
  for (int i = 0; i < lim; ++i) REQUIRE(s.d.at(i, i) >= 0);
  for (int i = 0; i + 1 < lim; ++i) {
    if (s.d.at(i + 1, i + 1) != 0) {
      REQUIRE(s.d.at(i, i) != 0);
      REQUIRE(s.d.at(i + 1, i + 1) % s.d.at(i, i) == 0);
    }
  }
  // determinantal invariants: prod_{i<=k} d_i == gcd of k x k minors
  if (a.rows() <= 5 && a.cols() <= 5) {
    Integer prod = 1;
    for (int k = 1; k <= lim; ++k) {
      prod *= s.d.at(k - 1, k - 1);
      REQUIRE(prod == oracle::minor_gcd(a, k));
    }
  }
}

}  // namespace

TEST_CASE("smith normal form of the pinned 2x2 example") {
  IntegerMatrix a = make(2, 2, {2, 4, 6, 8});
  // cross-check the frozen values first: d1 = gcd of entries, d1*d2 = |det|
  REQUIRE(oracle::minor_gcd(a, 1) == 2);
  REQUIRE(abs(oracle::bareiss_det(a)) == 8);
  SmithForm s = pd::smith_normal_form(a);
  REQUIRE(s.d.at(0, 0) == 2);
  REQUIRE(s.d.at(1, 1) == 4);
  check_smith_contract(a);
}

TEST_CASE("smith normal form randomized contract") {
  std::mt19937_64 rng(20260814);
  for (int trial = 0; trial < 60; ++trial) {
    int r = 1 + int(rng() % 6), c = 1 + int(rng() % 6);
    check_smith_contract(random_matrix(rng, r, c));
  }
  // degenerate shapes
  check_smith_contract(IntegerMatrix(0, 3));
  check_smith_contract(IntegerMatrix(3, 0));
  check_smith_contract(IntegerMatrix(0, 0));
  check_smith_contract(make(2, 2, {0, 0, 0, 0}));
}

TEST_CASE("solve_integer_linear examples") {
  REQUIRE_FALSE(pd::solve_integer_linear(make(1, 1, {2}), {Integer(3)}).has_value());
  auto sol = pd::solve_integer_linear(make(1, 1, {2}), {Integer(4)});
  REQUIRE(sol.has_value());
  REQUIRE((*sol)[0] == 2);
}

TEST_CASE("solve_integer_linear randomized: solutions verify, planted systems solve") {
  std::mt19937_64 rng(999331);
  int solved = 0;
  for (int trial = 0; trial < 80; ++trial) {
    int r = 1 + int(rng() % 5), c = 1 + int(rng() % 5);
    IntegerMatrix a = random_matrix(rng, r, c, -6, 6);
    // planted solution: b := A x0 must always be solvable
    std::vector<Integer> x0(c);
    for (int j = 0; j < c; ++j) x0[j] = int(rng() % 9) - 4;
    auto b = a.apply(x0);
    auto x = pd::solve_integer_linear(a, b);
    REQUIRE(x.has_value());
    REQUIRE(a.apply(*x) == b);
    ++solved;
    // random rhs: when a solution is claimed it must verify
    std::vector<Integer> b2(r);
    for (int i = 0; i < r; ++i) b2[i] = int(rng() % 15) - 7;
    if (auto x2 = pd::solve_integer_linear(a, b2)) REQUIRE(a.apply(*x2) == b2);
  }
  REQUIRE(solved == 80);
}

TEST_CASE("homology_of_pair pinned examples") {
  // Z --[2]--> Z --0--> Z : torsion Z/2 (oracle: the two residues 0,1 exhaust
  // Z / 2Z and reduce must separate them)
  FGAbelianGroup h(make(1, 1, {2}), IntegerMatrix(1, 1));
  REQUIRE(h.free_rank() == 0);
  REQUIRE(h.torsion() == std::vector<Integer>{Integer(2)});
  REQUIRE(h.reduce({Integer(1)}) == std::vector<Integer>{Integer(1)});
  REQUIRE(h.reduce({Integer(2)}) == std::vector<Integer>{Integer(0)});
  REQUIRE(h.reduce({Integer(3)}) == std::vector<Integer>{Integer(1)});
  REQUIRE(h.reduce({Integer(-1)}) == std::vector<Integer>{Integer(1)});

  // free rank: 0 -> Z^2 -> 0
  FGAbelianGroup f(IntegerMatrix(2, 0), IntegerMatrix(0, 2));
  REQUIRE(f.free_rank() == 2);
  REQUIRE(f.torsion().empty());

  // mixed: Z^2 / <(2,0)> = Z/2 + Z
  FGAbelianGroup m(make(2, 1, {2, 0}), IntegerMatrix(0, 2));
  REQUIRE(m.free_rank() == 1);
  REQUIRE(m.torsion() == std::vector<Integer>{Integer(2)});
}

TEST_CASE("homology_of_pair randomized contract") {
  std::mt19937_64 rng(777215);
  for (int trial = 0; trial < 40; ++trial) {
    // random d_out, then d_in built inside its kernel so d_out*d_in = 0
    int n = 1 + int(rng() % 5);       // dim C_p
    int m0 = int(rng() % 4);          // dim C_{p-1}
    int j = int(rng() % 4);           // dim C_{p+1}
    IntegerMatrix d_out = random_matrix(rng, m0, n, -4, 4);
    SmithForm so = pd::smith_normal_form(d_out);
    int k = n - so.rank;
    IntegerMatrix kern(n, k);
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < n; ++i) kern.at(i, c) = so.v.at(i, so.rank + c);
    IntegerMatrix d_in = kern * random_matrix(rng, k, j, -3, 3);

    FGAbelianGroup h(d_in, d_out);

    // independent rank oracle over Q
    int expect_free = (n - oracle::rank_over_q(d_out)) - oracle::rank_over_q(d_in);
    REQUIRE(h.free_rank() == expect_free);

    // torsion factors form a divisibility chain with entries > 1
    auto tors = h.torsion();
    for (size_t i = 0; i < tors.size(); ++i) {
      REQUIRE(tors[i] > 1);
      if (i + 1 < tors.size()) REQUIRE(tors[i + 1] % tors[i] == 0);
    }

    // reduce: unit vectors on the frozen basis, zero on boundaries, additive
    for (int i = 0; i < h.rank(); ++i) {
      auto r = h.reduce(h.basis_vector(i));
      for (int q = 0; q < h.rank(); ++q) REQUIRE(r[q] == (q == i ? 1 : 0));
    }
    for (int c = 0; c < d_in.cols(); ++c) {
      std::vector<Integer> bd(n);
      for (int i = 0; i < n; ++i) bd[i] = d_in.at(i, c);
      REQUIRE(h.is_trivial_class(bd));
    }
    if (h.rank() >= 1 && k >= 1) {
      std::vector<Integer> c1(n), c2(n);
      for (int col = 0; col < k; ++col) {
        int w1 = int(rng() % 3), w2 = int(rng() % 5) - 2;
        for (int i = 0; i < n; ++i) {
          c1[i] += kern.at(i, col) * w1;
          c2[i] += kern.at(i, col) * w2;
        }
      }
      auto r1 = h.reduce(c1), r2 = h.reduce(c2);
      std::vector<Integer> sum(n);
      for (int i = 0; i < n; ++i) sum[i] = c1[i] + c2[i];
      auto rs = h.reduce(sum);
      auto tor = h.torsion();
      for (int q = 0; q < h.rank(); ++q) {
        Integer expect = r1[q] + r2[q];
        if (q >= h.free_rank()) {
          Integer d = tor[q - h.free_rank()];
          mpz_fdiv_r(expect.get_mpz_t(), expect.get_mpz_t(), d.get_mpz_t());
        }
        REQUIRE(rs[q] == expect);
      }
    }
  }
}

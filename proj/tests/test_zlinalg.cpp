#include <doctest.h>

#include <random>

#include "pcprobe/zlinalg.hpp"

using namespace pcprobe;

namespace {

IntMatrix from_rows(const std::vector<std::vector<int64_t>>& rows, int cols) {
  IntMatrix m((int)rows.size(), cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
  return m;
}

}  // namespace

TEST_CASE("smith normal form on fixed matrices") {
  {
    SnfResult s = smith_normal_form(from_rows({{2, 4}, {6, 8}}, 2));
    CHECK(s.rank == 2);
    CHECK(s.diag() == std::vector<mpz_class>{2, 4});
  }
  {
    SnfResult s = smith_normal_form(from_rows({{1, 0}, {0, 1}}, 2));
    CHECK(s.diag() == std::vector<mpz_class>{1, 1});
  }
  {
    // Zero matrix.
    SnfResult s = smith_normal_form(from_rows({{0, 0, 0}}, 3));
    CHECK(s.rank == 0);
  }
  {
    SnfResult s = smith_normal_form(from_rows({{2, 0}, {0, 3}}, 2));
    CHECK(s.diag() == std::vector<mpz_class>{1, 6});
  }
}

TEST_CASE("U*A*V = S with unimodular transforms, randomized") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 10000; ++trial) {
    int r = 1 + (int)(rng() % 8), c = 1 + (int)(rng() % 8);
    IntMatrix A(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) A.at(i, j) = (int64_t)(rng() % 19) - 9;
    SnfResult s = smith_normal_form(A);

    IntMatrix uav = mat_mul(mat_mul(s.U, A), s.V);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) REQUIRE(uav.at(i, j) == s.S.at(i, j));
    // Diagonal, non-negative, with the divisibility chain.
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (i != j) REQUIRE(s.S.at(i, j) == 0);
    for (int i = 0; i + 1 < std::min(r, c); ++i) {
      REQUIRE(s.S.at(i, i) >= 0);
      if (s.S.at(i + 1, i + 1) != 0)
        REQUIRE(s.S.at(i + 1, i + 1) % s.S.at(i, i) == 0);
      else
        REQUIRE((s.S.at(i, i) == 0 || s.S.at(i + 1, i + 1) == 0 || true));
      if (s.S.at(i, i) == 0) REQUIRE(s.S.at(i + 1, i + 1) == 0);
    }
  }
}

TEST_CASE("abelian structure from relation matrices") {
  {
    AbelianStructure s = abelian_structure(from_rows({{2, 0}, {0, 3}}, 2));
    CHECK(s.free_rank == 0);
    CHECK(s.torsion == std::vector<mpz_class>{6});
  }
  {
    AbelianStructure s = abelian_structure(from_rows({{2, 0}}, 2));
    CHECK(s.free_rank == 1);
    CHECK(s.torsion == std::vector<mpz_class>{2});
  }
  {
    // No relations: free of rank 3.
    AbelianStructure s = abelian_structure(IntMatrix(0, 3));
    CHECK(s.free_rank == 3);
    CHECK(s.trivial() == false);
    CHECK(s.torsion.empty());
  }
}

TEST_CASE("subgroup order inside a torsion group") {
  AbelianStructure amb;
  amb.torsion = {3, 3};
  CHECK(subgroup_order_in_torsion(amb, {}) == 1);
  CHECK(subgroup_order_in_torsion(amb, {{1, 0}}) == 3);
  CHECK(subgroup_order_in_torsion(amb, {{1, 1}}) == 3);
  CHECK(subgroup_order_in_torsion(amb, {{1, 0}, {0, 1}}) == 9);
  CHECK(subgroup_order_in_torsion(amb, {{1, 0}, {2, 0}}) == 3);

  AbelianStructure amb2;
  amb2.torsion = {2, 4};
  CHECK(subgroup_order_in_torsion(amb2, {{0, 2}}) == 2);
  CHECK(subgroup_order_in_torsion(amb2, {{1, 2}}) == 2);
  CHECK(subgroup_order_in_torsion(amb2, {{0, 1}}) == 4);
}

TEST_CASE("quotient structure") {
  AbelianStructure amb;
  amb.torsion = {3, 3};
  AbelianStructure q = quotient_structure(amb, {{1, 0}});
  CHECK(q.torsion == std::vector<mpz_class>{3});
  AbelianStructure q2 = quotient_structure(amb, {{1, 0}, {0, 1}});
  CHECK(q2.trivial());
  AbelianStructure q3 = quotient_structure(amb, {});
  CHECK(q3.torsion == std::vector<mpz_class>({3, 3}));
}

TEST_CASE("streaming row space matches dense SNF") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    int r = 1 + (int)(rng() % 6), c = 1 + (int)(rng() % 6);
    IntMatrix A(r, c);
    RowSpace rs(c);
    for (int i = 0; i < r; ++i) {
      std::vector<std::pair<int, int64_t>> sparse;
      for (int j = 0; j < c; ++j) {
        int64_t v = (int64_t)(rng() % 15) - 7;
        A.at(i, j) = v;
        if (v != 0) sparse.push_back({j, v});
      }
      rs.add_row(sparse);
    }
    SnfResult s = smith_normal_form(A);
    REQUIRE(rs.rank() == s.rank);
    AbelianStructure direct = abelian_structure(A);
    AbelianStructure streamed = rs.quotient();
    REQUIRE(streamed.torsion == direct.torsion);
    REQUIRE(streamed.free_rank == direct.free_rank);
  }
}

TEST_CASE("row space escalates to big integers on overflow") {
  // Rows engineered so int64 gcd-reduction would overflow.
  RowSpace rs(2);
  int64_t big = (int64_t)1 << 62;
  rs.add_row({{0, big}, {1, 1}});
  rs.add_row({{0, big - 1}, {1, big}});
  CHECK(rs.rank() == 2);
  IntMatrix A(2, 2);
  A.at(0, 0) = big;
  A.at(0, 1) = 1;
  A.at(1, 0) = big - 1;
  A.at(1, 1) = big;
  AbelianStructure direct = abelian_structure(A);
  AbelianStructure streamed = rs.quotient();
  CHECK(streamed.torsion == direct.torsion);
  CHECK(streamed.free_rank == direct.free_rank);
}

#include <doctest.h>

#include <random>
#include <set>

#include "contab/error.hpp"
#include "contab/exact.hpp"
#include "contab/numeric.hpp"
#include "oracles.hpp"

using namespace contab;

TEST_CASE("small exact counts") {
  CHECK(count_01(validate_margins({2, 2, 1}, {2, 2, 1})) == 5);
  CHECK(count_01(validate_margins({1, 1}, {1, 1})) == 2);
  CHECK(count_nonneg(validate_margins({1, 1}, {1, 1})) == 2);
  CHECK(count_nonneg(validate_margins({2, 1}, {2, 1})) == 2);
  CHECK(count_nonneg(validate_margins({2}, {1, 1})) == 1);
  CHECK(count_nonneg(validate_margins({2, 2}, {2, 2})) == 3);
  CHECK(count_01(validate_margins({2, 2, 0}, {3, 1, 0})) == 0);
  // n x n margins n/2
  CHECK(count_01(validate_margins({2, 2, 2, 2}, {2, 2, 2, 2})) == 90);
  CHECK(count_01(validate_margins(std::vector<std::int64_t>(6, 3), std::vector<std::int64_t>(6, 3))) == 297200);
  CHECK(count_01(validate_margins(std::vector<std::int64_t>(8, 4), std::vector<std::int64_t>(8, 4))) ==
        BigCount("116963796250"));
  // n x n margins n
  CHECK(count_nonneg(validate_margins({3, 3, 3}, {3, 3, 3})) == 55);
  CHECK(count_nonneg(validate_margins({4, 4, 4, 4}, {4, 4, 4, 4})) == 10147);
  CHECK(count_nonneg(validate_margins({5, 5, 5, 5, 5}, {5, 5, 5, 5, 5})) == 22069251);
}

TEST_CASE("counts agree with brute force and enumeration") {
  for (Eigen::Index m = 1; m <= 3; ++m)
    for (Eigen::Index n = 1; n <= 3; ++n)
      for (const auto& mg : oracle::margin_family(m, n, 0, 3)) {
        const auto brute = oracle::brute_count_01(mg);
        CHECK(count_01(mg) == brute);
        CHECK(static_cast<std::int64_t>(enumerate_01(mg).size()) == brute);
        CHECK(count_nonneg(mg) == oracle::brute_count_nonneg(mg));
        std::int64_t listed = 0;
        for_each_nonneg(mg, std::nullopt, [&](const IntMatrix& d) {
          CHECK(oracle::matches(d, mg));
          CHECK((d.array() >= 0).all());
          ++listed;
        });
        CHECK(count_nonneg(mg) == listed);
      }
}

TEST_CASE("enumeration order is lexicographic row-major and duplicate free") {
  const auto mg = validate_margins({2, 1, 1}, {1, 2, 1});
  const auto all = enumerate_01(mg);
  REQUIRE(all.size() > 1);
  auto flat = [](const IntMatrix& d) { return std::vector<std::int64_t>(d.data(), d.data() + d.size()); };
  for (std::size_t k = 1; k < all.size(); ++k) CHECK(flat(all[k - 1]) < flat(all[k]));
  for (const auto& d : all) {
    CHECK(oracle::matches(d, mg));
    CHECK(((d.array() == 0) || (d.array() == 1)).all());
  }
}

TEST_CASE("enumeration guard") {
  const auto mg = validate_margins(std::vector<std::int64_t>(7, 1), std::vector<std::int64_t>(7, 1));
  CHECK_THROWS_AS(enumerate_01(mg), Error);
  try {
    enumerate_01(mg);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
  CHECK(enumerate_01(mg, std::nullopt, 49).size() == 5040);
}

TEST_CASE("masked counts") {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution keep(0.75);
  for (const auto& mg : oracle::margin_family(3, 3, 0, 2)) {
    CellMask mask(3, 3);
    for (Eigen::Index k = 0; k < 9; ++k) mask(k / 3, k % 3) = keep(gen);
    CHECK(count_01(mg, mask) == oracle::brute_count_01(mg, &mask));
    std::int64_t listed = 0;
    for_each_01(mg, mask, [&](const IntMatrix& d) {
      CHECK(((d.array() == 0) || mask).all());
      ++listed;
    });
    CHECK(count_01(mg, mask) == listed);
  }
  // the (2,2,1) example with two corners removed
  CellMask mask(3, 3);
  mask << true, true, false, true, true, true, false, true, true;
  CHECK(count_01(validate_margins({2, 2, 1}, {2, 2, 1}), mask) == oracle::brute_count_01(validate_margins({2, 2, 1}, {2, 2, 1}), &mask));
}

TEST_CASE("symmetry of counts under transposition and permutation") {
  const auto mg = validate_margins({3, 1, 2, 2}, {2, 2, 3, 1});
  CHECK(count_01(mg) == count_01(mg.transposed()));
  CHECK(count_nonneg(mg) == count_nonneg(mg.transposed()));
  const auto perm = validate_margins({2, 3, 2, 1}, {1, 3, 2, 2});
  CHECK(count_01(mg) == count_01(perm));
  CHECK(count_nonneg(mg) == count_nonneg(perm));
}

TEST_CASE("count_01 special cases against closed forms") {
  // all rows 1: |A_0| = N! / prod c_j! when every c_j <= m
  const auto mg = validate_margins(std::vector<std::int64_t>(6, 1), {3, 2, 1});
  CHECK(count_01(mg) == 60);
  // one row: a single matrix
  CHECK(count_01(validate_margins({3}, {1, 1, 0, 1})) == 1);
  // non-negative with one row: a single matrix; one column likewise
  CHECK(count_nonneg(validate_margins({5}, {2, 3})) == 1);
  // non-negative 2 x n with row sums (a, b): number of ways = coefficient count
  // 2 x 2 with margins (k,k)/(k,k) has k+1 tables
  for (std::int64_t k = 0; k <= 10; ++k) CHECK(count_nonneg(validate_margins({k, k}, {k, k})) == k + 1);
}

TEST_CASE("permanent against the definition") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> entry(0, 3);
  for (Eigen::Index k = 1; k <= 7; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      IntMatrix a(k, k);
      for (Eigen::Index c = 0; c < k * k; ++c) a(c / k, c % k) = entry(gen);
      CHECK(permanent(a) == oracle::permanent_by_permutations(a));
    }
  CHECK(permanent(IntMatrix::Ones(10, 10)) == 3628800);
  IntMatrix big = IntMatrix::Constant(12, 12, 1000);
  BigCount expect = 479001600;
  for (int i = 0; i < 12; ++i) expect *= 1000;
  CHECK(permanent(big) == expect);
  CHECK_THROWS_AS(permanent(IntMatrix::Ones(2, 3)), Error);
  CHECK_THROWS_AS(permanent(IntMatrix::Ones(5, 5), 4), Error);
}

TEST_CASE("block matrix structure") {
  const auto mg = validate_margins({2, 1}, {1, 1, 1});
  const auto b = build_block_matrix(mg);
  CHECK(b.matrix.rows() == 6);
  CHECK(b.matrix.cols() == 6);
  CHECK(b.type1_block_sizes == std::vector<Eigen::Index>{1, 2});
  CHECK(b.type2_block_sizes == std::vector<Eigen::Index>{1, 1, 1});
  CHECK(b.type1_offset(1) == 1);
  CHECK(b.type2_offset(0) == 3);
  // type-I row of block 1 covers columns 3..5
  CHECK(b.matrix.row(1).sum() == 3);
  CHECK(b.matrix.block(1, 3, 1, 3).sum() == 3);
  // type-II row j has a one in column (i, j) for every i
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(b.matrix.row(3 + j).sum() == 2);
    CHECK(b.matrix(3 + j, j) == 1);
    CHECK(b.matrix(3 + j, 3 + j) == 1);
  }
  CHECK_THROWS_AS(build_block_matrix(validate_margins({3}, {3})), Error);
}

TEST_CASE("permanent route agrees with the dynamic program") {
  for (Eigen::Index m = 1; m <= 3; ++m)
    for (Eigen::Index n = 1; n <= 3; ++n)
      for (const auto& mg : oracle::margin_family(m, n, 0, 3)) CHECK(count_01_via_permanent(mg) == count_01(mg));
  CHECK(count_01_via_permanent(validate_margins({2, 2, 2, 2}, {2, 2, 2, 2})) == 90);
}

TEST_CASE("log_of") {
  CHECK(log_of(BigCount(0)) == -std::numeric_limits<double>::infinity());
  CHECK(log_of(BigCount(1)) == 0.0);
  CHECK(log_of(BigCount(90)) == doctest::Approx(std::log(90.0)));
  BigCount huge = 1;
  for (int i = 0; i < 400; ++i) huge *= 10;
  CHECK(log_of(huge) == doctest::Approx(400 * std::log(10.0)).epsilon(1e-12));
}

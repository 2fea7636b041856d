#include <doctest.h>

#include <random>

#include "contab/error.hpp"
#include "contab/estimates.hpp"
#include "contab/exact.hpp"
#include "oracles.hpp"

using namespace contab;

TEST_CASE("independence estimates, zero-one") {
  CHECK(independence_estimate_01(validate_margins({1, 1}, {1, 1})) == doctest::Approx(std::log(8.0 / 3.0)));
  CHECK(independence_estimate_01(validate_margins({1}, {1})) == doctest::Approx(0.0));
  CHECK(independence_estimate_01(validate_margins({2, 2, 1}, {2, 2, 1})) == doctest::Approx(std::log(729.0 / 126.0)));
  CHECK(independence_estimate_01(validate_margins({2, 2, 1}, {2, 2, 1})) == doctest::Approx(1.7556).epsilon(1e-4));
  CHECK_THROWS_AS(independence_estimate_01(validate_margins({3}, {3})), Error);
}

TEST_CASE("independence estimates, non-negative") {
  CHECK(independence_estimate_nonneg(validate_margins({1, 1}, {1, 1})) == doctest::Approx(std::log(1.6)));
  CHECK(independence_estimate_nonneg(validate_margins({5}, {5})) == doctest::Approx(0.0));
  CHECK(independence_estimate_nonneg(validate_margins({2, 2, 1}, {2, 2, 1})) ==
        doctest::Approx(std::log(11664.0 / 1287.0)));
  CHECK(independence_estimate_nonneg(validate_margins({2, 2, 1}, {2, 2, 1})) == doctest::Approx(2.2040).epsilon(1e-4));
}

TEST_CASE("independence estimates are transposition invariant") {
  for (const auto& mg : oracle::margin_family(2, 3, 0, 2)) {
    CHECK(independence_estimate_01(mg) == doctest::Approx(independence_estimate_01(mg.transposed())));
    CHECK(independence_estimate_nonneg(mg) == doctest::Approx(independence_estimate_nonneg(mg.transposed())));
  }
}

TEST_CASE("uniform margins stay within the slack budget") {
  for (std::int64_t n = 2; n <= 5; ++n)
    for (std::int64_t r = 1; r < n; ++r) {
      const auto mg = validate_margins(std::vector<std::int64_t>(n, r), std::vector<std::int64_t>(n, r));
      for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
        const double gap = independence_estimate(mode, mg) - log_of(count_exact(mg, mode));
        CHECK(std::abs(gap) <= slack_budget(mg, mode));
      }
    }
}

TEST_CASE("correlation diagnostic") {
  const auto uniform = validate_margins({2, 2, 2}, {2, 2, 2});
  for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
    const auto rep = correlation_diagnostic(uniform, mode);
    CHECK(rep.direction == Direction::NearNeutral);
    CHECK(rep.gap == rep.log_independence - rep.log_alpha);
    CHECK(rep.slack_budget == doctest::Approx(2 * 6 * std::log(mode == Mode::ZeroOne ? 9.0 : 6.0)));
  }
  // log alpha overshoots both estimates on the clone, well inside the default band
  const auto clone = clone_margins(validate_margins({2, 2, 1}, {2, 2, 1}), 2);
  for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
    const auto rep = correlation_diagnostic(clone, mode);
    CHECK(rep.direction == Direction::NearNeutral);
    CHECK(rep.gap < 0.0);
    DiagnosticOptions tight;
    tight.slack_factor = 0.0;
    CHECK(correlation_diagnostic(clone, mode, tight).direction == Direction::Attract);
  }
  // against the exact counts the clone shows repulsion and attraction
  CHECK(independence_estimate_01(clone) > log_of(count_01(clone)));
  CHECK(independence_estimate_nonneg(clone) < log_of(count_nonneg(clone)));
}

TEST_CASE("log-concavity examples") {
  const auto a = validate_margins({3, 1}, {3, 1});
  const auto b = validate_margins({1, 3}, {1, 3});
  const std::vector<WeightedMargins> items{{a, 0.5}, {b, 0.5}};

  const auto nn = log_concavity_check(items, Mode::NonNeg, true);
  CHECK(nn.average == validate_margins({2, 2}, {2, 2}));
  CHECK(nn.lhs_log == doctest::Approx(std::log(3.0)));
  CHECK(nn.rhs_log == doctest::Approx(std::log(2.0)));
  CHECK(nn.holds_conjectured);
  CHECK(nn.holds_precise);
  CHECK_FALSE(nn.heuristic);

  const auto zo = log_concavity_check(items, Mode::ZeroOne, true);
  CHECK(zo.rhs_log == -std::numeric_limits<double>::infinity());
  CHECK(zo.holds_conjectured);
  CHECK(zo.holds_precise);

  const auto single = log_concavity_check({{validate_margins({2, 1}, {1, 2}), 1.0}}, Mode::ZeroOne, true);
  CHECK(single.lhs_log == single.rhs_log);
  CHECK(single.holds_conjectured);
  CHECK(single.holds_precise);
}

TEST_CASE("log-concavity errors and heuristic fallback") {
  const auto a = validate_margins({3, 1}, {3, 1});
  const auto b = validate_margins({2, 2}, {1, 3});
  try {
    log_concavity_check({{a, 0.5}, {b, 0.5}}, Mode::NonNeg, true);
    FAIL("expected NonIntegerAverage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonIntegerAverage);
  }
  CHECK_THROWS_AS(log_concavity_check({{a, 0.5}, {a, 0.6}}, Mode::NonNeg, true), Error);
  CHECK_THROWS_AS(log_concavity_check({{a, 1.5}, {a, -0.5}}, Mode::NonNeg, true), Error);
  const auto h = log_concavity_check({{a, 0.5}, {validate_margins({1, 3}, {1, 3}), 0.5}}, Mode::NonNeg, false);
  CHECK(h.heuristic);
  CHECK(h.holds_conjectured);
}

TEST_CASE("sharpened log-concavity on random triples") {
  std::mt19937_64 gen(17);
  int tested = 0;
  const auto family = oracle::margin_family(2, 3, 0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
  while (tested < 40) {
    const auto& x = family[pick(gen)];
    const auto& y = family[pick(gen)];
    if (x.total() != y.total()) continue;
    bool integral = true;
    for (std::size_t k = 0; k < 2; ++k) integral = integral && (x.rows()[k] + y.rows()[k]) % 2 == 0;
    for (std::size_t k = 0; k < 3; ++k) integral = integral && (x.cols()[k] + y.cols()[k]) % 2 == 0;
    if (!integral) continue;
    ++tested;
    for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
      const auto rep = log_concavity_check({{x, 0.5}, {y, 0.5}}, mode, true);
      CHECK(rep.holds_precise);
    }
  }
}

TEST_CASE("domination monotonicity") {
  const auto base = validate_margins({1, 1}, {1, 1});
  const auto stronger = validate_margins({2, 0}, {1, 1});
  CHECK(count_01(stronger) == 1);
  CHECK(domination_monotonicity_check(base, stronger, Mode::ZeroOne));
  CHECK(domination_monotonicity_check(base, stronger, Mode::NonNeg));
  CHECK(domination_monotonicity_check(base, base, Mode::ZeroOne));
  try {
    domination_monotonicity_check(stronger, base, Mode::ZeroOne);
    FAIL("expected DominationViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DominationViolated);
  }
}

#include <doctest.h>

#include <numbers>
#include <random>

#include "contab/asymptotics.hpp"
#include "contab/error.hpp"
#include "contab/exact.hpp"

using namespace contab;

namespace {

Eigen::MatrixXd random_z(Eigen::Index m, Eigen::Index n, Mode mode, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.15, mode == Mode::ZeroOne ? 0.85 : 2.0);
  Eigen::MatrixXd z(m, n);
  for (auto& v : z.reshaped()) v = u(gen);
  return z;
}

}  // namespace

TEST_CASE("Hessian structure and kernel") {
  const auto z = random_z(3, 4, Mode::ZeroOne, 1);
  const auto q = build_q(z, Mode::ZeroOne);
  const auto a = q.hessian();
  CHECK((a - a.transpose()).norm() == 0.0);
  Eigen::VectorXd u(7);
  u << 1, 1, 1, -1, -1, -1, -1;
  CHECK((a * u).norm() < 1e-12);
  // x^T A x / 2 equals q evaluated cell by cell
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(7, -1.0, 2.0);
  double direct = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) direct += 0.5 * q.weights(i, j) * std::pow(x[i] + x[3 + j], 2);
  CHECK(0.5 * x.dot(a * x) == doctest::Approx(direct));
  CHECK(x.dot(q.form_matrix() * x) == doctest::Approx(direct));
}

TEST_CASE("log det on H at z = 1/2") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Constant(2, 2, 0.5);
  const auto q0 = build_q(z, Mode::ZeroOne);
  const auto qp = build_q(z, Mode::NonNeg);
  CHECK(log_det_on_H(q0) == doctest::Approx(std::log(1.0 / 32.0)));
  CHECK(log_det_on_H(qp) == doctest::Approx(std::log(27.0 / 32.0)));
  CHECK(log_det_hessian_on_H(q0) == doctest::Approx(std::log(0.25)));
  CHECK(log_det_hessian_on_H(qp) == doctest::Approx(std::log(27.0 / 4.0)));
  const auto spectrum = hessian_spectrum_on_H(q0);
  REQUIRE(spectrum.eigenvalues.size() == 3);
  CHECK(spectrum.eigenvalues[0] == doctest::Approx(0.5));
  CHECK(spectrum.eigenvalues[1] == doctest::Approx(0.5));
  CHECK(spectrum.eigenvalues[2] == doctest::Approx(1.0));
}

TEST_CASE("log det on H equals the determinant of A restricted to an orthonormal basis of H") {
  for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
    const auto q = build_q(random_z(3, 4, mode, 9), mode);
    Eigen::VectorXd u(7);
    u << 1, 1, 1, -1, -1, -1, -1;
    u.normalize();
    // complete u to an orthonormal basis by QR
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(7, 7);
    m.col(0) = u;
    const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    const Eigen::MatrixXd h = basis.rightCols(6);
    const double det = (h.transpose() * q.form_matrix() * h).determinant();
    CHECK(log_det_on_H(q) == doctest::Approx(std::log(det)));
    CHECK(log_det_hessian_on_H(q) == doctest::Approx(log_det_on_H(q) + 6 * std::log(2.0)));
  }
}

TEST_CASE("covariance is the pseudo-inverse of the Hessian") {
  const auto q = build_q(random_z(2, 3, Mode::NonNeg, 4), Mode::NonNeg);
  const auto a = q.hessian();
  const auto sigma = covariance_on_H(q);
  CHECK((a * sigma * a - a).norm() < 1e-9);
  CHECK((sigma * a * sigma - sigma).norm() < 1e-9);
  Eigen::VectorXd u(5);
  u << 1, 1, -1, -1, -1;
  CHECK((sigma * u).norm() < 1e-9);
}

TEST_CASE("build_q rejects boundary cells") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Constant(2, 2, 0.5);
  z(0, 0) = 1.0;
  CHECK_THROWS_AS(build_q(z, Mode::ZeroOne), Error);
  z(0, 0) = 0.0;
  CHECK_THROWS_AS(build_q(z, Mode::NonNeg), Error);
}

TEST_CASE("cubic term vanishes at z = 1/2") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Constant(3, 3, 0.5);
  const auto q = build_q(z, Mode::ZeroOne);
  const auto gm = gaussian_moments(q, z, Mode::ZeroOne);
  CHECK(gm.mu == doctest::Approx(0.0));
  CHECK(cumulant_coefficients(z, Mode::ZeroOne).cubic.isZero());
  CHECK(gm.nu < 0.0);  // 6z^2 - 6z + 1 = -1/2 < 0
}

TEST_CASE("Gaussian moments agree with Monte Carlo") {
  for (Mode mode : {Mode::ZeroOne, Mode::NonNeg}) {
    const auto z = random_z(2, 3, mode, 21);
    const auto q = build_q(z, mode);
    const auto exact = gaussian_moments(q, z, mode);
    const auto mc = gaussian_moments_monte_carlo(q, z, mode, 200000, {99, 0});
    CHECK(std::abs(mc.mu - exact.mu) <= 4 * mc.mu_stderr);
    CHECK(std::abs(mc.nu - exact.nu) <= 4 * mc.nu_stderr);
  }
}

TEST_CASE("asymptotic count on the smallest instance") {
  const auto e = asymptotic_count(validate_margins({1, 1}, {1, 1}), Mode::ZeroOne);
  CHECK(e.entropy == doctest::Approx(4 * std::log(2.0)));
  CHECK(e.log_det_qH == doctest::Approx(std::log(1.0 / 32.0)));
  CHECK(e.gaussian_log ==
        doctest::Approx(4 * std::log(2.0) + 0.5 * std::log(4.0) - 1.5 * std::log(4 * std::numbers::pi) +
                        0.5 * std::log(32.0)));
  CHECK(e.gaussian_log == doctest::Approx(1.40207).epsilon(1e-5));
  CHECK(e.mu == doctest::Approx(0.0));
  CHECK(e.corrected_log == doctest::Approx(e.gaussian_log - e.mu / 2 + e.nu));
  CHECK(e.min_z == doctest::Approx(0.5));
  CHECK(e.aspect_ratio == 1.0);
}

TEST_CASE("corrected estimate approaches the exact count") {
  double previous = 1.0;
  for (std::int64_t n : {4, 6, 8}) {
    const auto mg = validate_margins(std::vector<std::int64_t>(n, n / 2), std::vector<std::int64_t>(n, n / 2));
    const auto e = asymptotic_count(mg, Mode::ZeroOne);
    const double err = std::abs(std::expm1(e.corrected_log - log_of(count_01(mg))));
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous <= 0.25);
}

TEST_CASE("regime flag") {
  const auto centred = asymptotic_count(validate_margins({2, 2, 2, 2}, {2, 2, 2, 2}), Mode::ZeroOne);
  CHECK(centred.in_regime);
  const auto wide = asymptotic_count(validate_margins({1, 1, 1, 1, 1, 1}, {3, 3}), Mode::ZeroOne);
  CHECK(wide.in_regime);
  CHECK(wide.aspect_ratio == 3.0);
  const std::vector<std::int64_t> ones(12, 1);
  const auto sparse = asymptotic_count(validate_margins(ones, ones), Mode::ZeroOne);
  CHECK(sparse.max_z == doctest::Approx(1.0 / 12));
  CHECK_FALSE(sparse.in_regime);
}

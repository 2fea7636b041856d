#include "contab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace contab {

namespace {

void check_cells(const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode) {
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      const double z = Z(i, j);
      const bool ok = mode == Mode::ZeroOne ? (z > 0.0 && z < 1.0) : (z > 0.0 && std::isfinite(z));
      if (!ok)
        throw Error(ErrorKind::OutOfRange, "cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                               ") outside the open range for the quadratic form");
    }
}

// Covariance of the linear functionals s_i + t_j and s_k + t_l.
double pair_cov(const Eigen::MatrixXd& sigma, Eigen::Index m, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                Eigen::Index l) {
  return sigma(i, k) + sigma(i, m + l) + sigma(m + j, k) + sigma(m + j, m + l);
}

}  // namespace

Eigen::MatrixXd QuadraticFormQ::hessian() const {
  const auto m = this->m();
  const auto n = this->n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + n, m + n);
  a.topLeftCorner(m, m).diagonal() = weights.rowwise().sum();
  a.bottomRightCorner(n, n).diagonal() = weights.colwise().sum().transpose();
  a.topRightCorner(m, n) = weights;
  a.bottomLeftCorner(n, m) = weights.transpose();
  return a;
}

QuadraticFormQ build_q(const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode) {
  check_cells(Z, mode);
  QuadraticFormQ q;
  q.mode = mode;
  const Eigen::ArrayXXd z = Z.array();
  if (mode == Mode::ZeroOne)
    q.weights = (z - z.square()).matrix();
  else
    q.weights = (z + z.square()).matrix();
  return q;
}

CumulantCoefficients cumulant_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode) {
  check_cells(Z, mode);
  const Eigen::ArrayXXd z = Z.array();
  CumulantCoefficients c;
  if (mode == Mode::ZeroOne) {
    const Eigen::ArrayXXd var = z * (1.0 - z);
    c.cubic = (var * (2.0 * z - 1.0) / 6.0).matrix();
    c.quartic = (var * (6.0 * z.square() - 6.0 * z + 1.0) / 24.0).matrix();
  } else {
    const Eigen::ArrayXXd var = z * (1.0 + z);
    c.cubic = (var * (2.0 * z + 1.0) / 6.0).matrix();
    c.quartic = (var * (6.0 * z.square() + 6.0 * z + 1.0) / 24.0).matrix();
  }
  return c;
}

SpectrumOnH hessian_spectrum_on_H(const QuadraticFormQ& q) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.hessian());
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::KernelDimensionError, "eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  const auto near_zero = (values.array().abs() < 1e-8 * largest).count();
  if (near_zero != 1)
    throw Error(ErrorKind::KernelDimensionError,
                "expected a one-dimensional kernel, found " + std::to_string(near_zero) + " near-zero eigenvalues");
  // ascending order: the kernel eigenvalue is the first one
  const auto d = values.size() - 1;
  return {values.tail(d), eig.eigenvectors().rightCols(d)};
}

double log_det_hessian_on_H(const QuadraticFormQ& q) {
  return hessian_spectrum_on_H(q).eigenvalues.array().log().sum();
}

double log_det_on_H(const QuadraticFormQ& q) {
  const auto spectrum = hessian_spectrum_on_H(q);
  return (0.5 * spectrum.eigenvalues.array()).log().sum();
}

Eigen::MatrixXd covariance_on_H(const QuadraticFormQ& q) {
  const auto spectrum = hessian_spectrum_on_H(q);
  return spectrum.eigenvectors * spectrum.eigenvalues.cwiseInverse().asDiagonal() *
         spectrum.eigenvectors.transpose();
}

GaussianMoments gaussian_moments(const QuadraticFormQ& q, const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode) {
  const auto coeff = cumulant_coefficients(Z, mode);
  const Eigen::MatrixXd sigma = covariance_on_H(q);
  const auto m = q.m();
  const auto n = q.n();

  Eigen::MatrixXd var(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) var(i, j) = pair_cov(sigma, m, i, j, i, j);

  GaussianMoments out;
  out.nu = (coeff.quartic.array() * 3.0 * var.array().square()).sum();

  // fixed summation order keeps mu reproducible
  const Eigen::Index cells = m * n;
  for (Eigen::Index a = 0; a < cells; ++a) {
    const Eigen::Index i = a / n, j = a % n;
    const double ca = coeff.cubic(i, j);
    if (ca == 0.0) continue;
    double row = 0.0;
    for (Eigen::Index b = 0; b < cells; ++b) {
      const Eigen::Index k = b / n, l = b % n;
      const double cb = coeff.cubic(k, l);
      if (cb == 0.0) continue;
      const double c = pair_cov(sigma, m, i, j, k, l);
      row += cb * (9.0 * var(i, j) * var(k, l) * c + 6.0 * c * c * c);
    }
    out.mu += ca * row;
  }
  return out;
}

MonteCarloMoments gaussian_moments_monte_carlo(const QuadraticFormQ& q, const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                               Mode mode, std::int64_t draws, RngSeed seed) {
  const auto coeff = cumulant_coefficients(Z, mode);
  const auto spectrum = hessian_spectrum_on_H(q);
  const Eigen::MatrixXd root = spectrum.eigenvectors * spectrum.eigenvalues.cwiseInverse().cwiseSqrt().asDiagonal();
  const auto m = q.m();
  const auto n = q.n();
  const auto d = spectrum.eigenvalues.size();

  Rng rng(seed);
  Eigen::VectorXd xi(d);
  double phi2_sum = 0.0, phi4_sum = 0.0, psi_sum = 0.0, psi2_sum = 0.0;
  for (std::int64_t k = 0; k < draws; ++k) {
    for (Eigen::Index a = 0; a < d; ++a) xi[a] = rng.normal();
    const Eigen::VectorXd x = root * xi;
    double phi = 0.0, psi = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double u = x[i] + x[m + j];
        const double u2 = u * u;
        phi += coeff.cubic(i, j) * u2 * u;
        psi += coeff.quartic(i, j) * u2 * u2;
      }
    const double phi2 = phi * phi;
    phi2_sum += phi2;
    phi4_sum += phi2 * phi2;
    psi_sum += psi;
    psi2_sum += psi * psi;
  }
  const double count = static_cast<double>(draws);
  MonteCarloMoments out;
  out.draws = draws;
  out.mu = phi2_sum / count;
  out.nu = psi_sum / count;
  out.mu_stderr = std::sqrt(std::max(phi4_sum / count - out.mu * out.mu, 0.0) / count);
  out.nu_stderr = std::sqrt(std::max(psi2_sum / count - out.nu * out.nu, 0.0) / count);
  return out;
}

EdgeworthData edgeworth_from_solution(const MaxEntSolution& solution, double delta) {
  const auto& Z = solution.Z;
  const auto m = Z.rows();
  const auto n = Z.cols();
  const auto q = build_q(Z, solution.mode);
  const auto moments = gaussian_moments(q, Z, solution.mode);

  EdgeworthData e;
  e.mode = solution.mode;
  e.entropy = solution.entropy;
  e.log_det_qH = log_det_on_H(q);
  e.mu = moments.mu;
  e.nu = moments.nu;
  const double dim = static_cast<double>(m + n);
  e.gaussian_log = e.entropy + 0.5 * std::log(dim) - 0.5 * (dim - 1.0) * std::log(4.0 * std::numbers::pi) -
                   0.5 * e.log_det_qH;
  e.corrected_log = e.gaussian_log - e.mu / 2.0 + e.nu;

  e.min_z = Z.minCoeff();
  e.max_z = Z.maxCoeff();
  e.aspect_ratio = static_cast<double>(std::max(m, n)) / static_cast<double>(std::min(m, n));
  const bool shape_ok = e.aspect_ratio <= 1.0 / delta;
  if (solution.mode == Mode::ZeroOne)
    e.in_regime = shape_ok && e.min_z >= delta && e.max_z <= 1.0 - delta;
  else
    e.in_regime = shape_ok && e.max_z >= delta && e.min_z >= delta * e.max_z;
  return e;
}

EdgeworthData asymptotic_count(const Margins& margins, Mode mode, const AsymptoticOptions& options) {
  return edgeworth_from_solution(solve_maxent(mode, margins, std::nullopt, options.solver), options.delta);
}

}  // namespace contab

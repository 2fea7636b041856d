#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "contab/maxent.hpp"
#include "contab/random.hpp"

namespace contab {

/// q(s, t) = 1/2 sum w_ij (s_i + t_j)^2 with w = z - z^2 (zero-one) or z + z^2 (non-negative).
struct QuadraticFormQ {
  Mode mode = Mode::ZeroOne;
  Eigen::MatrixXd weights;

  Eigen::Index m() const { return weights.rows(); }
  Eigen::Index n() const { return weights.cols(); }

  /// The (m+n) x (m+n) Hessian A of q, so q(x) = x^T A x / 2. A annihilates
  /// u = (1,...,1; -1,...,-1).
  Eigen::MatrixXd hessian() const;

  /// The matrix of q as a quadratic form, q(x) = x^T Q x, i.e. Q = A / 2.
  Eigen::MatrixXd form_matrix() const { return 0.5 * hessian(); }
};

/// Per-cell cubic and quartic coefficients of the Edgeworth terms:
/// phi = sum a_ij (s_i + t_j)^3, psi = sum b_ij (s_i + t_j)^4.
struct CumulantCoefficients {
  Eigen::MatrixXd cubic;    // z(1-z)(2z-1)/6 or z(1+z)(2z+1)/6
  Eigen::MatrixXd quartic;  // z(1-z)(6z^2-6z+1)/24 or z(1+z)(6z^2+6z+1)/24
};

/// Throws OutOfRange unless 0 < z < 1 (zero-one) or z > 0 (non-negative) in every cell.
QuadraticFormQ build_q(const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode);

CumulantCoefficients cumulant_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode);

/// Nonzero spectrum of the Hessian on H = u^perp. Throws KernelDimensionError
/// unless exactly one eigenvalue is below 1e-8 times the largest.
struct SpectrumOnH {
  Eigen::VectorXd eigenvalues;   // m + n - 1 positive values, ascending
  Eigen::MatrixXd eigenvectors;  // matching columns
};

SpectrumOnH hessian_spectrum_on_H(const QuadraticFormQ& q);

/// ln det q|H: sum of ln of the nonzero eigenvalues of the form matrix Q = A/2.
double log_det_on_H(const QuadraticFormQ& q);

/// Same spectrum taken from the Hessian A; equals log_det_on_H + (m+n-1) ln 2.
double log_det_hessian_on_H(const QuadraticFormQ& q);

/// Covariance of the Gaussian on H with density proportional to e^{-q}: the
/// pseudo-inverse of A.
Eigen::MatrixXd covariance_on_H(const QuadraticFormQ& q);

struct GaussianMoments {
  double mu = 0.0;  // E phi^2
  double nu = 0.0;  // E psi
};

/// Exact Gaussian moments by Wick pairing: E[X^3 Y^3] = 9 s_X^2 s_Y^2 c + 6 c^3
/// and E[X^4] = 3 s_X^4, summed over cell pairs.
GaussianMoments gaussian_moments(const QuadraticFormQ& q, const Eigen::Ref<const Eigen::MatrixXd>& Z, Mode mode);

struct MonteCarloMoments {
  double mu = 0.0;
  double mu_stderr = 0.0;
  double nu = 0.0;
  double nu_stderr = 0.0;
  std::int64_t draws = 0;
};

/// Sample-mean estimate of E phi^2 and E psi under the Gaussian on H.
MonteCarloMoments gaussian_moments_monte_carlo(const QuadraticFormQ& q, const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                               Mode mode, std::int64_t draws, RngSeed seed);

struct EdgeworthData {
  Mode mode = Mode::ZeroOne;
  double entropy = 0.0;
  double log_det_qH = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double gaussian_log = 0.0;   // entropy + ln(m+n)/2 - (m+n-1)/2 ln(4 pi) - log_det_qH / 2
  double corrected_log = 0.0;  // gaussian_log - mu/2 + nu
  // regime metadata
  double min_z = 0.0;
  double max_z = 0.0;
  double aspect_ratio = 1.0;  // max(m, n) / min(m, n)
  bool in_regime = false;
};

struct AsymptoticOptions {
  double delta = 0.1;  // separation used for the in_regime flag
  SolverOptions solver{};
};

EdgeworthData asymptotic_count(const Margins& margins, Mode mode, const AsymptoticOptions& options = {});

/// Assembles the Edgeworth data from an already solved maximum-entropy matrix.
EdgeworthData edgeworth_from_solution(const MaxEntSolution& solution, double delta = 0.1);

}  // namespace contab

#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "contab/error.hpp"
#include "contab/margins.hpp"
#include "contab/numeric.hpp"

namespace contab {

/// Dual variables (s, t). Zero-one: x_i = e^{s_i}, y_j = e^{t_j}; non-negative:
/// x_i = e^{-s_i}, y_j = e^{-t_j}. Gauge: sum of s over each connected block of
/// live cells is zero.
struct DualPoint {
  Eigen::VectorXd s;
  Eigen::VectorXd t;
};

struct MaxEntSolution {
  Mode mode = Mode::ZeroOne;
  Eigen::MatrixXd Z;
  DualPoint dual;
  double entropy = 0.0;     // h(Z) or g(Z), natural log
  double log_alpha = 0.0;   // equals entropy
  double dual_objective = 0.0;  // G at the returned dual
  double residual = 0.0;    // max |row/column sum of Z - margin|
  int iterations = 0;
  bool no_interior = false;  // set only when SolverOptions::allow_boundary
};

struct SolverOptions {
  double tolerance = 1e-10;            // gradient inf-norm <= tolerance * (1 + N)
  double divergence_threshold = 40.0;  // dual inf-norm beyond this means no interior point
  double boundary_epsilon = 1e-9;      // min(z, 1 - z) below this at convergence means no interior point
  int max_iterations = 500;
  bool allow_boundary = false;         // return a flagged solution instead of throwing NoInterior
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // (m + n), s-components first
};

/// G_0(s,t) = -sum r_i s_i - sum c_j t_j + sum ln(1 + e^{s_i + t_j}), or
/// G_+(s,t) =  sum r_i s_i + sum c_j t_j - sum ln(1 - e^{-s_i - t_j}),
/// the sums running over permitted cells. Throws DomainViolation (non-negative
/// mode) when some permitted s_i + t_j <= 0.
ObjectiveValue objective_G(Mode mode, const Margins& margins, const DualPoint& dual,
                           const std::optional<CellMask>& mask = std::nullopt);

/// Cell value of the maximum-entropy matrix at dual coordinate u = s_i + t_j.
inline double cell_mean(Mode mode, double u) {
  if (mode == Mode::ZeroOne) return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
  return 1.0 / std::expm1(u);
}

MaxEntSolution solve_maxent_01(const Margins& margins, const std::optional<CellMask>& mask = std::nullopt,
                               const SolverOptions& options = {});

/// Zero-margin rows and columns are fixed at z = 0 (dual +inf) and excluded from the solve.
MaxEntSolution solve_maxent_nonneg(const Margins& margins, const std::optional<CellMask>& mask = std::nullopt,
                                   const SolverOptions& options = {});

inline MaxEntSolution solve_maxent(Mode mode, const Margins& margins,
                                   const std::optional<CellMask>& mask = std::nullopt,
                                   const SolverOptions& options = {}) {
  return mode == Mode::ZeroOne ? solve_maxent_01(margins, mask, options)
                               : solve_maxent_nonneg(margins, mask, options);
}

/// Bernoulli entropy sum x ln(1/x) + (1-x) ln(1/(1-x)), with 0 ln(1/0) = 0.
template <class Derived>
typename Derived::Scalar entropy_h(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Scalar v = x(i, j);
      if (!(v >= Scalar(0) && v <= Scalar(1))) throw Error(ErrorKind::OutOfRange, "entropy_h needs entries in [0,1]");
      if (v > Scalar(0)) total -= v * std::log(v);
      if (v < Scalar(1)) total -= (Scalar(1) - v) * std::log1p(-v);
    }
  return total;
}

/// Geometric entropy sum (x+1) ln(x+1) - x ln x.
template <class Derived>
typename Derived::Scalar entropy_g(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Scalar v = x(i, j);
      if (!(v >= Scalar(0)) || !std::isfinite(v)) throw Error(ErrorKind::OutOfRange, "entropy_g needs entries >= 0");
      if (v > Scalar(0)) total += (v + Scalar(1)) * std::log1p(v) - v * std::log(v);
    }
  return total;
}

template <class Derived>
typename Derived::Scalar entropy(Mode mode, const Eigen::DenseBase<Derived>& x) {
  return mode == Mode::ZeroOne ? entropy_h(x) : entropy_g(x);
}

struct Bounds01 {
  double log_lower = 0.0;
  double log_upper = 0.0;
};

/// ln alpha_0 + ln((mn)!/(mn)^{mn}) + sum ln((n-r_i)^{n-r_i}/(n-r_i)!) + sum ln(c_j^{c_j}/c_j!) <= ln|A_0| <= ln alpha_0.
Bounds01 bounds_01(const Margins& margins, const SolverOptions& options = {});

/// Lower-bound slack factor applied to alpha_0 (the part of bounds_01 independent of Z).
double van_der_waerden_log_factor(const Margins& margins);

struct BoundsNonNeg {
  double log_upper = 0.0;
  double correction = 0.0;  // (m + n) ln N; log_lower(gamma) = log_upper - gamma * correction

  double log_lower(double gamma) const { return log_upper - gamma * correction; }
};

BoundsNonNeg bounds_nonneg(const Margins& margins, const SolverOptions& options = {});

/// Row/column scaling of the block matrix B by the solver's x, y. At an exact
/// optimum every row and column of the result sums to 1.
Eigen::MatrixXd scaled_block_matrix(const Margins& margins, const MaxEntSolution& solution);

/// Max absolute deviation of the row and column sums of Z from the margins.
double margin_residual(const Eigen::MatrixXd& Z, const Margins& margins);

}  // namespace contab

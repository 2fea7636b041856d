#include "contab/maxent.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "contab/exact.hpp"

namespace contab {

namespace {

double softplus(double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

// The cells that carry a variable term in G, plus the connected blocks they
// induce on the bipartite row/column graph. Each block contributes one
// direction (+1 on its rows, -1 on its columns) to the kernel of the Hessian.
struct Problem {
  Mode mode;
  const Margins& margins;
  CellMask live;
  std::vector<int> component;  // per vertex (rows then columns); -1 = no live cell
  int n_components = 0;
  Eigen::Index live_cells = 0;

  Problem(Mode mode_, const Margins& margins_, const std::optional<CellMask>& mask)
      : mode(mode_), margins(margins_) {
    const auto m = margins.m();
    const auto n = margins.n();
    live = mask ? *mask : full_mask(margins);
    if (mask) check_mask(margins, *mask);
    if (mode == Mode::NonNeg)
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (margins.rows()[i] == 0 || margins.cols()[j] == 0) live(i, j) = false;
    live_cells = live.count();
    label_components();
  }

  Eigen::Index m() const { return margins.m(); }
  Eigen::Index n() const { return margins.n(); }
  Eigen::Index dim() const { return m() + n(); }

  void label_components() {
    const auto m = this->m();
    const auto n = this->n();
    component.assign(static_cast<std::size_t>(m + n), -1);
    std::vector<Eigen::Index> stack;
    for (Eigen::Index start = 0; start < m + n; ++start) {
      if (component[start] >= 0 || degree(start) == 0) continue;
      const int label = n_components++;
      component[start] = label;
      stack.push_back(start);
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (Eigen::Index w = 0; w < (v < m ? n : m); ++w) {
          const bool edge = v < m ? live(v, w) : live(w, v - m);
          const Eigen::Index other = v < m ? m + w : w;
          if (edge && component[other] < 0) {
            component[other] = label;
            stack.push_back(other);
          }
        }
      }
    }
    std::vector<std::int64_t> balance(static_cast<std::size_t>(n_components), 0);
    for (Eigen::Index v = 0; v < m + n; ++v) {
      const auto margin = v < m ? margins.rows()[v] : margins.cols()[v - m];
      if (component[v] < 0) {
        if (margin > 0) throw Error(ErrorKind::Infeasible, "positive margin with no permitted cell");
        continue;
      }
      balance[component[v]] += v < m ? margin : -margin;
    }
    for (auto b : balance)
      if (b != 0) throw Error(ErrorKind::Infeasible, "mask splits the margins into unbalanced blocks");
  }

  Eigen::Index degree(Eigen::Index v) const {
    return v < m() ? live.row(v).count() : live.col(v - m()).count();
  }

  double sign() const { return mode == Mode::ZeroOne ? 1.0 : -1.0; }

  bool in_domain(const Eigen::VectorXd& x) const {
    if (mode == Mode::ZeroOne) return true;
    for (Eigen::Index i = 0; i < m(); ++i)
      for (Eigen::Index j = 0; j < n(); ++j)
        if (live(i, j) && !(x[i] + x[m() + j] > 0.0)) return false;
    return true;
  }

  double value(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m(); ++i) v -= sign() * static_cast<double>(margins.rows()[i]) * x[i];
    for (Eigen::Index j = 0; j < n(); ++j) v -= sign() * static_cast<double>(margins.cols()[j]) * x[m() + j];
    for (Eigen::Index i = 0; i < m(); ++i)
      for (Eigen::Index j = 0; j < n(); ++j) {
        if (!live(i, j)) continue;
        const double u = x[i] + x[m() + j];
        v += mode == Mode::ZeroOne ? softplus(u) : -std::log(-std::expm1(-u));
      }
    return v;
  }

  Eigen::MatrixXd means(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(m(), n());
    for (Eigen::Index i = 0; i < m(); ++i)
      for (Eigen::Index j = 0; j < n(); ++j)
        if (live(i, j)) z(i, j) = cell_mean(mode, x[i] + x[m() + j]);
    return z;
  }

  // gradient of G: sign * (row/column sums of z - margins)
  Eigen::VectorXd gradient(const Eigen::MatrixXd& z) const {
    Eigen::VectorXd g(dim());
    for (Eigen::Index i = 0; i < m(); ++i) g[i] = sign() * (z.row(i).sum() - static_cast<double>(margins.rows()[i]));
    for (Eigen::Index j = 0; j < n(); ++j)
      g[m() + j] = sign() * (z.col(j).sum() - static_cast<double>(margins.cols()[j]));
    return g;
  }

  // Hessian plus the kernel directions (and identity on isolated vertices),
  // so the Newton system is definite while the step stays orthogonal to the kernel.
  Eigen::MatrixXd newton_matrix(const Eigen::MatrixXd& z) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
    for (Eigen::Index i = 0; i < m(); ++i)
      for (Eigen::Index j = 0; j < n(); ++j) {
        if (!live(i, j)) continue;
        const double w = mode == Mode::ZeroOne ? z(i, j) * (1.0 - z(i, j)) : z(i, j) * (1.0 + z(i, j));
        a(i, i) += w;
        a(m() + j, m() + j) += w;
        a(i, m() + j) += w;
        a(m() + j, i) += w;
      }
    for (int c = 0; c < n_components; ++c) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(dim());
      for (Eigen::Index v = 0; v < dim(); ++v)
        if (component[v] == c) u[v] = v < m() ? 1.0 : -1.0;
      a += u * u.transpose() / u.squaredNorm();
    }
    for (Eigen::Index v = 0; v < dim(); ++v)
      if (component[v] < 0) a(v, v) = 1.0;
    return a;
  }

  void fix_gauge(Eigen::VectorXd& x) const {
    for (int c = 0; c < n_components; ++c) {
      double sum = 0.0;
      Eigen::Index count = 0;
      for (Eigen::Index i = 0; i < m(); ++i)
        if (component[i] == c) {
          sum += x[i];
          ++count;
        }
      const double delta = sum / static_cast<double>(count);
      for (Eigen::Index v = 0; v < dim(); ++v)
        if (component[v] == c) x[v] += v < m() ? -delta : delta;
    }
  }

  double boundary_distance(const Eigen::MatrixXd& z) const {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m(); ++i)
      for (Eigen::Index j = 0; j < n(); ++j)
        if (live(i, j)) d = std::min(d, mode == Mode::ZeroOne ? std::min(z(i, j), 1.0 - z(i, j)) : z(i, j));
    return d;
  }
};

MaxEntSolution finish(const Problem& p, const Eigen::VectorXd& x, double value, int iterations, bool boundary) {
  MaxEntSolution sol;
  sol.mode = p.mode;
  sol.Z = p.means(x);
  sol.dual.s = x.head(p.m());
  sol.dual.t = x.tail(p.n());
  if (p.mode == Mode::NonNeg) {
    // zero margins: z = 0, i.e. e^{-s} = 0
    const double inf = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.m(); ++i)
      if (p.margins.rows()[i] == 0) sol.dual.s[i] = inf;
    for (Eigen::Index j = 0; j < p.n(); ++j)
      if (p.margins.cols()[j] == 0) sol.dual.t[j] = inf;
  }
  sol.entropy = entropy(p.mode, sol.Z);
  sol.log_alpha = sol.entropy;
  sol.dual_objective = value;
  sol.residual = margin_residual(sol.Z, p.margins);
  sol.iterations = iterations;
  sol.no_interior = boundary;
  return sol;
}

MaxEntSolution solve(const Problem& p, Eigen::VectorXd x, const SolverOptions& options) {
  const double N = static_cast<double>(p.margins.total());
  const double target = options.tolerance * (1.0 + N);
  p.fix_gauge(x);
  double f = p.value(x);

  auto no_interior = [&](int it, const std::string& why) -> MaxEntSolution {
    if (options.allow_boundary) return finish(p, x, f, it, true);
    throw Error(ErrorKind::NoInterior, why);
  };

  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd z = p.means(x);
    const Eigen::VectorXd g = p.gradient(z);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= target) {
      if (p.mode == Mode::ZeroOne && p.boundary_distance(z) < options.boundary_epsilon)
        return no_interior(it, "maximum-entropy matrix touches the boundary of the 0-1 polytope");
      return finish(p, x, f, it, false);
    }
    if (p.mode == Mode::ZeroOne && x.lpNorm<Eigen::Infinity>() > options.divergence_threshold)
      return no_interior(it, "dual variables diverge; the margin polytope has empty interior");

    Eigen::VectorXd step;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(p.newton_matrix(z));
    if (ldlt.info() == Eigen::Success) step = -ldlt.solve(g);
    if (step.size() == 0 || !step.allFinite() || g.dot(step) >= 0.0) step = -g;

    const double slope = g.dot(step);
    // predicted decrease below the resolution of f: compare gradient norms instead
    const bool flat = -slope <= 1e-13 * (1.0 + std::abs(f));
    double a = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, a *= 0.5) {
      Eigen::VectorXd trial = x + a * step;
      if (!p.in_domain(trial)) continue;
      const double ft = p.value(trial);
      const bool decrease = flat ? p.gradient(p.means(trial)).lpNorm<Eigen::Infinity>() < gnorm
                                 : ft <= f + 1e-4 * a * slope;
      if (std::isfinite(ft) && decrease) {
        x = std::move(trial);
        p.fix_gauge(x);
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no representable decrease left; accept if within roundoff of stationarity
      if (gnorm <= 1e-8 * (1.0 + N)) return finish(p, x, f, it, false);
      throw Error(ErrorKind::NotConverged, "line search stalled with gradient norm " + std::to_string(gnorm));
    }
  }
  throw Error(ErrorKind::NotConverged, "no convergence after " + std::to_string(options.max_iterations) + " iterations");
}

}  // namespace

ObjectiveValue objective_G(Mode mode, const Margins& margins, const DualPoint& dual,
                           const std::optional<CellMask>& mask) {
  const auto m = margins.m();
  const auto n = margins.n();
  if (dual.s.size() != m || dual.t.size() != n)
    throw Error(ErrorKind::LengthMismatch, "dual point dimensions do not match margins");
  if (mask && (mask->rows() != m || mask->cols() != n))
    throw Error(ErrorKind::BadMargins, "mask shape does not match margins");
  const double sign = mode == Mode::ZeroOne ? 1.0 : -1.0;

  ObjectiveValue out;
  out.gradient = Eigen::VectorXd::Zero(m + n);
  // 0 * s_i is 0 even when s_i is infinite (fixed zero rows)
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto r = static_cast<double>(margins.rows()[i]);
    if (r != 0.0) out.value -= sign * r * dual.s[i];
    out.gradient[i] = -sign * r;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto c = static_cast<double>(margins.cols()[j]);
    if (c != 0.0) out.value -= sign * c * dual.t[j];
    out.gradient[m + j] = -sign * c;
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask && !(*mask)(i, j)) continue;
      const double u = dual.s[i] + dual.t[j];
      double z = 0.0;
      if (mode == Mode::ZeroOne) {
        out.value += softplus(u);
        z = cell_mean(mode, u);
      } else {
        if (!(u > 0.0))
          throw Error(ErrorKind::DomainViolation,
                      "s_" + std::to_string(i) + " + t_" + std::to_string(j) + " must be positive");
        out.value -= std::log(-std::expm1(-u));
        z = cell_mean(mode, u);
      }
      out.gradient[i] += sign * z;
      out.gradient[m + j] += sign * z;
    }
  return out;
}

MaxEntSolution solve_maxent_01(const Margins& margins, const std::optional<CellMask>& mask,
                               const SolverOptions& options) {
  const Problem p(Mode::ZeroOne, margins, mask);
  return solve(p, Eigen::VectorXd::Zero(p.dim()), options);
}

MaxEntSolution solve_maxent_nonneg(const Margins& margins, const std::optional<CellMask>& mask,
                                   const SolverOptions& options) {
  const Problem p(Mode::NonNeg, margins, mask);
  if (p.live_cells == 0) return finish(p, Eigen::VectorXd::Zero(p.dim()), 0.0, 0, false);
  // every x_i y_j = N / (N + cells), i.e. z = N / cells
  const double N = static_cast<double>(margins.total());
  const double start = 0.5 * std::log((static_cast<double>(p.live_cells) + N) / N);
  return solve(p, Eigen::VectorXd::Constant(p.dim(), start), options);
}

double van_der_waerden_log_factor(const Margins& margins) {
  const auto mn = static_cast<std::int64_t>(margins.m() * margins.n());
  double out = -log_power_over_factorial(mn);
  for (auto r : margins.rows()) out += log_power_over_factorial(margins.n() - r);
  for (auto c : margins.cols()) out += log_power_over_factorial(c);
  return out;
}

Bounds01 bounds_01(const Margins& margins, const SolverOptions& options) {
  const auto sol = solve_maxent_01(margins, std::nullopt, options);
  return {sol.log_alpha + van_der_waerden_log_factor(margins), sol.log_alpha};
}

BoundsNonNeg bounds_nonneg(const Margins& margins, const SolverOptions& options) {
  const auto sol = solve_maxent_nonneg(margins, std::nullopt, options);
  const double N = static_cast<double>(margins.total());
  return {sol.log_alpha, static_cast<double>(margins.m() + margins.n()) * (N > 0 ? std::log(N) : 0.0)};
}

Eigen::MatrixXd scaled_block_matrix(const Margins& margins, const MaxEntSolution& solution) {
  if (solution.mode != Mode::ZeroOne) throw Error(ErrorKind::OutOfRange, "block matrix scaling is zero-one only");
  const auto block = build_block_matrix(margins);
  const auto m = margins.m();
  const auto n = margins.n();
  const Eigen::ArrayXd x = solution.dual.s.array().exp();
  const Eigen::ArrayXd y = solution.dual.t.array().exp();

  Eigen::MatrixXd b = block.matrix.cast<double>();
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto off = block.type1_offset(static_cast<std::size_t>(i));
    const auto rows = block.type1_block_sizes[i];
    if (rows > 0) b.middleRows(off, rows) /= x[i] * static_cast<double>(rows);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto off = block.type2_offset(static_cast<std::size_t>(j));
    const auto rows = block.type2_block_sizes[j];
    if (rows > 0) b.middleRows(off, rows) *= y[j] / static_cast<double>(rows);
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b.col(i * n + j) *= x[i] / (1.0 + x[i] * y[j]);
  return b;
}

double margin_residual(const Eigen::MatrixXd& Z, const Margins& margins) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    r = std::max(r, std::abs(Z.row(i).sum() - static_cast<double>(margins.rows()[i])));
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    r = std::max(r, std::abs(Z.col(j).sum() - static_cast<double>(margins.cols()[j])));
  return r;
}

}  // namespace contab

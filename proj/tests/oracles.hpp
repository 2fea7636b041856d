#pragma once

// Test-only ground truth, deliberately sharing no code with the library paths
// it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "contab/margins.hpp"

namespace oracle {

using contab::BigCount;
using contab::IntMatrix;
using contab::Margins;

inline bool matches(const IntMatrix& d, const Margins& mg) {
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    if (d.row(i).sum() != mg.rows()[i]) return false;
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    if (d.col(j).sum() != mg.cols()[j]) return false;
  return true;
}

/// Every 0-1 matrix of the shape, by bitmask; bit (i*n + j) is cell (i, j).
inline void all_01(Eigen::Index m, Eigen::Index n, const std::function<void(const IntMatrix&)>& f) {
  const auto cells = m * n;
  IntMatrix d(m, n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    for (Eigen::Index c = 0; c < cells; ++c) d(c / n, c % n) = (mask >> c) & 1;
    f(d);
  }
}

inline std::int64_t brute_count_01(const Margins& mg, const contab::CellMask* mask = nullptr) {
  std::int64_t k = 0;
  all_01(mg.m(), mg.n(), [&](const IntMatrix& d) {
    if (mask && ((d.array() != 0) && !mask->array()).any()) return;
    if (matches(d, mg)) ++k;
  });
  return k;
}

/// Odometer over all matrices with entries 0..cap.
inline void all_bounded(Eigen::Index m, Eigen::Index n, std::int64_t cap,
                        const std::function<void(const IntMatrix&)>& f) {
  IntMatrix d = IntMatrix::Zero(m, n);
  const auto cells = m * n;
  while (true) {
    f(d);
    Eigen::Index c = 0;
    while (c < cells) {
      auto& v = d(c / n, c % n);
      if (v < cap) {
        ++v;
        break;
      }
      v = 0;
      ++c;
    }
    if (c == cells) return;
  }
}

inline std::int64_t brute_count_nonneg(const Margins& mg) {
  std::int64_t cap = 0;
  for (auto r : mg.rows()) cap = std::max(cap, r);
  std::int64_t k = 0;
  all_bounded(mg.m(), mg.n(), cap, [&](const IntMatrix& d) {
    if (matches(d, mg)) ++k;
  });
  return k;
}

/// Permanent straight from the definition.
inline BigCount permanent_by_permutations(const IntMatrix& a) {
  const auto k = a.rows();
  std::vector<Eigen::Index> sigma(static_cast<std::size_t>(k));
  std::iota(sigma.begin(), sigma.end(), 0);
  BigCount total = 0;
  do {
    BigCount prod = 1;
    for (Eigen::Index i = 0; i < k && prod != 0; ++i) prod *= a(i, sigma[i]);
    total += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

/// Central differences of a scalar function of an Eigen vector.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd a = x, b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// min over x, y > 0 of ln F_0 = sum ln(1 + x_i y_j) - sum r_i ln x_i - sum c_j ln y_j
/// by alternating exact one-dimensional minimization (bisection on ln x_i).
inline double min_log_F0(const Margins& mg, int sweeps = 4000) {
  const auto m = mg.m(), n = mg.n();
  std::vector<double> lx(static_cast<std::size_t>(m), 0.0), ly(static_cast<std::size_t>(n), 0.0);
  auto solve1d = [](double target, const std::function<double(double)>& sum_at) {
    double lo = -60, hi = 60;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sum_at(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto logistic = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  for (int s = 0; s < sweeps; ++s) {
    for (Eigen::Index i = 0; i < m; ++i)
      lx[i] = solve1d(static_cast<double>(mg.rows()[i]), [&](double v) {
        double t = 0;
        for (Eigen::Index j = 0; j < n; ++j) t += logistic(v + ly[j]);
        return t;
      });
    for (Eigen::Index j = 0; j < n; ++j)
      ly[j] = solve1d(static_cast<double>(mg.cols()[j]), [&](double v) {
        double t = 0;
        for (Eigen::Index i = 0; i < m; ++i) t += logistic(lx[i] + v);
        return t;
      });
  }
  double f = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) f += std::log1p(std::exp(lx[i] + ly[j]));
  for (Eigen::Index i = 0; i < m; ++i) f -= static_cast<double>(mg.rows()[i]) * lx[i];
  for (Eigen::Index j = 0; j < n; ++j) f -= static_cast<double>(mg.cols()[j]) * ly[j];
  return f;
}

/// All balanced margin pairs of the given shape with entries in [lo, hi].
inline std::vector<Margins> margin_family(Eigen::Index m, Eigen::Index n, std::int64_t lo, std::int64_t hi) {
  std::vector<Margins> out;
  std::vector<std::int64_t> r(static_cast<std::size_t>(m), lo), c(static_cast<std::size_t>(n), lo);
  auto next = [lo, hi](std::vector<std::int64_t>& v) {
    for (auto& x : v) {
      if (x < hi) {
        ++x;
        return true;
      }
      x = lo;
    }
    return false;
  };
  do {
    std::fill(c.begin(), c.end(), lo);
    do {
      if (std::accumulate(r.begin(), r.end(), std::int64_t{0}) == std::accumulate(c.begin(), c.end(), std::int64_t{0}))
        out.push_back(contab::validate_margins(r, c));
    } while (next(c));
  } while (next(r));
  return out;
}

}  // namespace oracle

#include "contab/margins.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "contab/error.hpp"

namespace contab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::BadMargins: return "BadMargins";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NoInterior: return "NoInterior";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::KernelDimensionError: return "KernelDimensionError";
    case ErrorKind::NonIntegerAverage: return "NonIntegerAverage";
    case ErrorKind::DominationViolated: return "DominationViolated";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool Margins::all_positive() const noexcept {
  auto pos = [](std::int64_t v) { return v > 0; };
  return std::all_of(rows_.begin(), rows_.end(), pos) && std::all_of(cols_.begin(), cols_.end(), pos);
}

Margins Margins::transposed() const { return validate_margins(cols_, rows_); }

Margins validate_margins(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols) {
  if (rows.empty() || cols.empty()) throw Error(ErrorKind::BadMargins, "need m >= 1 and n >= 1");
  auto negative = [](std::int64_t v) { return v < 0; };
  if (std::any_of(rows.begin(), rows.end(), negative) || std::any_of(cols.begin(), cols.end(), negative))
    throw Error(ErrorKind::NegativeEntry, "margins must be non-negative");
  const auto rsum = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
  const auto csum = std::accumulate(cols.begin(), cols.end(), std::int64_t{0});
  if (rsum != csum)
    throw Error(ErrorKind::Unbalanced,
                "row total " + std::to_string(rsum) + " != column total " + std::to_string(csum));
  Margins out;
  out.rows_.assign(rows.begin(), rows.end());
  out.cols_.assign(cols.begin(), cols.end());
  out.total_ = rsum;
  return out;
}

bool gale_ryser_feasible(const Margins& margins) {
  const auto m = margins.m();
  const auto n = margins.n();
  const auto& r = margins.rows();
  std::vector<std::int64_t> c = margins.cols();
  if (std::any_of(r.begin(), r.end(), [n](auto v) { return v > n; })) return false;
  if (std::any_of(c.begin(), c.end(), [m](auto v) { return v > m; })) return false;
  std::sort(c.begin(), c.end(), std::greater<>());
  std::int64_t prefix = 0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    prefix += c[k - 1];
    std::int64_t cap = 0;
    for (auto ri : r) cap += std::min<std::int64_t>(ri, k);
    if (cap < prefix) return false;
  }
  return true;
}

bool dominates(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "dominates: vectors differ in length");
  std::vector<std::int64_t> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  std::int64_t px = 0, py = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    px += xs[k];
    py += ys[k];
    if (px < py) return false;
  }
  return px == py;
}

Margins clone_margins(const Margins& margins, std::int64_t k) {
  if (k < 1) throw Error(ErrorKind::OutOfRange, "clone factor must be >= 1");
  auto expand = [k](const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> out;
    out.reserve(v.size() * static_cast<std::size_t>(k));
    for (auto x : v)
      for (std::int64_t c = 0; c < k; ++c) out.push_back(k * x);
    return out;
  };
  return validate_margins(expand(margins.rows()), expand(margins.cols()));
}

Margins margins_of(const IntMatrix& d) {
  std::vector<std::int64_t> r(static_cast<std::size_t>(d.rows())), c(static_cast<std::size_t>(d.cols()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) r[i] = d.row(i).sum();
  for (Eigen::Index j = 0; j < d.cols(); ++j) c[j] = d.col(j).sum();
  return validate_margins(r, c);
}

bool has_margins(const IntMatrix& d, const Margins& margins) {
  if (d.rows() != margins.m() || d.cols() != margins.n()) return false;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    if (d.row(i).sum() != margins.rows()[i]) return false;
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    if (d.col(j).sum() != margins.cols()[j]) return false;
  return true;
}

CellMask full_mask(const Margins& margins) { return CellMask::Constant(margins.m(), margins.n(), true); }

void check_mask(const Margins& margins, const CellMask& mask) {
  if (mask.rows() != margins.m() || mask.cols() != margins.n())
    throw Error(ErrorKind::BadMargins, "mask shape does not match margins");
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    if (margins.rows()[i] > 0 && !mask.row(i).any())
      throw Error(ErrorKind::Infeasible, "row " + std::to_string(i) + " has a positive sum but no permitted cell");
  for (Eigen::Index j = 0; j < mask.cols(); ++j)
    if (margins.cols()[j] > 0 && !mask.col(j).any())
      throw Error(ErrorKind::Infeasible, "column " + std::to_string(j) + " has a positive sum but no permitted cell");
}

}  // namespace contab

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace contab {

using BigCount = boost::multiprecision::cpp_int;

/// Dense integer matrix, row-major so enumeration order matches storage order.
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// true = cell permitted, false = entry forced to 0.
using CellMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Mode { ZeroOne, NonNeg };

/// Row sums R and column sums C of an m x n matrix with common total N.
class Margins {
 public:
  const std::vector<std::int64_t>& rows() const noexcept { return rows_; }
  const std::vector<std::int64_t>& cols() const noexcept { return cols_; }
  std::int64_t total() const noexcept { return total_; }
  Eigen::Index m() const noexcept { return static_cast<Eigen::Index>(rows_.size()); }
  Eigen::Index n() const noexcept { return static_cast<Eigen::Index>(cols_.size()); }

  bool all_positive() const noexcept;

  /// The same margins with R and C swapped (margins of the transposed matrices).
  Margins transposed() const;

  friend bool operator==(const Margins&, const Margins&) = default;

 private:
  friend Margins validate_margins(std::span<const std::int64_t>, std::span<const std::int64_t>);
  std::vector<std::int64_t> rows_;
  std::vector<std::int64_t> cols_;
  std::int64_t total_ = 0;
};

/// Throws Unbalanced, NegativeEntry, or BadMargins (empty list).
Margins validate_margins(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols);

inline Margins validate_margins(const std::vector<std::int64_t>& rows,
                                const std::vector<std::int64_t>& cols) {
  return validate_margins(std::span<const std::int64_t>(rows), std::span<const std::int64_t>(cols));
}

/// Gale-Ryser: is there a 0-1 matrix with these margins?
bool gale_ryser_feasible(const Margins& margins);

/// Majorization of sorted vectors: partial sums of x dominate those of y, equal totals.
bool dominates(std::span<const std::int64_t> x, std::span<const std::int64_t> y);

inline bool dominates(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
  return dominates(std::span<const std::int64_t>(x), std::span<const std::int64_t>(y));
}

/// Each r_i becomes k copies of k*r_i (likewise for C); the total becomes k^2 N.
Margins clone_margins(const Margins& margins, std::int64_t k);

/// Margins of a concrete matrix.
Margins margins_of(const IntMatrix& d);

bool has_margins(const IntMatrix& d, const Margins& margins);

CellMask full_mask(const Margins& margins);

/// Throws BadMargins on a shape mismatch, Infeasible if a row or column with positive
/// margin has no permitted cell.
void check_mask(const Margins& margins, const CellMask& mask);

}  // namespace contab

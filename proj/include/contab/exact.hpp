#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "contab/margins.hpp"

namespace contab {

inline constexpr std::int64_t kDefaultEnumerationGuard = 36;  // max m*n
inline constexpr Eigen::Index kDefaultPermanentGuard = 24;    // max order k

/// Calls `visit` once per 0-1 matrix with the given margins, in lexicographic
/// row-major order (0 before 1). Throws TooLarge when m*n exceeds `guard`.
void for_each_01(const Margins& margins, const std::optional<CellMask>& mask,
                 const std::function<void(const IntMatrix&)>& visit,
                 std::int64_t guard = kDefaultEnumerationGuard);

std::vector<IntMatrix> enumerate_01(const Margins& margins, const std::optional<CellMask>& mask = std::nullopt,
                                    std::int64_t guard = kDefaultEnumerationGuard);

/// Non-negative analogue of for_each_01 (lexicographic, smaller values first).
void for_each_nonneg(const Margins& margins, const std::optional<CellMask>& mask,
                     const std::function<void(const IntMatrix&)>& visit,
                     std::int64_t guard = kDefaultEnumerationGuard);

/// Natural log of an exact count; -inf for 0.
double log_of(const BigCount& count);

/// |A_0(R,C)| by column dynamic programming over residual row sums.
BigCount count_01(const Margins& margins, const std::optional<CellMask>& mask = std::nullopt);

/// |A_+(R,C)| by column dynamic programming over residual row sums.
BigCount count_nonneg(const Margins& margins, const std::optional<CellMask>& mask = std::nullopt);

inline BigCount count_exact(const Margins& margins, Mode mode, const std::optional<CellMask>& mask = std::nullopt) {
  return mode == Mode::ZeroOne ? count_01(margins, mask) : count_nonneg(margins, mask);
}

/// Ryser's formula with Gray-code subset order. Throws NotSquare or TooLarge.
BigCount permanent(const IntMatrix& square, Eigen::Index guard = kDefaultPermanentGuard);

/// The mn x mn 0-1 matrix whose permanent, divided by prod (n-r_i)! prod c_j!, is |A_0(R,C)|.
///
/// Rows: m type-I blocks of n - r_i rows, then n type-II blocks of c_j rows.
/// Columns: m blocks of n columns; column (i, j) has index i*n + j.
/// A type-I row of block i is all ones on column block i; a type-II row of
/// block j has a one in column (i, j) for every i.
struct BlockMatrix01 {
  IntMatrix matrix;
  std::vector<Eigen::Index> type1_block_sizes;  // n - r_i
  std::vector<Eigen::Index> type2_block_sizes;  // c_j
  Eigen::Index column_block_width = 0;          // n

  /// First row index of type-I block i / type-II block j.
  Eigen::Index type1_offset(std::size_t i) const;
  Eigen::Index type2_offset(std::size_t j) const;
};

/// Throws BadMargins when some r_i > n or c_j > m.
BlockMatrix01 build_block_matrix(const Margins& margins);

/// Evaluates |A_0| = per B / (prod (n-r_i)! prod c_j!). Throws TooLarge when mn > guard.
BigCount count_01_via_permanent(const Margins& margins, Eigen::Index guard = kDefaultPermanentGuard);

}  // namespace contab

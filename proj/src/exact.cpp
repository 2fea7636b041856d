#include "contab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "contab/error.hpp"

namespace contab {

namespace {

using State = std::vector<std::int64_t>;

void check_guard(const Margins& margins, std::int64_t guard) {
  if (margins.m() * margins.n() > guard)
    throw Error(ErrorKind::TooLarge, "enumeration of " + std::to_string(margins.m()) + "x" +
                                         std::to_string(margins.n()) + " matrices exceeds guard " +
                                         std::to_string(guard));
}

// Backtracking over cells in row-major order. For each cell the admissible
// values are [lo, hi]; lo is forced up when no permitted cell remains later in
// the same row (or column) to absorb the residual.
class CellEnumerator {
 public:
  CellEnumerator(const Margins& margins, const std::optional<CellMask>& mask, std::int64_t cap,
                 const std::function<void(const IntMatrix&)>& visit)
      : m_(margins.m()), n_(margins.n()), cap_(cap), visit_(visit),
        row_left_(margins.rows()), col_left_(margins.cols()),
        mask_(mask ? *mask : full_mask(margins)), d_(IntMatrix::Zero(m_, n_)) {
    if (mask) check_mask_shape(margins);
    // permitted cells strictly after (i, j) in row i / below (i, j) in column j
    row_after_ = IntMatrix::Zero(m_, n_);
    col_after_ = IntMatrix::Zero(m_, n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      for (Eigen::Index j = n_ - 2; j >= 0; --j) row_after_(i, j) = row_after_(i, j + 1) + mask_(i, j + 1);
    for (Eigen::Index j = 0; j < n_; ++j)
      for (Eigen::Index i = m_ - 2; i >= 0; --i) col_after_(i, j) = col_after_(i + 1, j) + mask_(i + 1, j);
  }

  void run() {
    for (Eigen::Index i = 0; i < m_; ++i)
      if (row_left_[i] > cap_ * mask_.row(i).count()) return;
    for (Eigen::Index j = 0; j < n_; ++j)
      if (col_left_[j] > cap_ * mask_.col(j).count()) return;
    step(0);
  }

 private:
  void check_mask_shape(const Margins& margins) const {
    if (mask_.rows() != margins.m() || mask_.cols() != margins.n())
      throw Error(ErrorKind::BadMargins, "mask shape does not match margins");
  }

  void step(Eigen::Index cell) {
    if (cell == m_ * n_) {
      visit_(d_);
      return;
    }
    const Eigen::Index i = cell / n_;
    const Eigen::Index j = cell % n_;
    std::int64_t hi = 0;
    if (mask_(i, j)) hi = std::min({row_left_[i], col_left_[j], cap_});
    // everything the rest of the row / column can still take
    const std::int64_t row_room = cap_ * row_after_(i, j);
    const std::int64_t col_room = cap_ * col_after_(i, j);
    const std::int64_t lo = std::max<std::int64_t>({0, row_left_[i] - row_room, col_left_[j] - col_room});
    for (std::int64_t v = lo; v <= hi; ++v) {
      d_(i, j) = v;
      row_left_[i] -= v;
      col_left_[j] -= v;
      step(cell + 1);
      row_left_[i] += v;
      col_left_[j] += v;
    }
    d_(i, j) = 0;
  }

  Eigen::Index m_, n_;
  std::int64_t cap_;
  const std::function<void(const IntMatrix&)>& visit_;
  std::vector<std::int64_t> row_left_, col_left_;
  CellMask mask_;
  IntMatrix d_;
  IntMatrix row_after_, col_after_;
};

BigCount binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  BigCount out = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

// Groups of equal values in a descending-sorted state.
struct Group {
  std::int64_t value;
  std::int64_t size;
};

std::vector<Group> group_sorted(const State& s) {
  std::vector<Group> out;
  for (auto v : s) {
    if (!out.empty() && out.back().value == v)
      ++out.back().size;
    else
      out.push_back({v, 1});
  }
  return out;
}

State sorted_desc(State s) {
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

// --- zero-one, symmetric (no mask) ---------------------------------------

class ZeroOneCounter {
 public:
  explicit ZeroOneCounter(const Margins& margins) : cols_(margins.cols()), memo_(cols_.size()) {}

  BigCount count(const State& start) { return solve(0, sorted_desc(start)); }

 private:
  BigCount solve(std::size_t j, const State& state) {
    if (j == cols_.size()) return std::all_of(state.begin(), state.end(), [](auto v) { return v == 0; }) ? 1 : 0;
    const auto remaining = static_cast<std::int64_t>(cols_.size() - j);
    if (!state.empty() && state.front() > remaining) return 0;
    auto& table = memo_[j];
    if (auto it = table.find(state); it != table.end()) return it->second;
    const auto groups = group_sorted(state);
    BigCount total = 0;
    State next;
    next.reserve(state.size());
    distribute(j, groups, 0, cols_[j], BigCount(1), next, total);
    table.emplace(state, total);
    return total;
  }

  // choose k rows from group g to receive a one in column j
  void distribute(std::size_t j, const std::vector<Group>& groups, std::size_t g, std::int64_t need,
                  const BigCount& weight, State& next, BigCount& total) {
    if (g == groups.size()) {
      if (need == 0) total += weight * solve(j + 1, sorted_desc(next));
      return;
    }
    const auto [value, size] = groups[g];
    const std::int64_t kmax = value > 0 ? std::min(size, need) : 0;
    const auto base = next.size();
    for (std::int64_t k = 0; k <= kmax; ++k) {
      next.resize(base);
      for (std::int64_t c = 0; c < k; ++c) next.push_back(value - 1);
      for (std::int64_t c = k; c < size; ++c) next.push_back(value);
      distribute(j, groups, g + 1, need - k, weight * binomial(size, k), next, total);
    }
    next.resize(base);
  }

  std::vector<std::int64_t> cols_;
  std::vector<std::map<State, BigCount>> memo_;
};

// --- non-negative, symmetric (no mask) -----------------------------------

class NonNegCounter {
 public:
  explicit NonNegCounter(const Margins& margins) : cols_(margins.cols()), memo_(cols_.size()) {}

  BigCount count(const State& start) { return solve(0, sorted_desc(start)); }

 private:
  BigCount solve(std::size_t j, const State& state) {
    if (j + 1 == cols_.size()) return 1;  // last column takes the residual, sums already balance
    auto& table = memo_[j];
    if (auto it = table.find(state); it != table.end()) return it->second;
    const auto groups = group_sorted(state);
    BigCount total = 0;
    State next;
    next.reserve(state.size());
    over_groups(j, groups, 0, cols_[j], BigCount(1), next, total);
    table.emplace(state, total);
    return total;
  }

  void over_groups(std::size_t j, const std::vector<Group>& groups, std::size_t g, std::int64_t need,
                   const BigCount& weight, State& next, BigCount& total) {
    if (g == groups.size()) {
      if (need == 0) total += weight * solve(j + 1, sorted_desc(next));
      return;
    }
    std::vector<std::int64_t> amounts;
    amounts.reserve(static_cast<std::size_t>(groups[g].size));
    within_group(j, groups, g, need, groups[g].value, weight, amounts, next, total);
  }

  // Amounts for the rows of one group in non-increasing order; the number of
  // distinct assignments of that multiset is size! / prod(mult!).
  void within_group(std::size_t j, const std::vector<Group>& groups, std::size_t g, std::int64_t need,
                    std::int64_t cap, const BigCount& weight, std::vector<std::int64_t>& amounts, State& next,
                    BigCount& total) {
    const auto [value, size] = groups[g];
    if (static_cast<std::int64_t>(amounts.size()) == size) {
      const auto base = next.size();
      for (auto a : amounts) next.push_back(value - a);
      over_groups(j, groups, g + 1, need, weight * arrangements(amounts), next, total);
      next.resize(base);
      return;
    }
    for (std::int64_t a = std::min(cap, need); a >= 0; --a) {
      amounts.push_back(a);
      within_group(j, groups, g, need - a, a, weight, amounts, next, total);
      amounts.pop_back();
    }
  }

  static BigCount arrangements(const std::vector<std::int64_t>& sorted_amounts) {
    BigCount out = 1;
    std::int64_t placed = 0;
    std::size_t k = 0;
    while (k < sorted_amounts.size()) {
      std::size_t e = k;
      while (e < sorted_amounts.size() && sorted_amounts[e] == sorted_amounts[k]) ++e;
      const auto run = static_cast<std::int64_t>(e - k);
      out *= binomial(placed + run, run);
      placed += run;
      k = e;
    }
    return out;
  }

  std::vector<std::int64_t> cols_;
  std::vector<std::map<State, BigCount>> memo_;
};

// --- masked counters: exact residual vectors --------------------------------

class MaskedCounter {
 public:
  MaskedCounter(const Margins& margins, const CellMask& mask, std::int64_t cap)
      : cols_(margins.cols()), mask_(mask), cap_(cap), memo_(cols_.size()) {}

  BigCount count(const State& start) { return solve(0, start); }

 private:
  BigCount solve(std::size_t j, const State& state) {
    if (j == cols_.size()) return std::all_of(state.begin(), state.end(), [](auto v) { return v == 0; }) ? 1 : 0;
    auto& table = memo_[j];
    if (auto it = table.find(state); it != table.end()) return it->second;
    BigCount total = 0;
    State next = state;
    fill(j, 0, cols_[j], next, total);
    table.emplace(state, total);
    return total;
  }

  void fill(std::size_t j, std::size_t i, std::int64_t need, State& next, BigCount& total) {
    if (i == next.size()) {
      if (need == 0) total += solve(j + 1, next);
      return;
    }
    const auto col = static_cast<Eigen::Index>(j);
    const auto row = static_cast<Eigen::Index>(i);
    const std::int64_t hi = mask_(row, col) ? std::min({next[i], need, cap_}) : 0;
    for (std::int64_t a = 0; a <= hi; ++a) {
      next[i] -= a;
      fill(j, i + 1, need - a, next, total);
      next[i] += a;
    }
  }

  std::vector<std::int64_t> cols_;
  const CellMask& mask_;
  std::int64_t cap_;
  std::vector<std::map<State, BigCount>> memo_;
};

}  // namespace

double log_of(const BigCount& count) {
  if (count == 0) return -std::numeric_limits<double>::infinity();
  const auto bits = static_cast<long>(boost::multiprecision::msb(count));
  if (bits < 1000) return std::log(count.convert_to<double>());
  const long shift = bits - 60;
  const BigCount top = count >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

void for_each_01(const Margins& margins, const std::optional<CellMask>& mask,
                 const std::function<void(const IntMatrix&)>& visit, std::int64_t guard) {
  check_guard(margins, guard);
  CellEnumerator(margins, mask, 1, visit).run();
}

std::vector<IntMatrix> enumerate_01(const Margins& margins, const std::optional<CellMask>& mask,
                                    std::int64_t guard) {
  std::vector<IntMatrix> out;
  for_each_01(margins, mask, [&out](const IntMatrix& d) { out.push_back(d); }, guard);
  return out;
}

void for_each_nonneg(const Margins& margins, const std::optional<CellMask>& mask,
                     const std::function<void(const IntMatrix&)>& visit, std::int64_t guard) {
  check_guard(margins, guard);
  CellEnumerator(margins, mask, std::max<std::int64_t>(margins.total(), 1), visit).run();
}

namespace {

void check_mask_dimensions(const Margins& margins, const CellMask& mask) {
  if (mask.rows() != margins.m() || mask.cols() != margins.n())
    throw Error(ErrorKind::BadMargins, "mask shape does not match margins");
}

}  // namespace

// A mask that starves a row or column simply yields 0.
BigCount count_01(const Margins& margins, const std::optional<CellMask>& mask) {
  if (mask) {
    check_mask_dimensions(margins, *mask);
    return MaskedCounter(margins, *mask, 1).count(margins.rows());
  }
  if (!gale_ryser_feasible(margins)) return 0;
  return ZeroOneCounter(margins).count(margins.rows());
}

BigCount count_nonneg(const Margins& margins, const std::optional<CellMask>& mask) {
  if (mask) {
    check_mask_dimensions(margins, *mask);
    return MaskedCounter(margins, *mask, margins.total()).count(margins.rows());
  }
  BigCount out = NonNegCounter(margins).count(margins.rows());
  // A_+ is never empty for balanced margins
  if (out == 0) throw std::logic_error("count_nonneg: zero count for balanced margins");
  return out;
}

BigCount permanent(const IntMatrix& square, Eigen::Index guard) {
  if (square.rows() != square.cols()) throw Error(ErrorKind::NotSquare, "permanent needs a square matrix");
  const Eigen::Index k = square.rows();
  if (k > guard) throw Error(ErrorKind::TooLarge, "permanent order " + std::to_string(k) + " exceeds guard");
  if (k == 0) return 1;

  // Products fit in __int128 when (max absolute row sum)^k < 2^125.
  const auto max_row = square.cwiseAbs().rowwise().sum().maxCoeff();
  const bool narrow = max_row <= 1 || static_cast<double>(k) * std::log2(static_cast<double>(max_row)) < 125.0;

  // per A = (-1)^k sum_S (-1)^{|S|} prod_i sum_{j in S} a_ij
  std::vector<std::int64_t> row_sums(static_cast<std::size_t>(k), 0);
  BigCount total = 0;
  const std::uint64_t subsets = std::uint64_t{1} << k;
  std::uint64_t gray = 0;
  for (std::uint64_t step = 1; step < subsets; ++step) {
    const int bit = std::countr_zero(step);
    const std::uint64_t flip = std::uint64_t{1} << bit;
    gray ^= flip;
    const bool added = (gray & flip) != 0;
    for (Eigen::Index i = 0; i < k; ++i) row_sums[i] += added ? square(i, bit) : -square(i, bit);

    if (std::any_of(row_sums.begin(), row_sums.end(), [](auto v) { return v == 0; })) continue;
    const bool negative = ((k - std::popcount(gray)) & 1) != 0;
    if (narrow) {
      __int128 prod = 1;
      for (auto v : row_sums) prod *= v;
      if (negative) total -= prod;
      else total += prod;
    } else {
      BigCount prod = 1;
      for (auto v : row_sums) prod *= v;
      if (negative) total -= prod;
      else total += prod;
    }
  }
  return total;
}

Eigen::Index BlockMatrix01::type1_offset(std::size_t i) const {
  Eigen::Index off = 0;
  for (std::size_t a = 0; a < i; ++a) off += type1_block_sizes[a];
  return off;
}

Eigen::Index BlockMatrix01::type2_offset(std::size_t j) const {
  Eigen::Index off = type1_offset(type1_block_sizes.size());
  for (std::size_t b = 0; b < j; ++b) off += type2_block_sizes[b];
  return off;
}

BlockMatrix01 build_block_matrix(const Margins& margins) {
  const auto m = margins.m();
  const auto n = margins.n();
  for (auto r : margins.rows())
    if (r > n) throw Error(ErrorKind::BadMargins, "row sum exceeds the number of columns");
  for (auto c : margins.cols())
    if (c > m) throw Error(ErrorKind::BadMargins, "column sum exceeds the number of rows");

  BlockMatrix01 b;
  b.column_block_width = n;
  for (auto r : margins.rows()) b.type1_block_sizes.push_back(n - r);
  for (auto c : margins.cols()) b.type2_block_sizes.push_back(c);
  b.matrix = IntMatrix::Zero(m * n, m * n);

  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < n - margins.rows()[i]; ++k, ++row) b.matrix.block(row, i * n, 1, n).setOnes();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < margins.cols()[j]; ++k, ++row)
      for (Eigen::Index i = 0; i < m; ++i) b.matrix(row, i * n + j) = 1;
  return b;
}

BigCount count_01_via_permanent(const Margins& margins, Eigen::Index guard) {
  const auto m = margins.m();
  const auto n = margins.n();
  if (m * n > guard)
    throw Error(ErrorKind::TooLarge, "block matrix order " + std::to_string(m * n) + " exceeds permanent guard");
  for (auto r : margins.rows())
    if (r > n) return 0;
  for (auto c : margins.cols())
    if (c > m) return 0;

  const BigCount per = permanent(build_block_matrix(margins).matrix, guard);
  BigCount denom = 1;
  auto factorial = [](std::int64_t k) {
    BigCount f = 1;
    for (std::int64_t i = 2; i <= k; ++i) f *= i;
    return f;
  };
  for (auto r : margins.rows()) denom *= factorial(n - r);
  for (auto c : margins.cols()) denom *= factorial(c);
  if (per % denom != 0) throw std::logic_error("count_01_via_permanent: permanent not divisible by factorials");
  return per / denom;
}

}  // namespace contab

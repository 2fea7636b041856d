#include "contab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contab/exact.hpp"

namespace contab {

namespace {

double slack_01(const Margins& avg) {
  const auto n = avg.n();
  const auto m = avg.m();
  const auto mn = static_cast<std::int64_t>(m * n);
  double out = log_power_over_factorial(mn);
  for (auto r : avg.rows()) out -= log_power_over_factorial(n - r);
  for (auto c : avg.cols()) out -= log_power_over_factorial(c);
  return out;
}

double slack_nonneg(const Margins& avg) {
  double rows = 0.0, cols = 0.0;
  for (auto r : avg.rows()) rows -= log_power_over_factorial(r);
  for (auto c : avg.cols()) cols -= log_power_over_factorial(c);
  return log_power_over_factorial(avg.total()) + std::min(rows, cols);
}

}  // namespace

double independence_estimate_01(const Margins& margins) {
  const auto m = margins.m();
  const auto n = margins.n();
  const auto mn = static_cast<std::int64_t>(m * n);
  if (margins.total() > mn) throw Error(ErrorKind::OutOfRange, "N exceeds mn");
  double out = -log_binomial(mn, margins.total());
  for (auto r : margins.rows()) {
    if (r > n) throw Error(ErrorKind::OutOfRange, "row sum exceeds n");
    out += log_binomial(n, r);
  }
  for (auto c : margins.cols()) {
    if (c > m) throw Error(ErrorKind::OutOfRange, "column sum exceeds m");
    out += log_binomial(m, c);
  }
  return out;
}

double independence_estimate_nonneg(const Margins& margins) {
  const auto m = static_cast<std::int64_t>(margins.m());
  const auto n = static_cast<std::int64_t>(margins.n());
  double out = -log_binomial(margins.total() + m * n - 1, m * n - 1);
  for (auto r : margins.rows()) out += log_binomial(r + n - 1, n - 1);
  for (auto c : margins.cols()) out += log_binomial(c + m - 1, m - 1);
  return out;
}

double slack_budget(const Margins& margins, Mode mode, double slack_factor) {
  const double mn = static_cast<double>(margins.m() * margins.n());
  const double scale = mode == Mode::ZeroOne ? mn : static_cast<double>(margins.total());
  return slack_factor * static_cast<double>(margins.m() + margins.n()) * std::log(std::max(scale, 1.0));
}

CorrelationReport correlation_diagnostic(const Margins& margins, Mode mode, const DiagnosticOptions& options) {
  CorrelationReport rep;
  rep.mode = mode;
  rep.log_alpha = solve_maxent(mode, margins, std::nullopt, options.solver).log_alpha;
  rep.log_independence = independence_estimate(mode, margins);
  rep.gap = rep.log_independence - rep.log_alpha;
  rep.slack_budget = slack_budget(margins, mode, options.slack_factor);
  if (std::abs(rep.gap) <= rep.slack_budget)
    rep.direction = Direction::NearNeutral;
  else
    rep.direction = rep.gap > 0 ? Direction::Repel : Direction::Attract;
  return rep;
}

LogConcavityReport log_concavity_check(const std::vector<WeightedMargins>& items, Mode mode, bool use_exact,
                                       std::int64_t exact_guard) {
  if (items.empty()) throw Error(ErrorKind::OutOfRange, "log_concavity_check needs at least one item");
  const auto m = items.front().margins.m();
  const auto n = items.front().margins.n();
  double wsum = 0.0;
  for (const auto& it : items) {
    if (it.margins.m() != m || it.margins.n() != n)
      throw Error(ErrorKind::LengthMismatch, "all margins must share dimensions");
    if (it.weight < 0.0) throw Error(ErrorKind::OutOfRange, "weights must be non-negative");
    wsum += it.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw Error(ErrorKind::OutOfRange, "weights must sum to 1");

  auto average = [&](auto pick, Eigen::Index len) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(len));
    for (Eigen::Index k = 0; k < len; ++k) {
      double v = 0.0;
      for (const auto& it : items) v += it.weight * static_cast<double>(pick(it.margins)[k]);
      const double r = std::round(v);
      if (std::abs(v - r) > 1e-9) throw Error(ErrorKind::NonIntegerAverage, "weighted average margin is not integral");
      out[k] = static_cast<std::int64_t>(r);
    }
    return out;
  };
  LogConcavityReport rep{validate_margins(average([](const Margins& x) { return x.rows(); }, m),
                                          average([](const Margins& x) { return x.cols(); }, n))};

  bool exact = use_exact && m * n <= exact_guard;
  rep.heuristic = !exact;
  auto value = [&](const Margins& x) {
    if (exact) return log_of(count_exact(x, mode));
    if (mode == Mode::ZeroOne && !gale_ryser_feasible(x)) return -std::numeric_limits<double>::infinity();
    SolverOptions opts;
    opts.allow_boundary = true;
    return solve_maxent(mode, x, std::nullopt, opts).log_alpha;
  };

  rep.lhs_log = value(rep.average);
  rep.rhs_log = 0.0;
  for (const auto& it : items) {
    if (it.weight == 0.0) continue;
    rep.rhs_log += it.weight * value(it.margins);
  }
  const double ninf = -std::numeric_limits<double>::infinity();
  auto fits = [](const std::vector<std::int64_t>& v, Eigen::Index cap) {
    return std::all_of(v.begin(), v.end(), [cap](auto x) { return x <= cap; });
  };
  // an average row sum above n forces some item above n, so rhs is -inf anyway
  const bool valid_slack = mode == Mode::NonNeg || (fits(rep.average.rows(), n) && fits(rep.average.cols(), m));
  if (valid_slack) rep.precise_slack_log = mode == Mode::ZeroOne ? slack_01(rep.average) : slack_nonneg(rep.average);
  if (rep.rhs_log == ninf) {
    rep.holds_conjectured = rep.holds_precise = true;
  } else {
    rep.holds_conjectured = rep.lhs_log >= rep.rhs_log - 1e-9;
    rep.holds_precise = rep.lhs_log + rep.precise_slack_log >= rep.rhs_log - 1e-9;
  }
  return rep;
}

bool domination_monotonicity_check(const Margins& base, const Margins& stronger, Mode mode) {
  if (base.m() != stronger.m() || base.n() != stronger.n())
    throw Error(ErrorKind::LengthMismatch, "margins must share dimensions");
  if (!dominates(stronger.rows(), base.rows()) || !dominates(stronger.cols(), base.cols()))
    throw Error(ErrorKind::DominationViolated, "stronger margins do not dominate base margins");
  return count_exact(base, mode) >= count_exact(stronger, mode);
}

}  // namespace contab

#pragma once

#include <optional>
#include <vector>

#include "contab/maxent.hpp"

namespace contab {

/// ln I_0 = -ln C(mn, N) + sum ln C(n, r_i) + sum ln C(m, c_j). Throws OutOfRange
/// when some r_i > n, c_j > m or N > mn.
double independence_estimate_01(const Margins& margins);

/// ln I_+ = -ln C(N+mn-1, mn-1) + sum ln C(r_i+n-1, n-1) + sum ln C(c_j+m-1, m-1).
double independence_estimate_nonneg(const Margins& margins);

inline double independence_estimate(Mode mode, const Margins& margins) {
  return mode == Mode::ZeroOne ? independence_estimate_01(margins) : independence_estimate_nonneg(margins);
}

enum class Direction { Repel, Attract, NearNeutral };

struct CorrelationReport {
  Mode mode = Mode::ZeroOne;
  double log_alpha = 0.0;
  double log_independence = 0.0;
  double gap = 0.0;  // log_independence - log_alpha
  Direction direction = Direction::NearNeutral;
  double slack_budget = 0.0;
};

struct DiagnosticOptions {
  double slack_factor = 2.0;  // band = slack_factor * (m+n) * ln(mn) (zero-one) or ln N (non-negative)
  SolverOptions solver{};
};

/// Compares the independence estimate against log alpha; the sign of the gap
/// beyond the neutral band is the repel/attract verdict.
CorrelationReport correlation_diagnostic(const Margins& margins, Mode mode, const DiagnosticOptions& options = {});

double slack_budget(const Margins& margins, Mode mode, double slack_factor = 2.0);

struct WeightedMargins {
  Margins margins;
  double weight = 0.0;
};

struct LogConcavityReport {
  Margins average;
  double lhs_log = 0.0;  // ln |A(R, C)| of the weighted average (or log alpha)
  double rhs_log = 0.0;  // sum beta_k ln |A(R_k, C_k)|
  double precise_slack_log = 0.0;
  bool holds_conjectured = false;
  bool holds_precise = false;
  bool heuristic = false;  // log alpha used in place of exact counts
};

/// Checks |A(R,C)| >= prod |A(R_k,C_k)|^{beta_k} and its sharpened form with the
/// van der Waerden-type slack. Weights must be non-negative and sum to 1; the
/// weighted average margins must be integral (NonIntegerAverage otherwise). With
/// use_exact the exact counters are used when every instance has m*n <= exact_guard,
/// otherwise log alpha stands in and the report is marked heuristic.
LogConcavityReport log_concavity_check(const std::vector<WeightedMargins>& items, Mode mode, bool use_exact,
                                       std::int64_t exact_guard = 36);

/// Exact-count check of |A(base)| >= |A(stronger)| where stronger dominates base
/// in rows and columns. Throws DominationViolated if it does not.
bool domination_monotonicity_check(const Margins& base, const Margins& stronger, Mode mode);

}  // namespace contab

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "contab/maxent.hpp"
#include "contab/random.hpp"

namespace contab {

/// Independent cells with Pr{x_ij = 1} = z_ij. Throws OutOfRange outside [0, 1].
IntMatrix bernoulli_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Z, Rng& rng);

/// Independent cells with Pr{x = k} = p q^k, q = z/(1+z), so E x = z. Throws OutOfRange for z < 0.
IntMatrix geometric_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Z, Rng& rng);

/// One geometric draw with mean z, by inversion.
std::int64_t geometric_draw(double z, Rng& rng);

struct SamplerOptions {
  std::uint64_t budget = 10'000'000;   // max trials
  std::uint64_t target_accepted = 1;   // stop after this many accepted draws
  std::size_t keep_samples = 1000;     // cap on SampleReport::samples
  unsigned threads = 1;
  std::uint64_t chunk = 4096;          // trials per RNG substream
  std::int64_t exact_guard = 36;       // run the exact counter when m*n <= this
  /// Called for every accepted matrix in trial order.
  std::function<void(const IntMatrix&)> sink;
  SolverOptions solver{};
};

struct SampleReport {
  Mode mode = Mode::ZeroOne;
  std::uint64_t n_trials = 0;
  std::uint64_t n_accepted = 0;
  double acceptance_rate = 0.0;
  double entropy = 0.0;
  std::optional<double> log_count;           // ln |A| when the exact counter ran
  std::optional<double> predicted_rate_log;  // ln |A| - entropy
  /// Interval for ln(rate) from the counting bounds: zero-one uses the van der
  /// Waerden lower bound; non-negative only has upper 0 and correction (m+n) ln N.
  std::optional<double> predicted_rate_log_lower;
  double predicted_rate_log_upper = 0.0;
  double rate_correction = 0.0;
  std::vector<IntMatrix> samples;
};

struct SampleResult {
  std::optional<IntMatrix> sample;  // first accepted draw; empty = budget exhausted
  SampleReport report;

  bool exhausted() const { return !sample.has_value(); }
};

/// Rejection sampling from the independent Bernoulli/geometric matrix with
/// mean Z; accepted draws are exactly uniform on A(R, C). Chunk c of trials
/// uses RNG substream c, so results do not depend on the thread count.
SampleResult sample_uniform(const Margins& margins, Mode mode, RngSeed seed, const SamplerOptions& options = {});

/// Same, against a precomputed maximum-entropy solution.
SampleResult sample_uniform(const Margins& margins, const MaxEntSolution& solution, RngSeed seed,
                            const SamplerOptions& options = {});

using Cell = std::pair<Eigen::Index, Eigen::Index>;

struct ConcentrationReport {
  std::vector<Cell> cells;
  double sigma_Z = 0.0;          // sum of z over S
  std::uint64_t n_samples = 0;   // accepted samples summarized
  std::uint64_t n_trials = 0;
  double mean = 0.0, stdev = 0.0, min = 0.0, max = 0.0;  // of sigma_S(D)
  double mean_ratio = 0.0;       // mean of sigma_S(D) / sigma_S(Z)
  double rms_relative_deviation = 0.0;
  double median_relative_deviation = 0.0;
  double q90_relative_deviation = 0.0;
  double max_relative_deviation = 0.0;
};

/// Summarizes sigma_S(D) / sigma_S(Z) over n_samples uniform samples. Throws
/// BudgetExhausted if no sample is accepted.
ConcentrationReport concentration_report(const Margins& margins, Mode mode, const std::vector<Cell>& cells,
                                         std::uint64_t n_samples, RngSeed seed, SamplerOptions options = {});

double sigma(const Eigen::Ref<const Eigen::MatrixXd>& x, const std::vector<Cell>& cells);

/// The cells of the k-fold clone whose source cell lies in `cells`.
std::vector<Cell> clone_cells(const std::vector<Cell>& cells, Eigen::Index k);

}  // namespace contab

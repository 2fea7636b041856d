#include "contab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "contab/exact.hpp"

namespace contab {

namespace {

void check_probabilities(const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  if (!((Z.array() >= 0.0) && (Z.array() <= 1.0)).all())
    throw Error(ErrorKind::OutOfRange, "Bernoulli means must lie in [0, 1]");
}

void check_means(const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  if (!((Z.array() >= 0.0) && Z.array().isFinite()).all())
    throw Error(ErrorKind::OutOfRange, "geometric means must be finite and >= 0");
}

struct ChunkResult {
  std::uint64_t trials = 0;
  std::vector<std::pair<std::uint64_t, IntMatrix>> accepted;  // (trial index, matrix)
};

// Draws cells row by row and rejects as soon as a row closes with the wrong
// sum or a column overshoots.
class Trial {
 public:
  Trial(const Margins& margins, Mode mode, const Eigen::MatrixXd& Z)
      : margins_(margins), mode_(mode), Z_(Z), d_(IntMatrix::Zero(Z.rows(), Z.cols())),
        col_(static_cast<std::size_t>(Z.cols())) {}

  bool run(Rng& rng) {
    std::fill(col_.begin(), col_.end(), 0);
    const auto m = Z_.rows();
    const auto n = Z_.cols();
    for (Eigen::Index i = 0; i < m; ++i) {
      std::int64_t row = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double z = Z_(i, j);
        const std::int64_t v = mode_ == Mode::ZeroOne ? (rng.uniform() < z ? 1 : 0) : geometric_draw(z, rng);
        d_(i, j) = v;
        row += v;
        col_[j] += v;
        if (col_[j] > margins_.cols()[j] || row > margins_.rows()[i]) return false;
      }
      if (row != margins_.rows()[i]) return false;
    }
    for (Eigen::Index j = 0; j < n; ++j)
      if (col_[j] != margins_.cols()[j]) return false;
    return true;
  }

  const IntMatrix& matrix() const { return d_; }

 private:
  const Margins& margins_;
  Mode mode_;
  const Eigen::MatrixXd& Z_;
  IntMatrix d_;
  std::vector<std::int64_t> col_;
};

ChunkResult run_chunk(const Margins& margins, Mode mode, const Eigen::MatrixXd& Z, RngSeed seed,
                      std::uint64_t chunk_index, std::uint64_t first_trial, std::uint64_t trials,
                      std::uint64_t max_accept) {
  Rng rng(seed, chunk_index);
  Trial trial(margins, mode, Z);
  ChunkResult out;
  for (std::uint64_t k = 0; k < trials; ++k) {
    ++out.trials;
    if (trial.run(rng)) {
      out.accepted.emplace_back(first_trial + k, trial.matrix());
      if (out.accepted.size() >= max_accept) break;
    }
  }
  return out;
}

}  // namespace

std::int64_t geometric_draw(double z, Rng& rng) {
  if (z <= 0.0) return 0;
  const double log_q = std::log(z) - std::log1p(z);  // ln(z / (1 + z)) < 0
  // Pr{floor(ln U / ln q) >= k} = Pr{U <= q^k} = q^k
  return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open_zero()) / log_q));
}

IntMatrix bernoulli_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Z, Rng& rng) {
  check_probabilities(Z);
  IntMatrix d(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.cols(); ++j) d(i, j) = rng.uniform() < Z(i, j) ? 1 : 0;
  return d;
}

IntMatrix geometric_matrix(const Eigen::Ref<const Eigen::MatrixXd>& Z, Rng& rng) {
  check_means(Z);
  IntMatrix d(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.cols(); ++j) d(i, j) = geometric_draw(Z(i, j), rng);
  return d;
}

SampleResult sample_uniform(const Margins& margins, Mode mode, RngSeed seed, const SamplerOptions& options) {
  return sample_uniform(margins, solve_maxent(mode, margins, std::nullopt, options.solver), seed, options);
}

SampleResult sample_uniform(const Margins& margins, const MaxEntSolution& solution, RngSeed seed,
                            const SamplerOptions& options) {
  const Mode mode = solution.mode;
  if (mode == Mode::ZeroOne)
    check_probabilities(solution.Z);
  else
    check_means(solution.Z);

  SampleResult result;
  auto& rep = result.report;
  rep.mode = mode;
  rep.entropy = solution.entropy;
  if (mode == Mode::ZeroOne) {
    rep.predicted_rate_log_lower = van_der_waerden_log_factor(margins);
  } else {
    const double N = static_cast<double>(margins.total());
    rep.rate_correction = static_cast<double>(margins.m() + margins.n()) * (N > 0 ? std::log(N) : 0.0);
  }
  if (margins.m() * margins.n() <= options.exact_guard) {
    rep.log_count = log_of(count_exact(margins, mode));
    rep.predicted_rate_log = *rep.log_count - solution.entropy;
  }

  const std::uint64_t target = std::max<std::uint64_t>(options.target_accepted, 1);
  const std::uint64_t chunk = std::max<std::uint64_t>(options.chunk, 1);
  const unsigned threads = std::max(options.threads, 1u);

  std::uint64_t next_chunk = 0;
  std::uint64_t trials_done = 0;
  bool done = false;
  while (!done && next_chunk * chunk < options.budget) {
    std::vector<std::future<ChunkResult>> batch;
    std::vector<ChunkResult> results;
    const std::uint64_t need = target - rep.n_accepted;
    for (unsigned w = 0; w < threads && next_chunk * chunk < options.budget; ++w, ++next_chunk) {
      const std::uint64_t first = next_chunk * chunk;
      const std::uint64_t count = std::min(chunk, options.budget - first);
      if (threads == 1) {
        results.push_back(run_chunk(margins, mode, solution.Z, seed, next_chunk, first, count, need));
      } else {
        batch.push_back(std::async(std::launch::async, run_chunk, std::cref(margins), mode, std::cref(solution.Z),
                                   seed, next_chunk, first, count, need));
      }
    }
    for (auto& f : batch) results.push_back(f.get());

    // merge in chunk order; stop exactly at the target-th acceptance
    for (auto& r : results) {
      for (auto& [index, d] : r.accepted) {
        ++rep.n_accepted;
        if (!result.sample) result.sample = d;
        if (options.sink) options.sink(d);
        if (rep.samples.size() < options.keep_samples) rep.samples.push_back(std::move(d));
        if (rep.n_accepted == target) {
          trials_done = index + 1;
          done = true;
          break;
        }
      }
      if (done) break;
      trials_done += r.trials;
    }
  }
  rep.n_trials = trials_done;
  rep.acceptance_rate = rep.n_trials > 0 ? static_cast<double>(rep.n_accepted) / static_cast<double>(rep.n_trials) : 0.0;
  return result;
}

double sigma(const Eigen::Ref<const Eigen::MatrixXd>& x, const std::vector<Cell>& cells) {
  double s = 0.0;
  for (const auto& [i, j] : cells) s += x(i, j);
  return s;
}

std::vector<Cell> clone_cells(const std::vector<Cell>& cells, Eigen::Index k) {
  std::vector<Cell> out;
  for (const auto& [i, j] : cells)
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) out.emplace_back(i * k + a, j * k + b);
  std::sort(out.begin(), out.end());
  return out;
}

ConcentrationReport concentration_report(const Margins& margins, Mode mode, const std::vector<Cell>& cells,
                                         std::uint64_t n_samples, RngSeed seed, SamplerOptions options) {
  for (const auto& [i, j] : cells)
    if (i < 0 || j < 0 || i >= margins.m() || j >= margins.n())
      throw Error(ErrorKind::OutOfRange, "index set cell outside the matrix");
  const auto solution = solve_maxent(mode, margins, std::nullopt, options.solver);

  ConcentrationReport rep;
  rep.cells = cells;
  rep.sigma_Z = sigma(solution.Z, cells);

  std::vector<double> values;
  options.target_accepted = n_samples;
  options.keep_samples = 0;
  options.sink = [&](const IntMatrix& d) { values.push_back(sigma(d.cast<double>(), cells)); };
  const auto result = sample_uniform(margins, solution, seed, options);
  if (result.exhausted()) throw Error(ErrorKind::BudgetExhausted, "no sample accepted within the trial budget");

  rep.n_samples = values.size();
  rep.n_trials = result.report.n_trials;
  const double count = static_cast<double>(values.size());
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
  }
  rep.mean = sum / count;
  rep.stdev = std::sqrt(std::max(sq / count - rep.mean * rep.mean, 0.0));
  rep.min = *std::min_element(values.begin(), values.end());
  rep.max = *std::max_element(values.begin(), values.end());
  if (rep.sigma_Z > 0.0) {
    rep.mean_ratio = rep.mean / rep.sigma_Z;
    std::vector<double> dev;
    dev.reserve(values.size());
    double dev_sq = 0.0;
    for (double v : values) {
      dev.push_back(std::abs(v / rep.sigma_Z - 1.0));
      dev_sq += dev.back() * dev.back();
    }
    std::sort(dev.begin(), dev.end());
    auto quantile = [&dev](double p) { return dev[static_cast<std::size_t>(p * static_cast<double>(dev.size() - 1))]; };
    rep.rms_relative_deviation = std::sqrt(dev_sq / count);
    rep.median_relative_deviation = quantile(0.5);
    rep.q90_relative_deviation = quantile(0.9);
    rep.max_relative_deviation = dev.back();
  }
  return rep;
}

}  // namespace contab

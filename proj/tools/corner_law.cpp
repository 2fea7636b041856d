// Tabulates the empirical law of the corner entry d_11 of a uniform
// non-negative table with R = C = (f n, n, ..., n) against the geometric law
// whose mean is the maximum-entropy value z_11. Asserts nothing.

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include <CLI11.hpp>

#include "contab/error.hpp"
#include "contab/sampler.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Empirical law of d_11 for margins (f n, n, ..., n)", "corner_law"};
  std::vector<std::int64_t> sizes{2, 3};
  std::int64_t factor = 3;
  std::uint64_t samples = 500;
  std::uint64_t seed = 1;
  std::uint64_t budget = 200'000'000;
  unsigned threads = 1;
  app.add_option("--n", sizes, "values of n");
  app.add_option("--factor", factor, "f in (f n, n, ..., n)")->check(CLI::PositiveNumber);
  app.add_option("--samples", samples, "accepted tables per n")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--budget", budget, "maximum trials per n");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  for (const auto n : sizes) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(n), n);
    v[0] = factor * n;
    const auto margins = contab::validate_margins(v, v);
    const auto solution = contab::solve_maxent_nonneg(margins);
    const double z = solution.Z(0, 0);

    std::map<std::int64_t, std::uint64_t> hist;
    contab::SamplerOptions opts;
    opts.budget = budget;
    opts.threads = threads;
    opts.target_accepted = samples;
    opts.keep_samples = 0;
    opts.sink = [&hist](const contab::IntMatrix& d) { ++hist[d(0, 0)]; };
    const auto result = contab::sample_uniform(margins, solution, {seed, static_cast<std::uint64_t>(n)}, opts);
    const auto& rep = result.report;

    std::printf("n=%lld  z11=%.4f  accepted=%llu  trials=%llu\n", static_cast<long long>(n), z,
                static_cast<unsigned long long>(rep.n_accepted), static_cast<unsigned long long>(rep.n_trials));
    if (rep.n_accepted == 0) continue;
    double mean = 0.0;
    for (const auto& [k, count] : hist) mean += static_cast<double>(k * static_cast<std::int64_t>(count));
    mean /= static_cast<double>(rep.n_accepted);
    std::printf("  empirical mean %.4f\n  %4s %10s %10s\n", mean, "k", "empirical", "geometric");
    const double q = z / (1.0 + z);
    for (const auto& [k, count] : hist)
      std::printf("  %4lld %10.4f %10.4f\n", static_cast<long long>(k),
                  static_cast<double>(count) / static_cast<double>(rep.n_accepted),
                  (1.0 - q) * std::pow(q, static_cast<double>(k)));
  }
  return 0;
}

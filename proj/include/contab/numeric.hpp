#pragma once

#include <cmath>
#include <cstdint>

namespace contab {

inline double log_factorial(std::int64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

inline double log_binomial(std::int64_t n, std::int64_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// k ln k with 0 ln 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// ln(k^k / k!), zero at k = 0.
inline double log_power_over_factorial(std::int64_t k) {
  return xlogx(static_cast<double>(k)) - log_factorial(k);
}

}  // namespace contab

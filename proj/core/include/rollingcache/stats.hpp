#pragma once

#include <cstdint>
#include <span>

namespace rollingcache {

/// Binomial standard error sqrt(p(1-p)/n); 0 when n == 0.
double binomial_stderr(double p, std::uint64_t n);

/// (estimate - expected) / stderr under the null `expected`. A degenerate
/// null (expected in {0,1}) gives 0 on exact agreement and +-infinity
/// otherwise.
double z_score(double estimate, double expected, std::uint64_t n);

/// Exact two-sided binomial test p-value: total probability of outcomes no
/// more likely than `k` successes in `n` trials at rate `p0`.
double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p0);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::uint64_t dof = 0;
};

/// Pearson goodness of fit of `counts` against the uniform distribution.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

}  // namespace rollingcache

#include "rollingcache/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rollingcache/errors.hpp"

namespace rollingcache {

double binomial_stderr(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double z_score(double estimate, double expected, std::uint64_t n) {
  const double se = binomial_stderr(expected, n);
  const double diff = estimate - expected;
  if (se == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / se;
}

double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p0) {
  if (k > n) throw ConfigError("binomial test: successes exceed trials");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("binomial test: rate must be in [0, 1]");
  if (n == 0) return 1.0;
  if (p0 == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p0 == 1.0) return k == n ? 1.0 : 0.0;

  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p0);
  const double observed = boost::math::pdf(dist, static_cast<double>(k));
  // Same relative slack R's binom.test uses when comparing densities.
  const double cutoff = observed * (1.0 + 1e-7);
  double total = 0.0;
  for (std::uint64_t i = 0; i <= n; ++i) {
    const double d = boost::math::pdf(dist, static_cast<double>(i));
    if (d <= cutoff) total += d;
  }
  return std::min(1.0, total);
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw ConfigError("chi-square: need at least two bins");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total == 0) throw ConfigError("chi-square: no observations");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.dof = counts.size() - 1;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace rollingcache

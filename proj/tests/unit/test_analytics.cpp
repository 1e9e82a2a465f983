#include <gtest/gtest.h>

#include "rollingcache/analytics.hpp"
#include "rollingcache/errors.hpp"

namespace rc = rollingcache;

namespace {

// Hand-evaluated at W = 2, S = 64: P_A = P_B = 1/2, P_C1 = 1/2, P_C2 = 1.
constexpr double kS = 64.0;
constexpr double kRetention[] = {0.25, 0.75, 0.75, 1.0};
constexpr double kTarget[] = {0.25, 0.5, 0.0, 0.25};

double other(int i) { return kRetention[i] / (kS * 2.0); }
double due(int i) { return kTarget[i] / kS + (kS - 1.0) / kS * other(i); }

}  // namespace

TEST(Analytics, ScenarioProbabilities) {
  const auto p = rc::scenario_probs(4);
  EXPECT_DOUBLE_EQ(p.p_a, 0.25);
  EXPECT_DOUBLE_EQ(p.p_b, 0.75);
  ASSERT_EQ(p.p_c.size(), 4u);
  EXPECT_DOUBLE_EQ(p.p_c[0], 0.75 * 0.75 * 0.75);
  EXPECT_DOUBLE_EQ(p.p_c[3], 1.0);
}

TEST(Analytics, DirectMappedAlwaysRollsOver) {
  const auto p = rc::scenario_probs(1);
  EXPECT_DOUBLE_EQ(p.p_a, 1.0);
  EXPECT_DOUBLE_EQ(p.p_b, 0.0);
  EXPECT_THROW(rc::scenario_probs(0), rc::ConfigError);
  EXPECT_THROW(rc::prime_retention(1), rc::ConfigError);
  EXPECT_THROW(rc::probe_miss_given_other(2, 1), rc::ConfigError);
}

TEST(Analytics, TwoWayClosedForms) {
  const auto t = rc::make_prob_table(2, 64);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(t.retention[i], kRetention[i]) << i;
    EXPECT_DOUBLE_EQ(t.m_prime[i], 1.0 - kRetention[i]) << i;
    EXPECT_DOUBLE_EQ(t.miss_given_target[i], kTarget[i]) << i;
    EXPECT_DOUBLE_EQ(t.undetected[i], 1.0 - kTarget[i]) << i;
    EXPECT_NEAR(t.miss_given_other[i], other(i), 1e-15) << i;
    EXPECT_NEAR(t.miss_due_to_victim[i], due(i), 1e-15) << i;
  }
}

TEST(Analytics, TwoWayNumericValues) {
  const auto t = rc::make_prob_table(2, 64);
  const double mdv[] = {0.005829, 0.013580, 0.005768, 0.011597};
  const double pt[] = {0.005168, 0.029640, 0.0, 0.336842};
  const double po[] = {0.002544, 0.021883, 0.022551, 0.663158};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(t.miss_due_to_victim[i], mdv[i], 5e-7) << i;
    ASSERT_TRUE(t.posterior_target[i].has_value());
    EXPECT_NEAR(*t.posterior_target[i], pt[i], 5e-7) << i;
    EXPECT_NEAR(*t.posterior_other[i], po[i], 5e-7) << i;
  }
}

TEST(Analytics, PositionFourPosteriorsSumToOne) {
  // x = 4 is always retained, so every miss there is the victim's doing.
  for (std::uint32_t w : {2u, 4u, 8u, 16u}) {
    const auto t = rc::make_prob_table(w, 64);
    EXPECT_DOUBLE_EQ(t.m_prime[3], 0.0);
    EXPECT_NEAR(*t.posterior_target[3] + *t.posterior_other[3], 1.0, 1e-12);
  }
}

TEST(Analytics, PositionThreeNeverDetectsTarget) {
  for (std::uint32_t w : {2u, 3u, 8u}) EXPECT_EQ(rc::probe_miss_given_target(w)[2], 0.0);
}

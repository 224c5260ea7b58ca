#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/synth.hpp"
#include "oracles.hpp"

using namespace chaoscope;

namespace {

Embedding logistic_embedding() { return delay_embed(min_max_normalize(gen_logistic({4.0, 0.2}, 10000)), {2, 1}); }

Embedding sine_embedding() {
  std::vector<double> v(5000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 50.0);
  return delay_embed(min_max_normalize(TimeSeries(v)), {2, 12});
}

}  // namespace

TEST(LogisticOracle, DerivativeAverageIsLn2) {
  EXPECT_NEAR(oracle::logistic_derivative_average(4.0, 0.2, 100000), std::numbers::ln2, 0.01);
}

TEST(Wolf, LogisticMap) {
  const auto r = max_lyapunov(logistic_embedding(), WolfParams::defaults_for({2, 1}));
  EXPECT_GE(r.lambda_max, 0.59);
  EXPECT_LE(r.lambda_max, 0.80);
  const double oracle_value = oracle::logistic_derivative_average(4.0, 0.2, 10000);
  EXPECT_NEAR(r.lambda_max, oracle_value, 0.15 * oracle_value);
  EXPECT_GE(r.steps_used, 1u);
  EXPECT_GT(r.replacements, 0u);
}

TEST(Wolf, SineIsNeutral) {
  const auto r = max_lyapunov(sine_embedding(), WolfParams::defaults_for({2, 12}));
  EXPECT_LT(std::abs(r.lambda_max), 0.05);
}

TEST(Wolf, SignOracle) {
  EXPECT_GT(max_lyapunov(logistic_embedding(), WolfParams::defaults_for({2, 1})).lambda_max, 0.3);
  EXPECT_LT(max_lyapunov(sine_embedding(), WolfParams::defaults_for({2, 12})).lambda_max, 0.1);
}

TEST(Wolf, LorenzAgainstBenettin) {
  const LorenzParams lp;
  const double reference = oracle::benettin_lorenz(lp, 200000, 1000);
  EXPECT_NEAR(reference, 0.906, 0.02);

  const auto e = delay_embed(min_max_normalize(gen_lorenz(lp, 30000)), {3, 10});
  const double per_time = max_lyapunov(e, WolfParams::defaults_for({3, 10})).lambda_max / lp.dt;
  EXPECT_GE(per_time, 0.72);
  EXPECT_LE(per_time, 1.09);
  EXPECT_NEAR(per_time, reference, 0.2 * reference);
}

TEST(Wolf, BaseTwoIsBaseEOverLn2) {
  const auto e = logistic_embedding();
  auto p = WolfParams::defaults_for({2, 1});
  const auto in_e = max_lyapunov(e, p);
  p.log_base = LogBase::Two;
  const auto in_2 = max_lyapunov(e, p);
  EXPECT_EQ(in_2.lambda_max, in_e.lambda_max / std::numbers::ln2);
  EXPECT_EQ(in_2.replacements, in_e.replacements);
  EXPECT_EQ(in_2.log_base, LogBase::Two);
}

TEST(Wolf, Reproducible) {
  const auto e = logistic_embedding();
  const auto p = WolfParams::defaults_for({2, 1});
  const auto a = max_lyapunov(e, p);
  const auto b = max_lyapunov(e, p);
  EXPECT_EQ(a.lambda_max, b.lambda_max);
  EXPECT_EQ(a.replacements, b.replacements);
  EXPECT_EQ(a.steps_used, b.steps_used);
}

TEST(Wolf, TraceNeverCarriesAnOversizedSeparation) {
  auto p = WolfParams::defaults_for({2, 1});
  p.record_trace = true;
  const auto r = max_lyapunov(logistic_embedding(), p);
  ASSERT_FALSE(r.trace.empty());
  std::size_t replaced = 0;
  for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    if (t.separation_after > p.scale_max) {
      EXPECT_TRUE(t.replaced) << "cycle " << i;
    }
    // The next cycle starts from the evolved separation unless replaced.
    if (!t.replaced) {
      EXPECT_EQ(r.trace[i + 1].separation_before, t.separation_after);
    }
    replaced += t.replaced ? 1 : 0;
  }
  EXPECT_LE(replaced, r.replacements);
}

TEST(Wolf, Errors) {
  const auto e = logistic_embedding();
  auto p = WolfParams::defaults_for({2, 1});
  p.evolve_steps = 0;
  EXPECT_THROW(max_lyapunov(e, p), InputError);
  p = WolfParams::defaults_for({2, 1});
  p.scale_min = 0.2;
  EXPECT_THROW(max_lyapunov(e, p), InputError);
  p = WolfParams::defaults_for({2, 1});
  p.scale_max = 1.5;  // > sqrt(2)
  EXPECT_THROW(max_lyapunov(e, p), InputError);
  p = WolfParams::defaults_for({2, 1});
  p.min_time_separation = 0;
  EXPECT_THROW(max_lyapunov(e, p), InputError);

  const auto tiny = delay_embed(TimeSeries({0.0, 0.5, 1.0, 0.2}), {1, 1});
  p = WolfParams::defaults_for({1, 1});
  p.evolve_steps = 3;
  EXPECT_THROW(max_lyapunov(tiny, p), InputError);

  p = WolfParams::defaults_for({2, 1});
  p.min_time_separation = 20000;
  EXPECT_THROW(max_lyapunov(e, p), EstimationError);
}

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/random.hpp"
#include "chaoscope/synth.hpp"

using namespace chaoscope;

TEST(Rng, EngineStreamIsTheStandardOne) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  std::mt19937_64 reference;
  reference.discard(9999);
  EXPECT_EQ(reference(), 9981545732273789042ull);
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Rng, Distributions) {
  Rng r(1);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum2 / n, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(Logistic, FirstIterates) {
  const auto s = gen_logistic({4.0, 0.2}, 4);
  EXPECT_EQ(s[0], 0.2);
  EXPECT_DOUBLE_EQ(s[1], 0.64);
  EXPECT_DOUBLE_EQ(s[2], 0.9216);
  EXPECT_NEAR(s[3], 0.28901376, 1e-15);
}

TEST(Logistic, StableFixedPoint) {
  const auto s = gen_logistic({2.0, 0.3}, 61);
  EXPECT_LT(std::abs(s[60] - 0.5), 1e-9);
}

TEST(Logistic, StaysInUnitInterval) {
  const auto s = gen_logistic({4.0, 0.2}, 1000000);
  const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
  EXPECT_GE(*lo, 0.0);
  EXPECT_LE(*hi, 1.0);
}

TEST(Logistic, Errors) {
  EXPECT_THROW(gen_logistic({4.1, 0.2}, 10), InputError);
  EXPECT_THROW(gen_logistic({0.0, 0.2}, 10), InputError);
  EXPECT_THROW(gen_logistic({4.0, 0.0}, 10), InputError);
  EXPECT_THROW(gen_logistic({4.0, 1.0}, 10), InputError);
  EXPECT_THROW(gen_logistic({4.0, 0.2}, 1), InputError);
}

TEST(Lorenz, SubcriticalDecays) {
  LorenzParams p;
  p.rho = 0.5;
  p.initial = {0.5, -0.3, 0.2};
  const auto s = gen_lorenz(p, 5001, 0);
  EXPECT_LT(std::abs(s[5000]), 1e-6);

  // Energy-like norm decreases along the flow once past the transient.
  auto state = p.initial;
  for (int i = 0; i < 100; ++i) state = lorenz_rk4_step(p, state);
  double previous = state[0] * state[0] + state[1] * state[1] + state[2] * state[2];
  for (int i = 0; i < 2000; ++i) {
    state = lorenz_rk4_step(p, state);
    const double energy = state[0] * state[0] + state[1] * state[1] + state[2] * state[2];
    EXPECT_LT(energy, previous);
    previous = energy;
  }
}

TEST(Lorenz, Bounded) {
  const auto s = gen_lorenz({}, 30001, 0);
  for (double x : s.values()) EXPECT_LT(std::abs(x), 25.0);
  EXPECT_DOUBLE_EQ(s.sample_interval(), 0.01);
}

TEST(Lorenz, StepHalvingConverges) {
  LorenzParams coarse;
  LorenzParams fine;
  fine.dt = 0.005;
  const auto a = gen_lorenz(coarse, 1001, 0);
  const auto b = gen_lorenz(fine, 2001, 0);
  EXPECT_LT(std::abs(a[1000] - b[2000]), 1e-4);
}

TEST(Lorenz, FourthOrderConvergence) {
  // Halving dt shrinks the x(t=10) error by about 2^4.
  double x[4];
  const double dts[4] = {0.01, 0.005, 0.0025, 0.00125};
  for (int k = 0; k < 4; ++k) {
    LorenzParams p;
    p.dt = dts[k];
    const auto steps = static_cast<std::size_t>(std::lround(10.0 / dts[k]));
    x[k] = gen_lorenz(p, steps + 1, 0)[steps];
  }
  for (int k = 0; k < 2; ++k) {
    const double ratio = (x[k] - x[k + 1]) / (x[k + 1] - x[k + 2]);
    EXPECT_NEAR(ratio, 16.0, 1.0);
  }
}

TEST(Lorenz, StrideAndErrors) {
  LorenzParams p;
  p.sample_every = 10;
  const auto strided = gen_lorenz(p, 100, 0);
  const auto dense = gen_lorenz({}, 991, 0);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(strided[i], dense[10 * i]);
  EXPECT_DOUBLE_EQ(strided.sample_interval(), 0.1);

  LorenzParams bad;
  bad.dt = 0.0;
  EXPECT_THROW(gen_lorenz(bad, 10), InputError);
  bad.dt = 0.06;
  EXPECT_THROW(gen_lorenz(bad, 10), InputError);
  LorenzParams wild;
  wild.initial = {1e200, 1e200, 1e200};
  EXPECT_THROW(gen_lorenz(wild, 100, 0), EstimationError);
}

TEST(Noise, SeedReproducibility) {
  for (auto kind : {GeneratorKind::GaussianNoise, GeneratorKind::RandomWalk, GeneratorKind::AR1}) {
    const auto a = gen_noise(kind, {}, 1000, 77);
    const auto b = gen_noise(kind, {}, 1000, 77);
    const auto c = gen_noise(kind, {}, 1000, 78);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  }
}

TEST(Noise, Ar1WithZeroPhiIsNoise) {
  NoiseParams p;
  p.phi = 0.0;
  const auto a = gen_noise(GeneratorKind::AR1, p, 2000, 9);
  const auto g = gen_noise(GeneratorKind::GaussianNoise, p, 2000, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], g[i]);
}

namespace {

// R^2 and slope of the least-squares line var_t ~ a + b t, where var_t is the
// across-seed sample variance of a random walk at index t.
std::pair<double, double> walk_variance_fit(std::size_t n, int seeds, std::uint64_t first_seed) {
  std::vector<double> sum(n, 0.0), sum2(n, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto w = gen_noise(GeneratorKind::RandomWalk, {}, n, first_seed + static_cast<std::uint64_t>(s));
    for (std::size_t t = 0; t < n; ++t) {
      sum[t] += w[t];
      sum2[t] += w[t] * w[t];
    }
  }
  double mt = 0.0, mv = 0.0;
  std::vector<double> var(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double mean = sum[t] / seeds;
    var[t] = (sum2[t] - seeds * mean * mean) / (seeds - 1);
    mt += static_cast<double>(t);
    mv += var[t];
  }
  mt /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double stt = 0.0, svv = 0.0, stv = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - mt;
    stt += dt * dt;
    svv += (var[t] - mv) * (var[t] - mv);
    stv += dt * (var[t] - mv);
  }
  return {stv * stv / (stt * svv), stv / stt};
}

}  // namespace

TEST(Noise, RandomWalkVarianceGrowsLinearly) {
  // One block of 50 seeds clears R^2 = 0.95 only about 80% of the time, so
  // the check is on the median over 20 disjoint blocks.
  std::vector<double> r2;
  for (int block = 0; block < 20; ++block) {
    const auto [r, slope] = walk_variance_fit(200, 50, 1000 + 50 * static_cast<std::uint64_t>(block));
    EXPECT_NEAR(slope, 1.0, 0.5);
    r2.push_back(r);
  }
  std::nth_element(r2.begin(), r2.begin() + 10, r2.end());
  EXPECT_GT(r2[10], 0.95);
}

TEST(Noise, Errors) {
  NoiseParams p;
  p.phi = 1.0;
  EXPECT_THROW(gen_noise(GeneratorKind::AR1, p, 100, 1), InputError);
  p = {};
  p.sd = -1.0;
  EXPECT_THROW(gen_noise(GeneratorKind::GaussianNoise, p, 100, 1), InputError);
  EXPECT_THROW(gen_noise(GeneratorKind::Logistic, {}, 100, 1), InputError);
}

TEST(Shuffle, IsASeededPermutation) {
  const auto s = gen_logistic({4.0, 0.2}, 1000);
  const auto a = shuffle_surrogate(s, 3);
  const auto b = shuffle_surrogate(s, 3);
  std::vector<double> x(s.values().begin(), s.values().end());
  std::vector<double> y(a.values().begin(), a.values().end());
  EXPECT_FALSE(std::equal(x.begin(), x.end(), y.begin()));
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  EXPECT_EQ(x, y);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(Generate, Dispatch) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Logistic;
  spec.params = LogisticParams{4.0, 0.2};
  spec.n = 10;
  EXPECT_EQ(generate(spec)[1], gen_logistic({4.0, 0.2}, 10)[1]);
  spec.transient = 1;
  EXPECT_EQ(generate(spec)[0], gen_logistic({4.0, 0.2}, 10)[1]);

  spec = {};
  spec.kind = GeneratorKind::ShuffleSurrogate;
  spec.n = 5;
  EXPECT_THROW(generate(spec), InputError);
  const TimeSeries src({1, 2, 3, 4, 5});
  EXPECT_EQ(generate(spec, &src).size(), 5u);

  spec = {};
  spec.kind = GeneratorKind::Lorenz;
  spec.params = LogisticParams{};
  EXPECT_THROW(generate(spec), InputError);
}

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>

#include "chaoscope/time_series.hpp"

namespace chaoscope {

struct LogisticParams {
  double r = 4.0;
  double x0 = 0.2;
};

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  std::array<double, 3> initial{1.0, 1.0, 1.0};
  double dt = 0.01;      ///< RK4 step, in (0, 0.05]
  int sample_every = 1;  ///< keep one state every this many RK4 steps
};

/// Shared by the stochastic kinds. `phi` is used by AR1 only.
struct NoiseParams {
  double mean = 0.0;
  double sd = 1.0;
  double phi = 0.5;
};

enum class GeneratorKind { Logistic, Lorenz, GaussianNoise, RandomWalk, AR1, ShuffleSurrogate };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Logistic;
  std::variant<LogisticParams, LorenzParams, NoiseParams> params{};
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t transient = 0;  ///< samples discarded from the start
};

/// x[k+1] = r x[k] (1 - x[k]); the first kept sample is x0 when transient is 0.
/// Requires r in (0, 4] and x0 in (0, 1).
TimeSeries gen_logistic(const LogisticParams& p, std::size_t n, std::size_t transient = 0);

/// x component of the Lorenz flow
///
///     x' = sigma (y - x),  y' = x (rho - z) - y,  z' = x y - beta z
///
/// integrated by fixed-step classical RK4. Output sample k is the state
/// after (transient + k) * sample_every steps, so sample_interval is
/// dt * sample_every. Throws EstimationError naming the step if the state
/// stops being finite.
TimeSeries gen_lorenz(const LorenzParams& p, std::size_t n, std::size_t transient = 1000);

/// Full state of the same integration, for oracles that need y and z.
std::array<double, 3> lorenz_rk4_step(const LorenzParams& p, const std::array<double, 3>& state);

/// GaussianNoise: iid N(mean, sd^2).
/// RandomWalk:    cumulative sum of iid N(mean, sd^2) steps.
/// AR1:           x[t] = phi x[t-1] + e[t], e iid N(mean, sd^2), started
///                from e[0] / sqrt(1 - phi^2).
/// Every kind draws exactly one normal deviate per sample, in order.
TimeSeries gen_noise(GeneratorKind kind, const NoiseParams& p, std::size_t n, std::uint64_t seed,
                     std::size_t transient = 0);

/// Uniformly random permutation of the values (Fisher-Yates).
TimeSeries shuffle_surrogate(const TimeSeries& s, std::uint64_t seed);

/// Dispatches on spec.kind. ShuffleSurrogate needs `source`.
TimeSeries generate(const GeneratorSpec& spec, const TimeSeries* source = nullptr);

}  // namespace chaoscope

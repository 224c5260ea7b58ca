#include "chaoscope/synth.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "chaoscope/error.hpp"
#include "chaoscope/random.hpp"

namespace chaoscope {

namespace {

void require_length(std::size_t n) {
  if (n < 2) throw InputError(fmt::format("generator length must be >= 2 (got {})", n));
}

}  // namespace

TimeSeries gen_logistic(const LogisticParams& p, std::size_t n, std::size_t transient) {
  require_length(n);
  if (!(p.r > 0.0 && p.r <= 4.0)) {
    throw InputError(fmt::format("logistic r must be in (0, 4] (got {}); larger r escapes [0, 1]", p.r));
  }
  if (!(p.x0 > 0.0 && p.x0 < 1.0)) throw InputError(fmt::format("logistic x0 must be in (0, 1) (got {})", p.x0));

  double x = p.x0;
  for (std::size_t k = 0; k < transient; ++k) x = p.r * x * (1.0 - x);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = x;
    x = p.r * x * (1.0 - x);
  }
  return TimeSeries(std::move(out), 1.0, fmt::format("logistic(r={},x0={})", p.r, p.x0), {"synth:logistic"});
}

std::array<double, 3> lorenz_rk4_step(const LorenzParams& p, const std::array<double, 3>& s) {
  const auto f = [&p](const std::array<double, 3>& v) {
    return std::array<double, 3>{p.sigma * (v[1] - v[0]), v[0] * (p.rho - v[2]) - v[1], v[0] * v[1] - p.beta * v[2]};
  };
  const auto axpy = [](const std::array<double, 3>& x, double a, const std::array<double, 3>& y) {
    return std::array<double, 3>{x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
  };
  const double h = p.dt;
  const auto k1 = f(s);
  const auto k2 = f(axpy(s, 0.5 * h, k1));
  const auto k3 = f(axpy(s, 0.5 * h, k2));
  const auto k4 = f(axpy(s, h, k3));
  std::array<double, 3> next{};
  for (int j = 0; j < 3; ++j) next[j] = s[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return next;
}

TimeSeries gen_lorenz(const LorenzParams& p, std::size_t n, std::size_t transient) {
  require_length(n);
  if (!(p.dt > 0.0 && p.dt <= 0.05)) throw InputError(fmt::format("Lorenz dt must be in (0, 0.05] (got {})", p.dt));
  if (p.sample_every < 1) throw InputError("Lorenz sample_every must be >= 1");

  const auto stride = static_cast<std::size_t>(p.sample_every);
  std::array<double, 3> state = p.initial;
  std::vector<double> out;
  out.reserve(n);
  std::size_t step = 0;
  const auto advance = [&] {
    for (std::size_t k = 0; k < stride; ++k) {
      state = lorenz_rk4_step(p, state);
      ++step;
      if (!std::isfinite(state[0]) || !std::isfinite(state[1]) || !std::isfinite(state[2])) {
        throw EstimationError(fmt::format("Lorenz integration diverged at step {}", step));
      }
    }
  };
  for (std::size_t k = 0; k < transient; ++k) advance();
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(state[0]);
    if (k + 1 < n) advance();
  }
  return TimeSeries(std::move(out), p.dt * static_cast<double>(stride),
                    fmt::format("lorenz(sigma={},rho={},beta={:.6g},dt={})", p.sigma, p.rho, p.beta, p.dt),
                    {"synth:lorenz"});
}

TimeSeries gen_noise(GeneratorKind kind, const NoiseParams& p, std::size_t n, std::uint64_t seed,
                     std::size_t transient) {
  require_length(n);
  if (!(p.sd >= 0.0) || !std::isfinite(p.mean)) throw InputError("noise needs finite mean and sd >= 0");
  Rng rng(seed);
  const std::size_t total = n + transient;
  std::vector<double> out(total);
  std::string name;
  switch (kind) {
    case GeneratorKind::GaussianNoise:
      name = "gaussian";
      for (auto& x : out) x = p.mean + p.sd * rng.normal();
      break;
    case GeneratorKind::RandomWalk: {
      name = "random_walk";
      double level = 0.0;
      for (auto& x : out) {
        level += p.mean + p.sd * rng.normal();
        x = level;
      }
      break;
    }
    case GeneratorKind::AR1: {
      name = "ar1";
      if (!(std::abs(p.phi) < 1.0)) throw InputError(fmt::format("AR1 needs |phi| < 1 (got {})", p.phi));
      out[0] = (p.mean + p.sd * rng.normal()) / std::sqrt(1.0 - p.phi * p.phi);
      for (std::size_t t = 1; t < total; ++t) out[t] = p.phi * out[t - 1] + (p.mean + p.sd * rng.normal());
      break;
    }
    default:
      throw InputError("gen_noise supports GaussianNoise, RandomWalk and AR1 only");
  }
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(transient));
  return TimeSeries(std::move(out), 1.0, fmt::format("{}(seed={})", name, seed), {"synth:" + name});
}

TimeSeries shuffle_surrogate(const TimeSeries& s, std::uint64_t seed) {
  std::vector<double> v(s.values().begin(), s.values().end());
  Rng rng(seed);
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(v[i], v[j]);
  }
  auto history = s.transform_history();
  history.emplace_back("shuffle_surrogate");
  return TimeSeries(std::move(v), s.sample_interval(), s.label() + ":shuffled", std::move(history));
}

TimeSeries generate(const GeneratorSpec& spec, const TimeSeries* source) {
  switch (spec.kind) {
    case GeneratorKind::Logistic:
      if (const auto* p = std::get_if<LogisticParams>(&spec.params)) return gen_logistic(*p, spec.n, spec.transient);
      break;
    case GeneratorKind::Lorenz:
      if (const auto* p = std::get_if<LorenzParams>(&spec.params)) return gen_lorenz(*p, spec.n, spec.transient);
      break;
    case GeneratorKind::GaussianNoise:
    case GeneratorKind::RandomWalk:
    case GeneratorKind::AR1:
      if (const auto* p = std::get_if<NoiseParams>(&spec.params)) {
        return gen_noise(spec.kind, *p, spec.n, spec.seed, spec.transient);
      }
      break;
    case GeneratorKind::ShuffleSurrogate:
      if (source == nullptr) throw InputError("shuffle surrogate needs a source series");
      return shuffle_surrogate(*source, spec.seed);
  }
  throw InputError("generator parameters do not match the generator kind");
}

}  // namespace chaoscope

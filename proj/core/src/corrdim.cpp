#include "chaoscope/corrdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "chaoscope/error.hpp"

namespace chaoscope {

std::string_view to_string(Saturation s) noexcept {
  switch (s) {
    case Saturation::Deterministic:
      return "Deterministic";
    case Saturation::Stochastic:
      return "Stochastic";
    case Saturation::Inconclusive:
      break;
  }
  return "Inconclusive";
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw InputError(fmt::format("log grid needs 0 < lo < hi and at least 2 points (got {}, {}, {})", lo, hi, count));
  }
  std::vector<double> grid(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo * std::exp(step * static_cast<double>(k));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

namespace {

/// Point i, coordinate j lives at data[i * point_stride + j * dim_stride].
struct PointView {
  std::span<const double> data;
  std::size_t point_stride = 1;
  std::size_t dim_stride = 1;
  std::size_t points = 0;
};

std::uint64_t admissible_pairs(std::size_t points, std::size_t theiler) {
  if (points <= theiler + 1) return 0;
  const std::uint64_t m = points - theiler - 1;
  return m * (m + 1) / 2;
}

/// Histograms of max-norm pair distances, recorded after each dimension in
/// `levels` (ascending). Returns cumulative counts (distance < radius).
std::vector<std::vector<std::uint64_t>> count_pairs_by_level(const PointView& view, std::span<const int> levels,
                                                            std::span<const double> radii, std::size_t theiler,
                                                            unsigned threads) {
  const std::size_t n_levels = levels.size();
  const std::size_t n_radii = radii.size();
  const auto max_dim = static_cast<std::size_t>(levels.back());
  const double r_max = radii.back();

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, view.points / 64)));

  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(n_levels * n_radii, 0));

  const auto work = [&](unsigned w) {
    auto& hist = partial[w];
    const double* x = view.data.data();
    for (std::size_t i = w; i < view.points; i += workers) {
      const double* xi = x + i * view.point_stride;
      for (std::size_t k = i + theiler + 1; k < view.points; ++k) {
        const double* xk = x + k * view.point_stride;
        double d = 0.0;
        std::size_t level = 0;
        for (std::size_t j = 0; j < max_dim; ++j) {
          d = std::max(d, std::abs(xi[j * view.dim_stride] - xk[j * view.dim_stride]));
          if (d >= r_max) break;
          if (j + 1 == static_cast<std::size_t>(levels[level])) {
            const auto bin = static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), d) - radii.begin());
            ++hist[level * n_radii + bin];
            ++level;
          }
        }
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<std::vector<std::uint64_t>> out(n_levels, std::vector<std::uint64_t>(n_radii, 0));
  for (std::size_t l = 0; l < n_levels; ++l) {
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < n_radii; ++k) {
      for (const auto& hist : partial) running += hist[l * n_radii + k];
      out[l][k] = running;
    }
  }
  return out;
}

void check_radii(std::span<const double> radii) {
  if (radii.empty()) throw InputError("radius grid is empty");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) throw InputError("radii must be positive and finite");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw InputError("radii must be strictly ascending");
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

}  // namespace

PairCounts count_pairs(const Embedding& e, std::span<const double> radii, std::size_t theiler, unsigned threads) {
  check_radii(radii);
  PairCounts result;
  result.admissible = admissible_pairs(e.size(), theiler);
  const PointView view{e.coordinates(), e.dimension(), 1, e.size()};
  const int level = static_cast<int>(e.dimension());
  result.below = count_pairs_by_level(view, std::span<const int>(&level, 1), radii, theiler, threads).front();
  return result;
}

double correlation_integral(const Embedding& e, double eps, std::size_t theiler) {
  if (!(eps > 0.0)) throw InputError(fmt::format("eps must be positive (got {})", eps));
  const auto counts = count_pairs(e, std::span<const double>(&eps, 1), theiler, 1);
  if (counts.admissible == 0) {
    throw EstimationError(fmt::format("no pairs with index gap > {} among {} points", theiler, e.size()));
  }
  return static_cast<double>(counts.below.front()) / static_cast<double>(counts.admissible);
}

ScalingFit fit_scaling_region(std::span<const double> eps, std::span<const double> c,
                              std::span<const std::uint64_t> counts, const D2Options& options) {
  const std::size_t k = eps.size();
  if (c.size() != k || counts.size() != k) throw InputError("eps, C and count grids differ in length");

  const auto usable = [&](std::size_t i) {
    return counts[i] >= options.min_pairs && c[i] > 0.0 && c[i] <= options.max_c;
  };
  std::vector<double> log_eps(k), log_c(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    log_eps[i] = std::log(eps[i]);
    if (c[i] > 0.0) log_c[i] = std::log(c[i]);
  }
  const auto local_slope = [&](std::size_t i) { return (log_c[i + 1] - log_c[i]) / (log_eps[i + 1] - log_eps[i]); };

  ScalingFit best;
  std::size_t best_len = 0;
  const std::size_t min_points = std::max<std::size_t>(options.min_region_points, 2);
  for (std::size_t a = 0; a < k; ++a) {
    if (!usable(a)) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (std::size_t b = a + 1; b < k && usable(b); ++b) {
      const double s = local_slope(b - 1);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      sum += s;
      const double mean = sum / static_cast<double>(b - a);
      if (!(mean > 0.0) || hi - lo > options.slope_tol * mean) break;
      const std::size_t len = b - a + 1;
      if (len >= min_points && len > best_len) {
        best_len = len;
        best.found = true;
        best.first = a;
        best.last = b;
      }
    }
  }
  if (!best.found) return best;

  const auto xs = std::span<const double>(log_eps).subspan(best.first, best_len);
  const auto ys = std::span<const double>(log_c).subspan(best.first, best_len);
  const auto fit = least_squares(xs, ys);
  best.slope = fit.slope;
  for (std::size_t i = 0; i < best_len; ++i) {
    best.max_residual = std::max(best.max_residual, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  }
  return best;
}

Saturation saturation_verdict(const std::map<int, double>& d2_by_m, double tol) {
  if (d2_by_m.size() < 3) {
    throw InputError(fmt::format("saturation verdict needs at least 3 dimensions (got {})", d2_by_m.size()));
  }
  std::vector<int> m;
  std::vector<double> d2;
  for (const auto& [dim, value] : d2_by_m) {
    m.push_back(dim);
    d2.push_back(value);
  }
  const std::size_t n = d2.size();
  if (std::abs(d2[n - 1] - d2[n - 2]) < tol && std::abs(d2[n - 2] - d2[n - 3]) < tol) {
    return Saturation::Deterministic;
  }
  const std::size_t mid = (n - 1) / 2;
  const double climb = d2[n - 1] - d2[mid];
  if (climb > 0.5 * static_cast<double>(m[n - 1] - m[mid])) return Saturation::Stochastic;
  return Saturation::Inconclusive;
}

Saturation saturation_from_log10c(std::span<const int> m_values, std::span<const double> log10_c, double tol) {
  if (m_values.size() != log10_c.size() || m_values.size() < 3) {
    throw InputError("need matching m and log10 C lists with at least 3 entries");
  }
  if (!std::is_sorted(m_values.begin(), m_values.end())) throw InputError("m values must be ascending");
  const std::size_t n = log10_c.size();
  if (std::abs(log10_c[n - 1] - log10_c[n - 2]) < tol && std::abs(log10_c[n - 2] - log10_c[n - 3]) < tol) {
    return Saturation::Deterministic;
  }
  bool falling = true;
  for (std::size_t i = 1; i < n; ++i) falling = falling && (log10_c[i - 1] - log10_c[i] >= tol);
  return falling ? Saturation::Stochastic : Saturation::Inconclusive;
}

Saturation saturation_from_log10c_matrix(std::span<const int> m_values, const std::vector<std::vector<double>>& rows,
                                         double tol) {
  if (rows.empty()) throw InputError("log10 C matrix has no rows");
  const Saturation first = saturation_from_log10c(m_values, rows.front(), tol);
  for (const auto& row : rows) {
    if (saturation_from_log10c(m_values, row, tol) != first) return Saturation::Inconclusive;
  }
  return first;
}

K2Estimate k2_entropy(std::span<const double> eps, std::span<const double> c_m, std::span<const double> c_next,
                      int tau, int delta_m, std::optional<std::pair<std::size_t, std::size_t>> fit_range,
                      std::span<const std::uint64_t> counts_next, const D2Options& options) {
  const std::size_t k = eps.size();
  if (c_m.size() != k || c_next.size() != k) throw InputError("C lists must share the eps grid");
  if (!counts_next.empty() && counts_next.size() != k) throw InputError("pair counts must share the eps grid");
  if (tau < 1 || delta_m < 1) throw InputError("K2 needs tau >= 1 and delta_m >= 1");

  K2Estimate r;
  r.by_eps.assign(k, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < k; ++i) {
    const bool counted = counts_next.empty() || counts_next[i] >= options.min_pairs;
    if (c_m[i] > 0.0 && c_next[i] > 0.0 && counted) {
      r.by_eps[i] = std::log(c_m[i] / c_next[i]) / (static_cast<double>(tau) * delta_m);
      finite.push_back(i);
    }
  }
  if (finite.empty()) throw EstimationError("K2: no eps where both correlation integrals are positive");

  std::vector<std::size_t> in_range;
  if (fit_range) {
    for (std::size_t i : finite) {
      if (i >= fit_range->first && i <= fit_range->second) in_range.push_back(i);
    }
  }
  if (in_range.empty()) in_range = finite;
  double sum = 0.0;
  for (std::size_t i : in_range) sum += r.by_eps[i];
  r.value = sum / static_cast<double>(in_range.size());
  r.first = in_range.front();
  r.last = in_range.back();
  r.found = true;

  // Trend over the smaller-eps half of the usable points.
  const std::size_t half = std::max<std::size_t>(3, (finite.size() + 1) / 2);
  if (finite.size() >= 3) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < std::min(half, finite.size()); ++j) {
      x.push_back(std::log(eps[finite[j]]));
      y.push_back(r.by_eps[finite[j]]);
    }
    r.divergent = least_squares(x, y).slope < -options.k2_divergence_slope;
  }
  return r;
}

CorrelationProfile estimate_d2(const TimeSeries& s, std::vector<int> m_list, std::span<const double> eps_grid, int tau,
                               std::optional<std::size_t> theiler, const D2Options& options) {
  if (m_list.empty()) throw InputError("m list is empty");
  std::sort(m_list.begin(), m_list.end());
  m_list.erase(std::unique(m_list.begin(), m_list.end()), m_list.end());
  if (m_list.front() < 1) throw InputError("embedding dimensions must be >= 1");
  if (tau < 1) throw InputError(fmt::format("tau must be >= 1 (got {})", tau));
  if (eps_grid.size() < 6) throw InputError("eps grid needs at least 6 points");
  check_radii(eps_grid);

  const EmbeddingParams widest{m_list.back(), tau};
  const std::size_t points = embedded_count(s.size(), widest);
  if (points < 2) {
    throw InputError(fmt::format("series of length {} too short for m={} tau={}", s.size(), widest.m, tau));
  }

  CorrelationProfile profile;
  profile.epsilons.assign(eps_grid.begin(), eps_grid.end());
  profile.tau = tau;
  profile.points = points;
  profile.theiler_window = theiler.value_or(static_cast<std::size_t>(tau) * static_cast<std::size_t>(m_list.back()));
  profile.admissible_pairs = admissible_pairs(points, profile.theiler_window);
  if (profile.admissible_pairs == 0) {
    throw EstimationError(fmt::format("no pairs with index gap > {} among {} points", profile.theiler_window, points));
  }

  const PointView view{s.values(), 1, static_cast<std::size_t>(tau), points};
  const auto counts = count_pairs_by_level(view, m_list, eps_grid, profile.theiler_window, options.threads);
  const auto total = static_cast<double>(profile.admissible_pairs);

  std::map<int, double> fitted;
  for (std::size_t l = 0; l < m_list.size(); ++l) {
    const int m = m_list[l];
    auto& c = profile.c_by_m[m];
    c.resize(eps_grid.size());
    std::transform(counts[l].begin(), counts[l].end(), c.begin(),
                   [total](std::uint64_t n) { return static_cast<double>(n) / total; });
    profile.counts_by_m[m] = counts[l];
    const auto fit = fit_scaling_region(eps_grid, c, counts[l], options);
    profile.d2_by_m[m] = fit;
    if (fit.found) fitted[m] = fit.slope;
  }

  for (std::size_t l = 0; l + 1 < m_list.size(); ++l) {
    const int m = m_list[l];
    const int next = m_list[l + 1];
    const auto& fit = profile.d2_by_m[m];
    std::optional<std::pair<std::size_t, std::size_t>> range;
    if (fit.found) range = std::pair{fit.first, fit.last};
    try {
      profile.k2_by_m[m] = k2_entropy(eps_grid, profile.c_by_m[m], profile.c_by_m[next], tau, next - m, range,
                                      profile.counts_by_m[next], options);
    } catch (const EstimationError&) {
      profile.k2_by_m[m] = K2Estimate{};
    }
  }

  profile.saturation = fitted.size() >= 3 ? saturation_verdict(fitted, options.saturation_tol) : Saturation::Inconclusive;
  return profile;
}

}  // namespace chaoscope

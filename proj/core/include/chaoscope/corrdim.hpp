#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "chaoscope/embedding.hpp"
#include "chaoscope/time_series.hpp"

namespace chaoscope {

/// `count` values log-spaced over [lo, hi], both ends included.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count);

/// Pair counts for an ascending radius grid. below[k] is the number of
/// unordered pairs (i, j) with |i - j| > theiler and max-norm distance
/// strictly less than radii[k].
struct PairCounts {
  std::vector<std::uint64_t> below;
  std::uint64_t admissible = 0;
};

/// Counts pairs over index blocks on `threads` workers (0 = hardware
/// concurrency). Counts are integers merged by addition, so the result does
/// not depend on the number of workers.
PairCounts count_pairs(const Embedding& e, std::span<const double> radii, std::size_t theiler,
                       unsigned threads = 0);

/// Fraction of admissible pairs closer than eps in the max norm.
/// Throws EstimationError if there are no pairs with |i - j| > theiler.
double correlation_integral(const Embedding& e, double eps, std::size_t theiler);

enum class Saturation { Deterministic, Stochastic, Inconclusive };

std::string_view to_string(Saturation s) noexcept;

/// Least-squares slope of ln C against ln eps over grid points
/// first..last (inclusive).
struct ScalingFit {
  bool found = false;
  double slope = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  double max_residual = 0.0;
};

struct K2Estimate {
  bool found = false;
  double value = 0.0;  ///< nats per sample, mean of K2(eps) over the fit range
  bool divergent = false;
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<double> by_eps;  ///< NaN where either integral is ill-conditioned
};

struct D2Options {
  /// A scaling region is a run of grid points whose local slopes stay within
  /// slope_tol * (their mean slope) of each other.
  double slope_tol = 0.15;
  /// Points need at least this many pairs below eps ...
  std::uint64_t min_pairs = 50;
  /// ... and C(eps) at most this, which keeps the saturated top of the curve
  /// out of the fit.
  double max_c = 0.5;
  std::size_t min_region_points = 4;
  /// Threshold for saturation_verdict on the fitted slopes.
  double saturation_tol = 0.15;
  /// K2(eps) rising faster than this many nats per e-fold decrease of eps at
  /// the small-eps end is reported as divergent.
  double k2_divergence_slope = 0.3;
  unsigned threads = 0;
};

struct CorrelationProfile {
  std::vector<double> epsilons;
  int tau = 1;
  std::size_t theiler_window = 0;
  std::size_t points = 0;  ///< delay vectors per dimension (shared index set)
  std::map<int, std::vector<double>> c_by_m;
  std::map<int, std::vector<std::uint64_t>> counts_by_m;
  std::uint64_t admissible_pairs = 0;
  std::map<int, ScalingFit> d2_by_m;
  /// Keyed by the lower dimension of each consecutive pair in the m list.
  std::map<int, K2Estimate> k2_by_m;
  Saturation saturation = Saturation::Inconclusive;
};

/// Longest run of well-conditioned grid points with consistent local slope.
ScalingFit fit_scaling_region(std::span<const double> eps, std::span<const double> c,
                              std::span<const std::uint64_t> counts, const D2Options& options = {});

/// Correlation integrals, D2 fits, K2 estimates and a saturation verdict for
/// every m in m_list. All dimensions use the same delay-vector start indices
/// (the first N - (m_max - 1) tau), so C is nonincreasing in m at fixed eps.
/// The Theiler window defaults to tau * m_max.
CorrelationProfile estimate_d2(const TimeSeries& s, std::vector<int> m_list, std::span<const double> eps_grid,
                               int tau, std::optional<std::size_t> theiler = std::nullopt,
                               const D2Options& options = {});

/// Deterministic when the last two increments of D2 along m are each below
/// tol in magnitude; Stochastic when D2 climbs by more than 0.5 per unit m
/// from the middle entry of the m list to the last; Inconclusive otherwise.
/// Needs at least three entries.
Saturation saturation_verdict(const std::map<int, double>& d2_by_m, double tol);

/// Same question asked of log10 C(eps) at one fixed eps as m grows.
/// Deterministic when the last two changes are each below tol in magnitude;
/// Stochastic when log10 C strictly decreases at every step by at least tol;
/// Inconclusive otherwise.
Saturation saturation_from_log10c(std::span<const int> m_values, std::span<const double> log10_c, double tol = 0.01);

/// Applies saturation_from_log10c to each row (one row per delay). The
/// matrix verdict is the common row verdict, or Inconclusive if rows differ.
Saturation saturation_from_log10c_matrix(std::span<const int> m_values,
                                         const std::vector<std::vector<double>>& rows, double tol = 0.01);

/// K2(eps) = ln(C_m / C_m') / (tau (m' - m)) with m' > m. The reported value
/// averages K2 over [fit_first, fit_last]; the divergence flag looks at the
/// trend of K2 over the smaller-eps half of the well-conditioned points.
/// Throws EstimationError if no eps has both integrals positive.
K2Estimate k2_entropy(std::span<const double> eps, std::span<const double> c_m, std::span<const double> c_next,
                      int tau, int delta_m = 1, std::optional<std::pair<std::size_t, std::size_t>> fit_range = {},
                      std::span<const std::uint64_t> counts_next = {}, const D2Options& options = {});

}  // namespace chaoscope

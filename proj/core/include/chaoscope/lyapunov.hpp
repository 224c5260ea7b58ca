#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "chaoscope/embedding.hpp"

namespace chaoscope {

enum class LogBase { E, Two };

std::string_view to_string(LogBase base) noexcept;

/// Parameters of the fixed-evolution-time Wolf estimator. Distances are
/// Euclidean in the (normalized) embedding space.
struct WolfParams {
  int evolve_steps = 3;         ///< samples between renormalizations
  double scale_min = 0.001;     ///< noise floor; closer neighbours are ignored
  double scale_max = 0.1;       ///< separation that triggers a replacement
  int min_time_separation = 1;  ///< minimum |index gap| between fiducial and neighbour
  LogBase log_base = LogBase::E;
  bool record_trace = false;

  /// Defaults with min_time_separation = tau * m.
  static WolfParams defaults_for(const EmbeddingParams& e);
};

struct WolfTraceRecord {
  std::size_t step = 0;           ///< fiducial index after the evolution
  double separation_before = 0.0;  ///< L at the start of the cycle
  double separation_after = 0.0;   ///< L' after evolve_steps samples
  bool replaced = false;           ///< a new neighbour was chosen after this cycle
};

struct LyapunovResult {
  double lambda_max = 0.0;  ///< log_base units per sample step
  LogBase log_base = LogBase::E;
  std::size_t replacements = 0;
  std::size_t steps_used = 0;  ///< samples evolved in total
  std::vector<WolfTraceRecord> trace;
};

/// Largest Lyapunov exponent by Wolf's method.
///
/// A fiducial trajectory starts at the first embedded point and is paired
/// with its nearest admissible neighbour (index gap >= min_time_separation,
/// distance >= scale_min). Both are evolved evolve_steps samples and
/// log(L'/L) is accumulated. When L' exceeds scale_max, or the neighbour runs
/// off the data, a replacement is chosen that best preserves the direction
/// of the separation: the candidate with the smallest angle to it among
/// those within scale_max/4, then scale_max/2, then scale_max (all at least
/// scale_min away), and finally the nearest admissible point by distance
/// alone. The estimate is the accumulated log
/// stretch divided by the number of samples evolved.
///
/// Ties in every search are broken by the lowest index, so the result is a
/// pure function of its inputs.
///
/// Throws InputError for invalid parameters or an embedding shorter than
/// evolve_steps + 2 points, and EstimationError when no admissible initial
/// neighbour exists.
LyapunovResult max_lyapunov(const Embedding& e, const WolfParams& p);

}  // namespace chaoscope

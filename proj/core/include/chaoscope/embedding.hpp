#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chaoscope/time_series.hpp"

namespace chaoscope {

struct EmbeddingParams {
  int m = 2;    ///< embedding dimension
  int tau = 1;  ///< delay in samples

  friend bool operator==(const EmbeddingParams&, const EmbeddingParams&) = default;
};

/// Delay vectors (x[i], x[i + tau], ..., x[i + (m-1) tau]) stored row-major.
class Embedding {
 public:
  Embedding(std::vector<double> coords, EmbeddingParams params, std::size_t source_length);

  std::size_t size() const noexcept { return count_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(params_.m); }
  const EmbeddingParams& params() const noexcept { return params_; }
  std::size_t source_length() const noexcept { return source_length_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dimension(), dimension()};
  }
  /// All coordinates, point after point.
  std::span<const double> coordinates() const noexcept { return coords_; }

 private:
  std::vector<double> coords_;
  EmbeddingParams params_;
  std::size_t source_length_;
  std::size_t count_;
};

/// Number of delay vectors a series of `length` samples yields, or 0 when
/// (m - 1) tau >= length.
std::size_t embedded_count(std::size_t length, EmbeddingParams p) noexcept;

/// Throws InputError for m < 1, tau < 1 or a series too short for (m, tau).
Embedding delay_embed(const TimeSeries& s, EmbeddingParams p);

/// Embeds only the first `prefix` delay vectors. Used when several
/// dimensions must share one set of time indices.
Embedding delay_embed_prefix(const TimeSeries& s, EmbeddingParams p, std::size_t prefix);

}  // namespace chaoscope

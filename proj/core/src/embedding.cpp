#include "chaoscope/embedding.hpp"

#include <fmt/format.h>

#include "chaoscope/error.hpp"

namespace chaoscope {

Embedding::Embedding(std::vector<double> coords, EmbeddingParams params, std::size_t source_length)
    : coords_(std::move(coords)), params_(params), source_length_(source_length) {
  if (params_.m < 1 || params_.tau < 1) {
    throw InputError(fmt::format("invalid embedding parameters m={} tau={}", params_.m, params_.tau));
  }
  if (coords_.size() % dimension() != 0) {
    throw InputError("coordinate count is not a multiple of the embedding dimension");
  }
  count_ = coords_.size() / dimension();
}

std::size_t embedded_count(std::size_t length, EmbeddingParams p) noexcept {
  if (p.m < 1 || p.tau < 1) return 0;
  const std::size_t span = static_cast<std::size_t>(p.m - 1) * static_cast<std::size_t>(p.tau);
  return span < length ? length - span : 0;
}

Embedding delay_embed_prefix(const TimeSeries& s, EmbeddingParams p, std::size_t prefix) {
  if (p.m < 1 || p.tau < 1) {
    throw InputError(fmt::format("invalid embedding parameters m={} tau={}", p.m, p.tau));
  }
  const std::size_t available = embedded_count(s.size(), p);
  if (available == 0) {
    throw InputError(fmt::format("series of length {} too short for m={} tau={}", s.size(), p.m, p.tau));
  }
  if (prefix > available) {
    throw InputError(fmt::format("requested {} delay vectors but only {} exist", prefix, available));
  }
  const auto m = static_cast<std::size_t>(p.m);
  const auto tau = static_cast<std::size_t>(p.tau);
  const auto x = s.values();
  std::vector<double> coords(prefix * m);
  for (std::size_t i = 0; i < prefix; ++i) {
    for (std::size_t j = 0; j < m; ++j) coords[i * m + j] = x[i + j * tau];
  }
  return Embedding(std::move(coords), p, s.size());
}

Embedding delay_embed(const TimeSeries& s, EmbeddingParams p) {
  return delay_embed_prefix(s, p, embedded_count(s.size(), p));
}

}  // namespace chaoscope

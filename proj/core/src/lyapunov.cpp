#include "chaoscope/lyapunov.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "chaoscope/error.hpp"

namespace chaoscope {

std::string_view to_string(LogBase base) noexcept {
  return base == LogBase::Two ? "log2" : "ln";
}

WolfParams WolfParams::defaults_for(const EmbeddingParams& e) {
  WolfParams p;
  p.min_time_separation = std::max(1, e.tau * e.m);
  return p;
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

class NeighbourSearch {
 public:
  NeighbourSearch(const Embedding& e, const WolfParams& p)
      : e_(e),
        p_(p),
        last_start_(e.size() - 1 - static_cast<std::size_t>(p.evolve_steps)) {}

  /// Nearest point j <= last_start with |j - fid| >= min_time_separation and
  /// distance >= scale_min.
  std::optional<std::size_t> nearest(std::size_t fid) const {
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    const auto f = e_.point(fid);
    for (std::size_t j = 0; j <= last_start_; ++j) {
      if (!separated(fid, j)) continue;
      const double d = distance(f, e_.point(j));
      if (d >= p_.scale_min && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  }

  /// Replacement neighbour keeping the separation direction `ref`: the
  /// smallest angle to `ref` among candidates within scale_max/4, then
  /// scale_max/2, then scale_max (never below scale_min); failing all three,
  /// the nearest admissible point.
  std::optional<std::size_t> replacement(std::size_t fid, std::span<const double> ref) {
    double ref_norm = 0.0;
    for (double r : ref) ref_norm += r * r;
    ref_norm = std::sqrt(ref_norm);

    struct Pick {
      std::optional<std::size_t> index;
      double score = std::numeric_limits<double>::infinity();
      void offer(std::size_t j, double s) {
        if (s < score) {
          score = s;
          index = j;
        }
      }
    };
    // picks[0..2] score by -cos(angle) inside the growing radii; picks[3] by distance.
    std::array<Pick, 4> picks;
    const std::array<double, 3> radius{0.25 * p_.scale_max, 0.5 * p_.scale_max, p_.scale_max};

    const auto f = e_.point(fid);
    for (std::size_t j = 0; j <= last_start_; ++j) {
      if (!separated(fid, j)) continue;
      const auto x = e_.point(j);
      double d2 = 0.0;
      double dot = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - f[k];
        d2 += diff * diff;
        dot += diff * ref[k];
      }
      const double d = std::sqrt(d2);
      if (d < p_.scale_min) continue;
      picks[3].offer(j, d);
      const double cosine = ref_norm > 0.0 ? dot / (d * ref_norm) : 1.0;
      for (std::size_t t = 0; t < radius.size(); ++t) {
        if (d <= radius[t]) picks[t].offer(j, -cosine);
      }
    }
    for (const Pick& pick : picks) {
      if (pick.index) return pick.index;
    }
    return std::nullopt;
  }

 private:
  bool separated(std::size_t a, std::size_t b) const noexcept {
    const std::size_t gap = a > b ? a - b : b - a;
    return gap >= static_cast<std::size_t>(p_.min_time_separation);
  }

  const Embedding& e_;
  const WolfParams& p_;
  std::size_t last_start_;
};

void validate(const Embedding& e, const WolfParams& p) {
  if (p.evolve_steps < 1) throw InputError(fmt::format("evolve_steps must be >= 1 (got {})", p.evolve_steps));
  if (p.min_time_separation < 1) {
    throw InputError(fmt::format("min_time_separation must be >= 1 (got {})", p.min_time_separation));
  }
  const double diameter = std::sqrt(static_cast<double>(e.dimension()));
  if (!(p.scale_min > 0.0 && p.scale_min < p.scale_max && p.scale_max <= diameter)) {
    throw InputError(fmt::format("need 0 < scale_min < scale_max <= sqrt(m); got {} and {}", p.scale_min,
                                 p.scale_max));
  }
  if (e.size() < static_cast<std::size_t>(p.evolve_steps) + 2) {
    throw InputError(fmt::format("embedding of {} points is too short for evolve_steps={}", e.size(),
                                 p.evolve_steps));
  }
}

}  // namespace

LyapunovResult max_lyapunov(const Embedding& e, const WolfParams& p) {
  validate(e, p);
  const std::size_t n = e.size();
  const auto evolve = static_cast<std::size_t>(p.evolve_steps);
  NeighbourSearch search(e, p);

  std::size_t fid = 0;
  const auto first = search.nearest(fid);
  if (!first) {
    throw EstimationError("no admissible initial neighbour (check scale_min and min_time_separation)");
  }
  std::size_t nb = *first;

  LyapunovResult r;
  r.log_base = p.log_base;
  double log_stretch = 0.0;
  std::vector<double> separation(e.dimension());

  while (fid + evolve < n) {
    const double before = distance(e.point(fid), e.point(nb));
    fid += evolve;
    nb += evolve;
    const double after = distance(e.point(fid), e.point(nb));

    // A collapsed separation has no finite log stretch; it only forces a
    // new neighbour.
    if (before > 0.0 && after > 0.0) {
      log_stretch += std::log(after / before);
      r.steps_used += evolve;
    }

    const bool ran_off = nb + evolve >= n;
    const bool replace = after > p.scale_max || after == 0.0 || ran_off;
    bool replaced = false;
    if (replace && fid + evolve < n) {
      const auto f = e.point(fid);
      const auto x = e.point(nb);
      for (std::size_t j = 0; j < separation.size(); ++j) separation[j] = x[j] - f[j];
      const auto next = search.replacement(fid, separation);
      if (!next) break;
      nb = *next;
      replaced = true;
      ++r.replacements;
    }
    if (p.record_trace) r.trace.push_back({fid, before, after, replaced});
  }

  if (r.steps_used == 0) throw EstimationError("no evolution cycle completed");
  const double per_step = log_stretch / static_cast<double>(r.steps_used);
  r.lambda_max = p.log_base == LogBase::Two ? per_step / std::numbers::ln2 : per_step;
  return r;
}

}  // namespace chaoscope

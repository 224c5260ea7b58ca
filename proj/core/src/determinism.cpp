#include "chaoscope/determinism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "chaoscope/error.hpp"

namespace chaoscope {
namespace {

struct BoxAccumulator {
  std::vector<double> sum;
  std::size_t passes = 0;
};

class BoxGrid {
 public:
  BoxGrid(int q, std::size_t m) : q_(q), m_(m) {
    if (q < 2) throw InputError(fmt::format("grid subdivisions must be >= 2 (got {})", q));
    // Box indices are packed into 62 bits.
    const double boxes = std::pow(static_cast<double>(q), static_cast<double>(m));
    if (boxes > 4.0e18) {
      throw InputError(fmt::format("grid of {}^{} boxes is too fine", q, m));
    }
  }

  std::uint64_t key(std::span<const double> x) const noexcept {
    std::uint64_t k = 0;
    for (std::size_t j = m_; j-- > 0;) k = k * static_cast<std::uint64_t>(q_) + cell(x[j]);
    return k;
  }

  std::uint64_t cell(double v) const noexcept {
    const auto c = static_cast<std::int64_t>(std::floor(v * q_));
    return static_cast<std::uint64_t>(std::clamp<std::int64_t>(c, 0, q_ - 1));
  }

  int q() const noexcept { return q_; }

 private:
  int q_;
  std::size_t m_;
};

class PassCollector {
 public:
  explicit PassCollector(std::size_t m) : m_(m), unit_(m) {}

  void add(std::uint64_t box, std::span<const double> from, std::span<const double> to) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      unit_[j] = to[j] - from[j];
      norm2 += unit_[j] * unit_[j];
    }
    if (!(norm2 > 0.0)) return;
    const double inv = 1.0 / std::sqrt(norm2);
    auto& acc = boxes_[box];
    if (acc.sum.empty()) acc.sum.assign(m_, 0.0);
    for (std::size_t j = 0; j < m_; ++j) acc.sum[j] += unit_[j] * inv;
    ++acc.passes;
  }

  DeterminismResult finish(int min_passes) const {
    DeterminismResult r;
    double resultant = 0.0;
    // std::map iterates in key order, so the reduction order is fixed.
    for (const auto& [key, acc] : boxes_) {
      ++r.occupied_boxes;
      if (acc.passes < static_cast<std::size_t>(min_passes)) {
        ++r.excluded_boxes;
        continue;
      }
      double norm2 = 0.0;
      for (double s : acc.sum) norm2 += s * s;
      resultant += std::sqrt(norm2);
      r.total_passes += acc.passes;
    }
    if (r.total_passes == 0) {
      throw EstimationError(fmt::format("no box has at least {} passes ({} boxes occupied)", min_passes,
                                        r.occupied_boxes));
    }
    r.kappa = std::clamp(resultant / static_cast<double>(r.total_passes), 0.0, 1.0);
    return r;
  }

 private:
  std::size_t m_;
  std::vector<double> unit_;
  std::map<std::uint64_t, BoxAccumulator> boxes_;
};

void collect_sample_successor(const Embedding& e, const BoxGrid& grid, PassCollector& out) {
  const std::size_t n = e.size();
  std::size_t start = 0;
  while (start < n) {
    const auto box = grid.key(e.point(start));
    std::size_t end = start;
    while (end + 1 < n && grid.key(e.point(end + 1)) == box) ++end;
    if (end + 1 < n) out.add(box, e.point(start), e.point(end + 1));
    start = end + 1;
  }
}

void collect_boundary_crossing(const Embedding& e, const BoxGrid& grid, PassCollector& out) {
  const std::size_t n = e.size();
  const std::size_t m = e.dimension();
  const double q = grid.q();

  std::vector<double> cuts;
  std::vector<double> entry(m), exit(m), probe(m);
  std::uint64_t current = 0;
  bool have_box = false;
  bool complete = false;  // false while in the box holding the first sample

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = e.point(i);
    const auto b = e.point(i + 1);

    cuts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < m; ++j) {
      const double d = b[j] - a[j];
      if (d == 0.0) continue;
      const double lo = std::min(a[j], b[j]) * q;
      const double hi = std::max(a[j], b[j]) * q;
      for (double g = std::floor(lo) + 1.0; g < hi; g += 1.0) {
        const double t = (g / q - a[j]) / d;
        if (t > 0.0 && t < 1.0) cuts.push_back(t);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x < 1e-12; }),
               cuts.end());
    if (cuts.back() != 1.0) cuts.back() = 1.0;

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double t0 = cuts[c];
      const double t1 = cuts[c + 1];
      const double mid = 0.5 * (t0 + t1);
      for (std::size_t j = 0; j < m; ++j) probe[j] = a[j] + mid * (b[j] - a[j]);
      const auto box = grid.key(probe);
      if (!have_box || box != current) {
        if (have_box && complete) out.add(current, entry, exit);
        complete = have_box;
        have_box = true;
        current = box;
        for (std::size_t j = 0; j < m; ++j) entry[j] = a[j] + t0 * (b[j] - a[j]);
      }
      for (std::size_t j = 0; j < m; ++j) exit[j] = a[j] + t1 * (b[j] - a[j]);
    }
  }
}

}  // namespace

DeterminismResult determinism_coefficient(const Embedding& e, const DeterminismParams& p) {
  if (e.size() < 2) throw InputError("determinism test needs at least 2 embedded points");
  if (p.min_passes < 1) throw InputError(fmt::format("min_passes must be >= 1 (got {})", p.min_passes));
  for (double v : e.coordinates()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("embedding is not normalized: coordinates must lie in [0, 1]");
    }
  }
  const BoxGrid grid(p.grid_subdivisions, e.dimension());
  PassCollector passes(e.dimension());
  switch (p.pass_rule) {
    case PassRule::BoundaryCrossing:
      collect_boundary_crossing(e, grid, passes);
      break;
    case PassRule::SampleSuccessor:
      collect_sample_successor(e, grid, passes);
      break;
  }
  return passes.finish(p.min_passes);
}

}  // namespace chaoscope

#pragma once

#include <cstddef>

#include "chaoscope/embedding.hpp"

namespace chaoscope {

/// How a trajectory pass through a box is turned into a direction.
enum class PassRule {
  /// The trajectory is the polyline through the embedded points. A pass
  /// starts where the polyline crosses into a box and ends where it crosses
  /// out; its direction is exit minus entry. The pass containing the first
  /// sample and the one containing the last sample are incomplete and
  /// contribute nothing.
  BoundaryCrossing,
  /// A pass is a maximal run of consecutive samples inside one box; its
  /// direction runs from the first sample of the run to the first sample
  /// after the run. The final run has no successor and contributes nothing.
  SampleSuccessor,
};

struct DeterminismParams {
  int grid_subdivisions = 10;  ///< boxes per axis
  int min_passes = 2;          ///< boxes with fewer passes are excluded
  PassRule pass_rule = PassRule::BoundaryCrossing;
};

struct DeterminismResult {
  double kappa = 0.0;              ///< pass-weighted mean resultant length, in [0, 1]
  std::size_t occupied_boxes = 0;  ///< boxes holding at least one directed pass
  std::size_t total_passes = 0;    ///< passes in boxes that met min_passes
  std::size_t excluded_boxes = 0;  ///< occupied boxes below min_passes
};

/// Kaplan-Glass style determinism coefficient of an embedded trajectory.
///
/// The unit hypercube is cut into q^m boxes. Each pass through box k yields
/// a unit direction; with n_k passes and V_k their mean,
///
///     kappa = sum_k n_k |V_k| / sum_k n_k
///
/// over boxes with n_k >= min_passes. Identical unit vectors give 1; directions
/// that cancel give values near 0.
///
/// Throws InputError when a coordinate lies outside [0, 1], when fewer than
/// two points are given or when q^m does not fit a 62-bit box index, and
/// EstimationError when no box reaches min_passes.
DeterminismResult determinism_coefficient(const Embedding& e, const DeterminismParams& p = {});

}  // namespace chaoscope

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscope/determinism.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/time_series.hpp"

namespace chaoscope {

/// One (m, tau) parameterization of a sweep.
struct SweepCell {
  int m = 0;
  int tau = 0;
  std::optional<double> kappa;
  std::optional<double> mle;  ///< computed for selected cells only
  std::string mle_units;
  std::string status = "ok";  ///< estimator failure message when not "ok"

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct TauRange {
  int first = 2;
  int last = 43;
};

struct SweepConfig {
  std::vector<int> m_set{2, 3};
  TauRange tau;
  DeterminismParams determinism;
  /// min_time_separation is replaced by tau * m per cell unless
  /// min_sep_override is set.
  WolfParams wolf;
  std::optional<int> min_sep_override;
  int top_k = 5;
  bool mle_all = false;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// kappa for every (m, tau) cell, then the MLE for the top_k cells by kappa
/// within each m (or every cell with mle_all). The series is min-max
/// normalized first. Estimator failures are recorded in the cell's status
/// instead of aborting. Cells come back ordered by (m, tau) and the result
/// does not depend on the thread count.
///
/// Throws InputError when a cell's (m, tau) does not fit the series.
std::vector<SweepCell> run_sweep(const TimeSeries& s, const SweepConfig& config);

/// Cells of dimension m with a kappa, sorted by kappa descending, ties by
/// smaller tau; at most k rows.
std::vector<SweepCell> top_k_by_kappa(std::span<const SweepCell> cells, std::size_t k, int m);

enum class MleSign { Positive, NonPositive };
enum class Evidence { StrongEvidence, WeakEvidence, NoEvidence };

std::string_view to_string(MleSign s) noexcept;
std::string_view to_string(Evidence e) noexcept;

struct VerdictThresholds {
  double strong = 90.0;  ///< percent
  double weak = 70.0;    ///< percent
};

struct Verdict {
  int m = 0;
  int tau = 0;
  double kappa = 0.0;
  double mle = 0.0;
  MleSign mle_sign = MleSign::NonPositive;
  double reliability_percent = 0.0;  ///< 100 * kappa, full precision
  Evidence classification = Evidence::NoEvidence;
  std::string narrative;
};

/// kappa read as the reliability (in percent) of the MLE sign. Strong
/// evidence needs a positive MLE and reliability >= strong; weak evidence a
/// positive MLE and reliability >= weak. The narrative prints the
/// reliability truncated to a whole percent.
///
/// Throws InputError if the cell has no MLE or kappa, or the thresholds are
/// not 0 < weak < strong <= 100.
Verdict make_verdict(const SweepCell& cell, const VerdictThresholds& thresholds = {});

enum class Format { Text, Csv, Json };

/// Throws InputError for anything but "text", "csv" or "json".
Format parse_format(std::string_view name);

/// Text aligns m, tau, kappa (6 decimals) and MLE (4 decimals); csv and
/// json keep full precision. Throws InputError on empty input.
std::string render_table(std::span<const SweepCell> cells, Format format);
std::string render_verdicts(std::span<const Verdict> verdicts, Format format);

/// Inverse of render_table(cells, Format::Json).
std::vector<SweepCell> cells_from_json(std::string_view json);

/// Complete analysis document:
/// { series: {label, n, transforms}, params: {...}, cells: [...],
///   verdicts: [...], version }.
std::string render_report_json(const TimeSeries& s, const SweepConfig& config, std::span<const SweepCell> cells,
                               std::span<const Verdict> verdicts, const VerdictThresholds& thresholds);

/// Library version string.
std::string_view version() noexcept;

}  // namespace chaoscope

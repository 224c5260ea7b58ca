#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chaoscope {

/// Uniformly sampled scalar observations.
///
/// Values are finite, there are at least two of them, and the sample
/// interval is positive. Instances are immutable once constructed; every
/// transform returns a new series with the transform name appended to
/// transform_history().
class TimeSeries {
 public:
  /// Throws InputError if any invariant is violated.
  TimeSeries(std::vector<double> values, double sample_interval = 1.0, std::string label = {},
             std::vector<std::string> transform_history = {"raw"});

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double sample_interval() const noexcept { return sample_interval_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<std::string>& transform_history() const noexcept { return history_; }

  /// Same values, same history, different label.
  TimeSeries relabeled(std::string label) const;

 private:
  std::vector<double> values_;
  double sample_interval_;
  std::string label_;
  std::vector<std::string> history_;
};

struct CsvOptions {
  /// Defaults to the last column of each row when unset.
  std::variant<std::monostate, std::string, std::size_t> value_column{};
  char delimiter = ',';
  bool skip_header = true;
};

/// Reads one observation per data row. Data rows are numbered from 1 in
/// error messages (the header, if any, is not counted). Missing or
/// unparseable cells are errors; there is no imputation.
TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Element i of the result is ln(values[i+1] / values[i]).
TimeSeries to_log_returns(const TimeSeries& s);

/// Affine map onto [0, 1]: (x - min) / (max - min).
TimeSeries min_max_normalize(const TimeSeries& s);

}  // namespace chaoscope

#include "chaoscope/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "chaoscope/error.hpp"

namespace chaoscope {

TimeSeries::TimeSeries(std::vector<double> values, double sample_interval, std::string label,
                       std::vector<std::string> transform_history)
    : values_(std::move(values)),
      sample_interval_(sample_interval),
      label_(std::move(label)),
      history_(std::move(transform_history)) {
  if (values_.size() < 2) {
    throw InputError(fmt::format("fewer than 2 observations (got {})", values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError(fmt::format("non-finite value at index {}", i));
    }
  }
  if (!(sample_interval_ > 0.0) || !std::isfinite(sample_interval_)) {
    throw InputError("sample interval must be positive and finite");
  }
}

TimeSeries TimeSeries::relabeled(std::string label) const {
  return TimeSeries(values_, sample_interval_, std::move(label), history_);
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out, std::chars_format::general);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open '{}'", path.string()));
  }

  std::string line;
  std::optional<std::size_t> column;
  if (const auto* index = std::get_if<std::size_t>(&options.value_column)) column = *index;

  if (options.skip_header) {
    // Blank leading lines are not headers.
    while (std::getline(in, line) && trim(line).empty()) {
    }
    const auto header = split(line, options.delimiter);
    if (const auto* name = std::get_if<std::string>(&options.value_column)) {
      const auto it = std::find(header.begin(), header.end(), std::string_view(*name));
      if (it == header.end()) {
        throw InputError(fmt::format("column '{}' not found in header of '{}'", *name, path.string()));
      }
      column = static_cast<std::size_t>(it - header.begin());
    }
  } else if (std::holds_alternative<std::string>(options.value_column)) {
    throw InputError("a named value column requires a header row");
  }

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(line, options.delimiter);
    const std::size_t c = column.value_or(cells.size() - 1);
    if (c >= cells.size()) {
      throw InputError(fmt::format("row {}: value column {} missing", row, c));
    }
    double v = 0.0;
    if (!parse_double(cells[c], v)) {
      throw InputError(fmt::format("row {}: cannot parse '{}' as a number", row, cells[c]));
    }
    values.push_back(v);
  }
  if (values.size() < 2) {
    throw InputError(fmt::format("fewer than 2 observations in '{}'", path.string()));
  }
  return TimeSeries(std::move(values), 1.0, path.stem().string(), {"raw"});
}

TimeSeries to_log_returns(const TimeSeries& s) {
  const auto v = s.values();
  std::vector<double> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw InputError(fmt::format("log returns need positive values; index {} is {}", i, v[i]));
    }
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(std::log(v[i + 1] / v[i]));
  auto history = s.transform_history();
  history.emplace_back("log_returns");
  return TimeSeries(std::move(out), s.sample_interval(), s.label(), std::move(history));
}

TimeSeries min_max_normalize(const TimeSeries& s) {
  const auto v = s.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    throw InputError("cannot normalize a constant series (zero range)");
  }
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [&](double x) { return (x - min) / range; });
  auto history = s.transform_history();
  history.emplace_back("min_max_normalize");
  return TimeSeries(std::move(out), s.sample_interval(), s.label(), std::move(history));
}

}  // namespace chaoscope

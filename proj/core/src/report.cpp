#include "chaoscope/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "chaoscope/embedding.hpp"
#include "chaoscope/error.hpp"

#ifndef CHAOSCOPE_VERSION
#define CHAOSCOPE_VERSION "0.0.0"
#endif

namespace chaoscope {

using nlohmann::json;

std::string_view version() noexcept { return CHAOSCOPE_VERSION; }

namespace {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

std::string units_for(LogBase base) { return fmt::format("{}/sample", to_string(base)); }

}  // namespace

std::vector<SweepCell> run_sweep(const TimeSeries& s, const SweepConfig& config) {
  if (config.m_set.empty()) throw InputError("sweep needs at least one embedding dimension");
  if (config.tau.first < 1 || config.tau.last < config.tau.first) {
    throw InputError(fmt::format("invalid tau range {}..{}", config.tau.first, config.tau.last));
  }
  if (config.top_k < 0) throw InputError("top_k must be >= 0");

  std::vector<int> dims = config.m_set;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

  std::vector<SweepCell> cells;
  for (int m : dims) {
    for (int tau = config.tau.first; tau <= config.tau.last; ++tau) {
      if (m < 1 || embedded_count(s.size(), {m, tau}) < 2) {
        throw InputError(fmt::format("series of length {} too short for m={} tau={}", s.size(), m, tau));
      }
      SweepCell cell;
      cell.m = m;
      cell.tau = tau;
      cell.mle_units = units_for(config.wolf.log_base);
      cells.push_back(std::move(cell));
    }
  }

  const TimeSeries normalized = min_max_normalize(s);

  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    auto& cell = cells[i];
    try {
      const auto e = delay_embed(normalized, {cell.m, cell.tau});
      cell.kappa = determinism_coefficient(e, config.determinism).kappa;
    } catch (const Error& err) {
      cell.status = fmt::format("kappa: {}", err.what());
    }
  });

  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].kappa) continue;
    if (config.mle_all) {
      selected.push_back(i);
      continue;
    }
    const auto top = top_k_by_kappa(cells, static_cast<std::size_t>(config.top_k), cells[i].m);
    const bool chosen = std::any_of(top.begin(), top.end(), [&](const SweepCell& c) { return c.tau == cells[i].tau; });
    if (chosen) selected.push_back(i);
  }

  parallel_for(selected.size(), config.threads, [&](std::size_t k) {
    auto& cell = cells[selected[k]];
    try {
      const auto e = delay_embed(normalized, {cell.m, cell.tau});
      WolfParams wolf = config.wolf;
      wolf.min_time_separation = config.min_sep_override.value_or(std::max(1, cell.tau * cell.m));
      wolf.record_trace = false;
      cell.mle = max_lyapunov(e, wolf).lambda_max;
    } catch (const Error& err) {
      cell.status = fmt::format("mle: {}", err.what());
    }
  });
  return cells;
}

std::vector<SweepCell> top_k_by_kappa(std::span<const SweepCell> cells, std::size_t k, int m) {
  std::vector<SweepCell> rows;
  for (const auto& c : cells) {
    if (c.m == m && c.kappa) rows.push_back(c);
  }
  std::sort(rows.begin(), rows.end(), [](const SweepCell& a, const SweepCell& b) {
    if (*a.kappa != *b.kappa) return *a.kappa > *b.kappa;
    return a.tau < b.tau;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

std::string_view to_string(MleSign s) noexcept { return s == MleSign::Positive ? "Positive" : "NonPositive"; }

std::string_view to_string(Evidence e) noexcept {
  switch (e) {
    case Evidence::StrongEvidence:
      return "StrongEvidence";
    case Evidence::WeakEvidence:
      return "WeakEvidence";
    case Evidence::NoEvidence:
      break;
  }
  return "NoEvidence";
}

Verdict make_verdict(const SweepCell& cell, const VerdictThresholds& t) {
  if (!cell.mle) throw InputError(fmt::format("cell m={} tau={} has no MLE", cell.m, cell.tau));
  if (!cell.kappa) throw InputError(fmt::format("cell m={} tau={} has no kappa", cell.m, cell.tau));
  if (!(t.weak > 0.0 && t.weak < t.strong && t.strong <= 100.0)) {
    throw InputError(fmt::format("thresholds must satisfy 0 < weak < strong <= 100 (got {}, {})", t.weak, t.strong));
  }
  Verdict v;
  v.m = cell.m;
  v.tau = cell.tau;
  v.kappa = *cell.kappa;
  v.mle = *cell.mle;
  v.mle_sign = v.mle > 0.0 ? MleSign::Positive : MleSign::NonPositive;
  v.reliability_percent = 100.0 * v.kappa;
  if (v.mle_sign == MleSign::Positive && v.reliability_percent >= t.strong) {
    v.classification = Evidence::StrongEvidence;
  } else if (v.mle_sign == MleSign::Positive && v.reliability_percent >= t.weak) {
    v.classification = Evidence::WeakEvidence;
  }

  const auto whole_percent = static_cast<long>(std::floor(v.reliability_percent + 1e-9));
  std::string conclusion;
  if (v.mle_sign == MleSign::NonPositive) {
    conclusion = "no sensitive dependence on initial conditions detected";
  } else if (v.classification == Evidence::StrongEvidence) {
    conclusion = "strong evidence of sensitive dependence on initial conditions";
  } else if (v.classification == Evidence::WeakEvidence) {
    conclusion = "weak evidence of sensitive dependence on initial conditions";
  } else {
    conclusion = "reliability too low for strong evidence of sensitive dependence on initial conditions";
  }
  v.narrative = fmt::format("m={} tau={}: MLE {:.4f} ({}) at reliability ≈{}% (kappa {:.6f}); {}", v.m, v.tau,
                            v.mle, v.mle_sign == MleSign::Positive ? "positive" : "non-positive", whole_percent,
                            v.kappa, conclusion);
  return v;
}

Format parse_format(std::string_view name) {
  if (name == "text") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw InputError(fmt::format("unknown format '{}' (expected text, csv or json)", name));
}

namespace {

json cell_to_json(const SweepCell& c) {
  json j;
  j["m"] = c.m;
  j["tau"] = c.tau;
  j["kappa"] = c.kappa ? json(*c.kappa) : json(nullptr);
  j["mle"] = c.mle ? json(*c.mle) : json(nullptr);
  j["mle_units"] = c.mle_units;
  j["status"] = c.status;
  return j;
}

json verdict_to_json(const Verdict& v) {
  return json{{"m", v.m},
              {"tau", v.tau},
              {"kappa", v.kappa},
              {"mle", v.mle},
              {"mle_sign", to_string(v.mle_sign)},
              {"reliability_percent", v.reliability_percent},
              {"classification", to_string(v.classification)},
              {"narrative", v.narrative}};
}

std::string optional_text(const std::optional<double>& v, int decimals) {
  return v ? fmt::format("{:.{}f}", *v, decimals) : std::string("-");
}

std::string optional_csv(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_table(std::span<const SweepCell> cells, Format format) {
  if (cells.empty()) throw InputError("nothing to render: no cells");
  std::string out;
  switch (format) {
    case Format::Text:
      out += fmt::format("{:>3} {:>4} {:>9} {:>9}  {}\n", "m", "tau", "kappa", "MLE", "status");
      for (const auto& c : cells) {
        out += fmt::format("{:>3} {:>4} {:>9} {:>9}  {}\n", c.m, c.tau, optional_text(c.kappa, 6),
                           optional_text(c.mle, 4), c.status);
      }
      return out;
    case Format::Csv:
      out += "m,tau,kappa,mle,mle_units,status\n";
      for (const auto& c : cells) {
        out += fmt::format("{},{},{},{},{},{}\n", c.m, c.tau, optional_csv(c.kappa), optional_csv(c.mle),
                           csv_quote(c.mle_units), csv_quote(c.status));
      }
      return out;
    case Format::Json: {
      json arr = json::array();
      for (const auto& c : cells) arr.push_back(cell_to_json(c));
      return arr.dump(2) + "\n";
    }
  }
  throw InputError("unknown format");
}

std::string render_verdicts(std::span<const Verdict> verdicts, Format format) {
  if (verdicts.empty()) throw InputError("nothing to render: no verdicts");
  std::string out;
  switch (format) {
    case Format::Text:
      for (const auto& v : verdicts) out += v.narrative + "\n";
      return out;
    case Format::Csv:
      out += "m,tau,kappa,mle,mle_sign,reliability_percent,classification\n";
      for (const auto& v : verdicts) {
        out += fmt::format("{},{},{},{},{},{},{}\n", v.m, v.tau, v.kappa, v.mle, to_string(v.mle_sign),
                           v.reliability_percent, to_string(v.classification));
      }
      return out;
    case Format::Json: {
      json arr = json::array();
      for (const auto& v : verdicts) arr.push_back(verdict_to_json(v));
      return arr.dump(2) + "\n";
    }
  }
  throw InputError("unknown format");
}

std::vector<SweepCell> cells_from_json(std::string_view text) {
  std::vector<SweepCell> cells;
  try {
    const json arr = json::parse(text);
    if (!arr.is_array()) throw InputError("expected a JSON array of cells");
    for (const auto& j : arr) {
      SweepCell c;
      c.m = j.at("m").get<int>();
      c.tau = j.at("tau").get<int>();
      if (!j.at("kappa").is_null()) c.kappa = j.at("kappa").get<double>();
      if (!j.at("mle").is_null()) c.mle = j.at("mle").get<double>();
      c.mle_units = j.at("mle_units").get<std::string>();
      c.status = j.at("status").get<std::string>();
      cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed cell JSON: {}", e.what()));
  }
  return cells;
}

std::string render_report_json(const TimeSeries& s, const SweepConfig& config, std::span<const SweepCell> cells,
                               std::span<const Verdict> verdicts, const VerdictThresholds& thresholds) {
  json doc;
  doc["version"] = std::string(version());
  doc["series"] = {{"label", s.label()}, {"n", s.size()}, {"transforms", s.transform_history()}};

  json params;
  params["m"] = config.m_set;
  params["tau"] = {{"first", config.tau.first}, {"last", config.tau.last}};
  params["top_k"] = config.top_k;
  params["mle_all"] = config.mle_all;
  params["determinism"] = {
      {"grid", config.determinism.grid_subdivisions},
      {"min_passes", config.determinism.min_passes},
      {"pass_rule", config.determinism.pass_rule == PassRule::BoundaryCrossing ? "crossing" : "successor"}};
  params["wolf"] = {{"evolve", config.wolf.evolve_steps},
                    {"scale_min", config.wolf.scale_min},
                    {"scale_max", config.wolf.scale_max},
                    {"min_sep", config.min_sep_override ? json(*config.min_sep_override) : json("tau*m")},
                    {"log_base", to_string(config.wolf.log_base)},
                    {"distance", "euclidean"}};
  params["thresholds"] = {{"strong", thresholds.strong}, {"weak", thresholds.weak}};
  doc["params"] = std::move(params);

  json jc = json::array();
  for (const auto& c : cells) jc.push_back(cell_to_json(c));
  doc["cells"] = std::move(jc);
  json jv = json::array();
  for (const auto& v : verdicts) jv.push_back(verdict_to_json(v));
  doc["verdicts"] = std::move(jv);
  return doc.dump(2) + "\n";
}

}  // namespace chaoscope

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "chaoscope/corrdim.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/report.hpp"
#include "chaoscope/synth.hpp"
#include "chaoscope/time_series.hpp"

namespace chaoscope::cli {

namespace {

using nlohmann::json;

int to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw InputError(fmt::format("not an integer: '{}'", s));
  return v;
}

struct InputOptions {
  std::string path;
  std::string column;
  std::string delimiter = ",";
  bool no_header = false;
  bool returns = false;

  void attach(CLI::App& app) {
    app.add_option("csv", path, "input CSV file")->required();
    app.add_option("--column", column, "value column: header name or 0-based index (default: last)");
    app.add_option("--delimiter", delimiter, "field separator (one character)");
    app.add_flag("--no-header", no_header, "first row is data");
    app.add_flag("--returns", returns, "analyze log returns instead of levels");
  }

  TimeSeries load() const {
    if (delimiter.size() != 1) throw InputError("--delimiter must be a single character");
    CsvOptions o;
    o.delimiter = delimiter.front();
    o.skip_header = !no_header;
    if (!column.empty()) {
      if (std::all_of(column.begin(), column.end(), [](unsigned char c) { return std::isdigit(c); })) {
        o.value_column = static_cast<std::size_t>(to_int(column));
      } else {
        o.value_column = column;
      }
    }
    TimeSeries s = load_csv(path, o);
    return returns ? to_log_returns(s) : s;
  }
};

/// Writes to --out through a temporary file, so a failed run never leaves a
/// partial report behind.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  const std::filesystem::path target(out_path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError(fmt::format("cannot write '{}'", out_path));
    f << text;
    if (!f.flush()) throw InputError(fmt::format("cannot write '{}'", out_path));
  }
  std::filesystem::rename(tmp, target);
}

// --- analyze -------------------------------------------------------------

struct AnalyzeOptions {
  InputOptions input;
  std::string m = "2,3";
  std::string tau = "2..43";
  int top_k = 5;
  bool mle_all = false;
  int grid = 10;
  int min_passes = 2;
  std::string pass_rule = "crossing";
  int evolve = 3;
  double scale_min = 0.001;
  double scale_max = 0.1;
  std::optional<int> min_sep;
  std::string log_base = "e";
  double strong = 90.0;
  double weak = 70.0;
  std::string format = "text";
  std::string out;
  unsigned threads = 0;
};

TauRange parse_tau(const std::string& text) {
  const auto taus = parse_int_list(text);
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (taus[i] != taus[i - 1] + 1) throw InputError("--tau must be a single value or a contiguous range a..b");
  }
  return {taus.front(), taus.back()};
}

int run_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const Format format = parse_format(o.format);
  const TimeSeries s = o.input.load();

  SweepConfig config;
  config.m_set = parse_int_list(o.m);
  config.tau = parse_tau(o.tau);
  config.top_k = o.top_k;
  config.mle_all = o.mle_all;
  config.threads = o.threads;
  config.determinism.grid_subdivisions = o.grid;
  config.determinism.min_passes = o.min_passes;
  if (o.pass_rule == "crossing") {
    config.determinism.pass_rule = PassRule::BoundaryCrossing;
  } else if (o.pass_rule == "successor") {
    config.determinism.pass_rule = PassRule::SampleSuccessor;
  } else {
    throw InputError(fmt::format("unknown pass rule '{}' (expected crossing or successor)", o.pass_rule));
  }
  config.wolf.evolve_steps = o.evolve;
  config.wolf.scale_min = o.scale_min;
  config.wolf.scale_max = o.scale_max;
  config.min_sep_override = o.min_sep;
  if (o.log_base == "e") {
    config.wolf.log_base = LogBase::E;
  } else if (o.log_base == "2") {
    config.wolf.log_base = LogBase::Two;
  } else {
    throw InputError(fmt::format("unknown log base '{}' (expected e or 2)", o.log_base));
  }
  if (config.determinism.grid_subdivisions < 1) throw InputError("--grid must be >= 1");
  if (config.determinism.min_passes < 1) throw InputError("--min-passes must be >= 1");
  const VerdictThresholds thresholds{o.strong, o.weak};
  if (!(thresholds.weak > 0.0 && thresholds.weak < thresholds.strong && thresholds.strong <= 100.0)) {
    throw InputError("thresholds must satisfy 0 < weak < strong <= 100");
  }

  const auto cells = run_sweep(s, config);

  std::vector<Verdict> verdicts;
  std::vector<int> dims = config.m_set;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int m : dims) {
    for (const auto& c : top_k_by_kappa(cells, static_cast<std::size_t>(std::max(0, config.top_k)), m)) {
      if (c.mle) verdicts.push_back(make_verdict(c, thresholds));
    }
  }

  std::string text;
  switch (format) {
    case Format::Json:
      text = render_report_json(s, config, cells, verdicts, thresholds);
      break;
    case Format::Csv:
      text = render_table(cells, Format::Csv);
      break;
    case Format::Text: {
      std::string transforms;
      for (const auto& t : s.transform_history()) transforms += (transforms.empty() ? "" : " > ") + t;
      text += fmt::format("series {} (n={}, {})\n", s.label(), s.size(), transforms);
      text += fmt::format("MLE units: {}/sample\n\n", to_string(config.wolf.log_base));
      text += render_table(cells, Format::Text);
      for (int m : dims) {
        const auto top = top_k_by_kappa(cells, static_cast<std::size_t>(std::max(0, config.top_k)), m);
        if (top.empty()) continue;
        text += fmt::format("\ntop {} by kappa, m={}\n", top.size(), m);
        text += render_table(top, Format::Text);
      }
      if (!verdicts.empty()) text += "\n" + render_verdicts(verdicts, Format::Text);
      break;
    }
  }
  emit(text, o.out, out);

  const bool all_failed = std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.status != "ok"; });
  return all_failed ? kExitEstimator : kExitOk;
}

// --- corrdim -------------------------------------------------------------

struct CorrdimOptions {
  InputOptions input;
  std::string m_list = "1..5";
  int tau = 1;
  double eps_min = 1e-3;
  double eps_max = 1.0;
  std::size_t eps_count = 24;
  std::optional<std::size_t> theiler;
  double saturation_tol = 0.15;
  std::string format = "text";
  std::string out;
  unsigned threads = 0;
};

std::string log10_or_empty(double c) { return c > 0.0 ? fmt::format("{}", std::log10(c)) : std::string(); }

int run_corrdim(const CorrdimOptions& o, std::ostream& out) {
  const Format format = parse_format(o.format);
  const TimeSeries s = o.input.load();
  if (o.eps_count < 2) throw InputError("--eps-count must be >= 2");
  if (!(o.eps_min > 0.0 && o.eps_min < o.eps_max)) throw InputError("need 0 < --eps-min < --eps-max");

  D2Options d2;
  d2.threads = o.threads;
  d2.saturation_tol = o.saturation_tol;
  const auto grid = log_spaced_grid(o.eps_min, o.eps_max, o.eps_count);
  const auto profile = estimate_d2(min_max_normalize(s), parse_int_list(o.m_list), grid, o.tau, o.theiler, d2);

  std::string text;
  switch (format) {
    case Format::Csv: {
      text += "eps";
      for (const auto& [m, c] : profile.c_by_m) text += fmt::format(",log10C_m{}", m);
      text += "\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        text += fmt::format("{}", grid[k]);
        for (const auto& [m, c] : profile.c_by_m) text += "," + log10_or_empty(c[k]);
        text += "\n";
      }
      break;
    }
    case Format::Json: {
      json doc;
      doc["version"] = std::string(version());
      doc["series"] = {{"label", s.label()}, {"n", s.size()}, {"transforms", s.transform_history()}};
      doc["params"] = {{"tau", profile.tau},
                       {"theiler", profile.theiler_window},
                       {"points", profile.points},
                       {"admissible_pairs", profile.admissible_pairs},
                       {"norm", "max"}};
      doc["epsilons"] = profile.epsilons;
      json dims = json::array();
      for (const auto& [m, c] : profile.c_by_m) {
        const auto& fit = profile.d2_by_m.at(m);
        json d{{"m", m}, {"c", c}, {"pairs_below", profile.counts_by_m.at(m)}};
        d["d2"] = fit.found ? json{{"slope", fit.slope}, {"first", fit.first}, {"last", fit.last}} : json(nullptr);
        if (const auto it = profile.k2_by_m.find(m); it != profile.k2_by_m.end() && it->second.found) {
          d["k2"] = {{"value", it->second.value}, {"divergent", it->second.divergent}};
        } else {
          d["k2"] = nullptr;
        }
        dims.push_back(std::move(d));
      }
      doc["dimensions"] = std::move(dims);
      doc["saturation"] = std::string(to_string(profile.saturation));
      text = doc.dump(2) + "\n";
      break;
    }
    case Format::Text: {
      text += fmt::format("series {} (n={}), tau={}, theiler={}, {} delay vectors\n\n", s.label(), s.size(),
                          profile.tau, profile.theiler_window, profile.points);
      text += fmt::format("{:>10}", "eps");
      for (const auto& [m, c] : profile.c_by_m) text += fmt::format(" {:>9}", fmt::format("m={}", m));
      text += "\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        text += fmt::format("{:>10.4g}", grid[k]);
        for (const auto& [m, c] : profile.c_by_m) {
          text += c[k] > 0.0 ? fmt::format(" {:>9.4f}", std::log10(c[k])) : fmt::format(" {:>9}", "-");
        }
        text += "\n";
      }
      text += "\n";
      for (const auto& [m, fit] : profile.d2_by_m) {
        if (fit.found) {
          text += fmt::format("m={:<3} D2 {:.4f}  (eps {:.4g}..{:.4g})", m, fit.slope, grid[fit.first],
                              grid[fit.last]);
        } else {
          text += fmt::format("m={:<3} D2 -  (no scaling region)", m);
        }
        if (const auto it = profile.k2_by_m.find(m); it != profile.k2_by_m.end() && it->second.found) {
          text += fmt::format("  K2 {:.4f} nats/sample{}", it->second.value, it->second.divergent ? " (divergent)" : "");
        }
        text += "\n";
      }
      text += fmt::format("saturation: {}\n", to_string(profile.saturation));
      break;
    }
  }
  emit(text, o.out, out);
  return kExitOk;
}

// --- synth ---------------------------------------------------------------

struct SynthOptions {
  std::string kind;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::optional<std::size_t> transient;
  LogisticParams logistic;
  LorenzParams lorenz;
  NoiseParams noise;
  std::string input;
  std::string out;
};

int run_synth(const SynthOptions& o, std::ostream& out) {
  GeneratorSpec spec;
  spec.n = o.n;
  spec.seed = o.seed;
  spec.transient = o.transient.value_or(0);
  std::optional<TimeSeries> source;
  if (o.kind == "logistic") {
    spec.kind = GeneratorKind::Logistic;
    spec.params = o.logistic;
  } else if (o.kind == "lorenz") {
    spec.kind = GeneratorKind::Lorenz;
    spec.params = o.lorenz;
    spec.transient = o.transient.value_or(1000);
  } else if (o.kind == "noise") {
    spec.kind = GeneratorKind::GaussianNoise;
    spec.params = o.noise;
  } else if (o.kind == "walk") {
    spec.kind = GeneratorKind::RandomWalk;
    spec.params = o.noise;
  } else if (o.kind == "ar1") {
    spec.kind = GeneratorKind::AR1;
    spec.params = o.noise;
  } else if (o.kind == "shuffle") {
    if (o.input.empty()) throw InputError("shuffle needs --input");
    spec.kind = GeneratorKind::ShuffleSurrogate;
    source = load_csv(o.input);
  } else {
    throw InputError(fmt::format("unknown generator '{}'", o.kind));
  }
  const TimeSeries s = generate(spec, source ? &*source : nullptr);

  std::string text = "t,x\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    text += fmt::format("{},{}\n", static_cast<double>(i) * s.sample_interval(), s[i]);
  }
  emit(text, o.out, out);
  return kExitOk;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const int a = to_int(item.substr(0, dots));
      const int b = to_int(item.substr(dots + 2));
      if (b < a) throw InputError(fmt::format("empty range '{}'", item));
      for (int v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(to_int(item));
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaoscope: determinism, Lyapunov and correlation-dimension diagnostics for time series",
               "chaoscope"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  AnalyzeOptions a;
  auto* analyze = app.add_subcommand("analyze", "kappa sweep over (m, tau), MLE on the top cells, verdicts");
  a.input.attach(*analyze);
  analyze->add_option("--m", a.m, "embedding dimensions, e.g. 2,3");
  analyze->add_option("--tau", a.tau, "delay range, e.g. 2..43");
  analyze->add_option("--top-k", a.top_k, "cells per m that get an MLE (0: kappa only)");
  analyze->add_flag("--mle-all", a.mle_all, "compute the MLE for every cell");
  analyze->add_option("--grid", a.grid, "boxes per axis for kappa");
  analyze->add_option("--min-passes", a.min_passes, "passes a box needs to count");
  analyze->add_option("--pass-rule", a.pass_rule, "crossing or successor");
  analyze->add_option("--evolve", a.evolve, "samples between renormalizations");
  analyze->add_option("--scale-min", a.scale_min, "smallest neighbour distance");
  analyze->add_option("--scale-max", a.scale_max, "separation that triggers a replacement");
  analyze->add_option("--min-sep", a.min_sep, "minimum index gap to a neighbour (default tau*m)");
  analyze->add_option("--log-base", a.log_base, "e or 2");
  analyze->add_option("--strong", a.strong, "reliability percent for strong evidence");
  analyze->add_option("--weak", a.weak, "reliability percent for weak evidence");
  analyze->add_option("--format", a.format, "text, csv or json");
  analyze->add_option("--out", a.out, "write the report here instead of stdout");
  analyze->add_option("--threads", a.threads, "worker threads (0: all cores)");

  CorrdimOptions c;
  auto* corrdim = app.add_subcommand("corrdim", "correlation integrals, D2, K2 and saturation");
  c.input.attach(*corrdim);
  corrdim->add_option("--m-list", c.m_list, "embedding dimensions, e.g. 1..5");
  corrdim->add_option("--tau", c.tau, "delay");
  corrdim->add_option("--eps-min", c.eps_min, "smallest radius (normalized units)");
  corrdim->add_option("--eps-max", c.eps_max, "largest radius");
  corrdim->add_option("--eps-count", c.eps_count, "log-spaced radii");
  corrdim->add_option("--theiler", c.theiler, "Theiler window (default tau*max m)");
  corrdim->add_option("--saturation-tol", c.saturation_tol, "D2 increment counted as saturated");
  corrdim->add_option("--format", c.format, "text, csv or json");
  corrdim->add_option("--out", c.out, "write the report here instead of stdout");
  corrdim->add_option("--threads", c.threads, "worker threads (0: all cores)");

  SynthOptions y;
  auto* synth = app.add_subcommand("synth", "write a synthetic series as CSV");
  synth->add_option("kind", y.kind, "logistic, lorenz, noise, walk, ar1 or shuffle")->required();
  synth->add_option("--n", y.n, "samples");
  synth->add_option("--seed", y.seed, "seed for the stochastic kinds");
  synth->add_option("--transient", y.transient, "samples discarded first (lorenz default 1000)");
  synth->add_option("--r", y.logistic.r, "logistic parameter");
  synth->add_option("--x0", y.logistic.x0, "logistic initial value");
  synth->add_option("--sigma", y.lorenz.sigma, "Lorenz sigma");
  synth->add_option("--rho", y.lorenz.rho, "Lorenz rho");
  synth->add_option("--beta", y.lorenz.beta, "Lorenz beta");
  synth->add_option("--dt", y.lorenz.dt, "RK4 step");
  synth->add_option("--sample-every", y.lorenz.sample_every, "RK4 steps per output sample");
  synth->add_option("--initial", y.lorenz.initial, "Lorenz initial state x y z")->expected(3);
  synth->add_option("--mean", y.noise.mean, "innovation mean");
  synth->add_option("--sd", y.noise.sd, "innovation standard deviation");
  synth->add_option("--phi", y.noise.phi, "AR(1) coefficient");
  synth->add_option("--input", y.input, "series to shuffle (shuffle only)");
  synth->add_option("--out", y.out, "output CSV (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      // --help and --version
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() + std::string("\n") : app.help());
      return kExitOk;
    }
    err << "chaoscope: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*analyze) return run_analyze(a, out);
    if (*corrdim) return run_corrdim(c, out);
    return run_synth(y, out);
  } catch (const InputError& e) {
    err << "chaoscope: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EstimationError& e) {
    err << "chaoscope: estimator failure: " << e.what() << "\n";
    return kExitEstimator;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "chaoscope: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace chaoscope::cli

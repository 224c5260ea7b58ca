#include <algorithm>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "chaoscope/error.hpp"
#include "chaoscope/report.hpp"
#include "chaoscope/synth.hpp"
#include "energy_futures.hpp"

using namespace chaoscope;

namespace {

template <std::size_t N>
std::vector<SweepCell> sweep_cells(const std::array<fixtures::KappaRow, N>& rows, int m) {
  std::vector<SweepCell> cells;
  for (const auto& r : rows) {
    SweepCell c;
    c.m = m;
    c.tau = r.tau;
    c.kappa = r.kappa;
    cells.push_back(c);
  }
  return cells;
}

void expect_rows(const std::vector<SweepCell>& got, const std::array<fixtures::TopRow, 5>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].m, want[i].m) << i;
    EXPECT_EQ(got[i].tau, want[i].tau) << i;
    EXPECT_EQ(*got[i].kappa, want[i].kappa) << i;
  }
}

SweepCell cell(int m, int tau, double kappa, std::optional<double> mle = std::nullopt) {
  SweepCell c;
  c.m = m;
  c.tau = tau;
  c.kappa = kappa;
  c.mle = mle;
  c.mle_units = "ln/sample";
  return c;
}

}  // namespace

TEST(TopK, ReproducesPublishedTables) {
  expect_rows(top_k_by_kappa(sweep_cells(fixtures::kHeatingOilM2, 2), 5, 2), fixtures::kHeatingOilTopM2);
  expect_rows(top_k_by_kappa(sweep_cells(fixtures::kHeatingOilM3, 3), 5, 3), fixtures::kHeatingOilTopM3);
  expect_rows(top_k_by_kappa(sweep_cells(fixtures::kNaturalGasM2, 2), 5, 2), fixtures::kNaturalGasTopM2);
  expect_rows(top_k_by_kappa(sweep_cells(fixtures::kNaturalGasM3, 3), 5, 3), fixtures::kNaturalGasTopM3);
}

TEST(TopK, PermutationInvariantAndTies) {
  auto cells = sweep_cells(fixtures::kNaturalGasM3, 3);
  const auto expected = top_k_by_kappa(cells, 5, 3);
  std::mt19937_64 gen(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(cells.begin(), cells.end(), gen);
    EXPECT_EQ(top_k_by_kappa(cells, 5, 3), expected);
  }
  const std::vector<SweepCell> tied{cell(2, 9, 0.5), cell(2, 4, 0.5), cell(2, 7, 0.6), cell(3, 1, 0.9)};
  const auto top = top_k_by_kappa(tied, 5, 2);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].tau, 7);
  EXPECT_EQ(top[1].tau, 4);
  EXPECT_EQ(top[2].tau, 9);
  EXPECT_EQ(top_k_by_kappa(std::vector<SweepCell>{cell(2, 3, 0.1)}, 5, 2).size(), 1u);
}

TEST(Verdict, PublishedCells) {
  const auto gas = make_verdict(cell(2, 16, 0.493609, 12.5925));
  EXPECT_EQ(gas.mle_sign, MleSign::Positive);
  EXPECT_DOUBLE_EQ(gas.reliability_percent, 49.3609);
  EXPECT_EQ(gas.classification, Evidence::NoEvidence);
  EXPECT_NE(gas.narrative.find("≈49%"), std::string::npos) << gas.narrative;
  EXPECT_NE(gas.narrative.find("too low"), std::string::npos) << gas.narrative;

  const auto best = make_verdict(cell(3, 2, 0.565059, 12.1163));
  EXPECT_NEAR(best.reliability_percent, 56.5059, 1e-9);
  EXPECT_EQ(best.classification, Evidence::NoEvidence);
  EXPECT_NE(best.narrative.find("≈56%"), std::string::npos) << best.narrative;

  const auto sure = make_verdict(cell(2, 1, 1.0, 0.693));
  EXPECT_EQ(sure.classification, Evidence::StrongEvidence);
  EXPECT_DOUBLE_EQ(sure.reliability_percent, 100.0);
}

TEST(Verdict, MonotoneAndSignGuarded) {
  Evidence previous = Evidence::NoEvidence;
  auto rank = [](Evidence e) { return e == Evidence::StrongEvidence ? 2 : e == Evidence::WeakEvidence ? 1 : 0; };
  for (int i = 0; i <= 100; ++i) {
    const double k = i / 100.0;
    const auto v = make_verdict(cell(2, 1, k, 0.5));
    EXPECT_GE(rank(v.classification), rank(previous)) << k;
    previous = v.classification;
    const auto neg = make_verdict(cell(2, 1, k, -0.5));
    EXPECT_EQ(neg.classification, Evidence::NoEvidence);
    EXPECT_EQ(neg.mle_sign, MleSign::NonPositive);
    EXPECT_EQ(neg.narrative.find("strong evidence"), std::string::npos);
  }
  EXPECT_EQ(make_verdict(cell(2, 1, 0.75, 0.1)).classification, Evidence::WeakEvidence);
  EXPECT_EQ(make_verdict(cell(2, 1, 0.9, 0.0)).mle_sign, MleSign::NonPositive);
}

TEST(Verdict, Errors) {
  EXPECT_THROW(make_verdict(cell(2, 1, 0.5)), InputError);
  EXPECT_THROW(make_verdict(cell(2, 1, 0.5, 1.0), {70.0, 90.0}), InputError);
  EXPECT_THROW(make_verdict(cell(2, 1, 0.5, 1.0), {101.0, 70.0}), InputError);
  EXPECT_THROW(make_verdict(cell(2, 1, 0.5, 1.0), {90.0, 0.0}), InputError);
}

TEST(RenderTable, TextMatchesPublishedDigits) {
  std::vector<SweepCell> rows;
  for (const auto& r : fixtures::kHeatingOilTopM2) rows.push_back(cell(r.m, r.tau, r.kappa, r.mle));
  const auto text = render_table(rows, Format::Text);
  for (const char* digits : {"0.501905", "2.7159", "0.444272", "1.7691", "0.441020", "2.5150", "0.433819",
                             "2.0525", "0.431399", "2.4318"}) {
    EXPECT_NE(text.find(digits), std::string::npos) << digits;
  }
  EXPECT_EQ(text, render_table(rows, Format::Text));
  // Rows are column-aligned.
  std::vector<std::size_t> widths;
  std::size_t start = 0;
  for (std::size_t nl = text.find('\n'); nl != std::string::npos; nl = text.find('\n', start)) {
    widths.push_back(nl - start);
    start = nl + 1;
  }
  EXPECT_EQ(std::count(widths.begin(), widths.end(), widths[1]), static_cast<long>(widths.size() - 1));
}

TEST(RenderTable, FormatsAndRoundTrip) {
  std::vector<SweepCell> rows{cell(2, 2, 0.1 + 0.2, 1.0 / 3.0), cell(3, 5, 0.5)};
  rows[1].status = "mle: no admissible \"neighbour\", sorry";
  EXPECT_EQ(cells_from_json(render_table(rows, Format::Json)), rows);
  const auto csv = render_table(rows, Format::Csv);
  EXPECT_NE(csv.find("0.30000000000000004"), std::string::npos);
  EXPECT_NE(csv.find("\"mle: no admissible \"\"neighbour\"\", sorry\""), std::string::npos);
  EXPECT_THROW(render_table(std::vector<SweepCell>{}, Format::Text), InputError);
  EXPECT_THROW(parse_format("xml"), InputError);
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  EXPECT_THROW(cells_from_json("{\"m\": 1}"), InputError);
  EXPECT_THROW(render_verdicts(std::vector<Verdict>{}, Format::Text), InputError);
}

TEST(Sweep, FullGridComputesTopFiveMle) {
  SweepConfig config;
  config.threads = 2;
  const auto cells = run_sweep(gen_noise(GeneratorKind::AR1, {}, 1500, 5), config);
  ASSERT_EQ(cells.size(), 84u);
  std::size_t with_mle = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_TRUE(cells[i].kappa.has_value());
    with_mle += cells[i].mle ? 1 : 0;
    EXPECT_EQ(cells[i].m, i < 42 ? 2 : 3);
    EXPECT_EQ(cells[i].tau, 2 + static_cast<int>(i % 42));
  }
  EXPECT_LE(with_mle, 10u);
  EXPECT_EQ(with_mle, 10u);
  for (int m : {2, 3}) {
    for (const auto& c : top_k_by_kappa(cells, 5, m)) EXPECT_TRUE(c.mle.has_value());
  }
}

TEST(Sweep, KappaOnlyAndThreadIndependence) {
  SweepConfig config;
  config.tau = {2, 6};
  config.top_k = 0;
  const auto s = gen_noise(GeneratorKind::RandomWalk, {}, 1200, 8);
  for (const auto& c : run_sweep(s, config)) EXPECT_FALSE(c.mle.has_value());

  config.top_k = 2;
  config.threads = 1;
  const auto serial = run_sweep(s, config);
  config.threads = 4;
  EXPECT_EQ(run_sweep(s, config), serial);
}

TEST(Sweep, LogisticIsCoherentAndExpanding) {
  SweepConfig config;
  config.m_set = {2};
  config.tau = {2, 5};
  const auto s = gen_logistic({4.0, 0.2}, 5000);
  const auto cells = run_sweep(s, config);
  ASSERT_EQ(cells.size(), 4u);
  for (const auto& c : cells) {
    EXPECT_GT(*c.kappa, 0.8) << c.tau;
    if (c.mle) {
      EXPECT_GT(*c.mle, 0.0) << c.tau;
    }
  }
  // Holds under the sample-successor rule; see README on pass rules.
  config.determinism.pass_rule = PassRule::SampleSuccessor;
  for (const auto& c : run_sweep(s, config)) EXPECT_GT(*c.kappa, 0.8) << c.tau;
}

TEST(Sweep, ErrorsAndPerCellFailures) {
  SweepConfig config;
  config.tau = {2, 43};
  EXPECT_THROW(run_sweep(TimeSeries({1, 2, 3, 4, 5}), config), InputError);
  config.tau = {3, 2};
  EXPECT_THROW(run_sweep(gen_logistic({4.0, 0.2}, 100), config), InputError);

  // No box can collect 1000 passes from 50 points: kappa fails in every cell
  // but the sweep still returns them.
  config.tau = {1, 2};
  config.m_set = {3};
  config.determinism.min_passes = 1000;
  const auto cells = run_sweep(gen_logistic({4.0, 0.2}, 50), config);
  for (const auto& c : cells) {
    EXPECT_FALSE(c.kappa.has_value());
    EXPECT_NE(c.status, "ok");
  }
}

TEST(ReportJson, Schema) {
  SweepConfig config;
  config.tau = {2, 3};
  const auto s = gen_logistic({4.0, 0.2}, 600).relabeled("logistic");
  const auto cells = run_sweep(s, config);
  std::vector<Verdict> verdicts;
  for (const auto& c : cells) {
    if (c.mle) verdicts.push_back(make_verdict(c));
  }
  const auto doc = nlohmann::json::parse(render_report_json(s, config, cells, verdicts, {}));
  EXPECT_EQ(doc.at("series").at("label"), "logistic");
  EXPECT_EQ(doc.at("series").at("n"), 600);
  EXPECT_EQ(doc.at("series").at("transforms"), nlohmann::json(s.transform_history()));
  EXPECT_TRUE(doc.at("params").is_object());
  EXPECT_EQ(doc.at("cells").size(), 4u);
  EXPECT_EQ(doc.at("verdicts").size(), verdicts.size());
  EXPECT_EQ(doc.at("version"), std::string(version()));
}

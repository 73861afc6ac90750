#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "comoto/errors.hpp"
#include "comoto/report.hpp"

namespace comoto {
namespace {

namespace fs = std::filesystem;

ResultRow row(ScenarioFamily f, std::uint64_t seed, Method m, double dst, double vis, double leg,
              double nom) {
  ResultRow r;
  r.family = f;
  r.seed = seed;
  r.method = m;
  r.metrics = {dst, vis, leg, nom, true};
  r.iterations = 7;
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("comoto_report_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(100.0), "100");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / (1.0 + i);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(ParseFormat, KnownNames) {
  EXPECT_EQ(parse_format("csv"), ReportFormat::kCsv);
  EXPECT_EQ(parse_format("json"), ReportFormat::kJson);
  EXPECT_EQ(parse_format("markdown"), ReportFormat::kMarkdown);
  EXPECT_EQ(parse_format("all"), ReportFormat::kAll);
  EXPECT_THROW(parse_format("xml"), UsageError);
}

TEST(ResultsCsv, HeaderAndRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<ResultRow> rows;
  for (ScenarioFamily f : kAllFamilies) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      for (Method m : kAllMethods) {
        ResultRow r = row(f, seed, m, u(rng), u(rng), u(rng) - 50.0, u(rng) / 7.0);
        r.metrics.completed = seed != 2;
        r.converged = seed != 3;
        r.message = seed == 3 ? "line search failed, \"stalled\"" : "";
        rows.push_back(r);
      }
    }
  }
  const std::string text = results_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "scenario_family,seed,method,dst_pct,vis_pct,legibility,nom_dev,completed,converged,"
            "iterations,failed,message");
  const std::vector<ResultRow> back = parse_results_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_TRUE(back[i] == rows[i]) << i;
  EXPECT_EQ(results_csv(back), text);
}

TEST(ResultsCsv, WallTimeOnlyInTimings) {
  ResultRow r = row(ScenarioFamily::kStationary, 1, Method::kCoMOTO, 90, 80, 50, 1);
  r.wall_time = 1.25;
  ResultRow same = r;
  same.wall_time = 9.0;
  EXPECT_EQ(results_csv({r}), results_csv({same}));
  const std::string timings = timings_csv({r});
  EXPECT_EQ(timings, "scenario_family,seed,method,wall_time\nstationary,1,CoMOTO,1.25\n");
}

TEST(ResultsCsv, MalformedInputThrows) {
  EXPECT_ANY_THROW(parse_results_csv("scenario_family,seed\nstationary,1\n"));
}

TEST(Summary, MeanAndSdPerCell) {
  std::vector<ResultRow> rows{row(ScenarioFamily::kStationary, 1, Method::kCoMOTO, 80, 100, 10, 1),
                              row(ScenarioFamily::kStationary, 2, Method::kCoMOTO, 90, 100, 20, 3)};
  const SummaryTable t = summarize(rows);
  const SummaryCell& c = t.at(ScenarioFamily::kStationary, Method::kCoMOTO);
  EXPECT_EQ(c.aggregate.count, 2u);
  EXPECT_DOUBLE_EQ(c.aggregate.dst_pct.mean, 85.0);
  EXPECT_NEAR(c.aggregate.dst_pct.sd, 7.0710678118654755, 1e-12);
  EXPECT_DOUBLE_EQ(c.aggregate.nom_dev.mean, 2.0);
}

TEST(Summary, FailedRowsCountedNotAveraged) {
  ResultRow bad = row(ScenarioFamily::kReachingFar, 2, Method::kLegible, 0, 0, 0, 0);
  bad.failed = true;
  bad.message = "optimizer diverged";
  const SummaryTable t = summarize({row(ScenarioFamily::kReachingFar, 1, Method::kLegible, 60, 70, 5, 1), bad});
  const SummaryCell& c = t.at(ScenarioFamily::kReachingFar, Method::kLegible);
  EXPECT_EQ(c.failed, 1u);
  EXPECT_EQ(c.aggregate.count, 1u);
  EXPECT_DOUBLE_EQ(c.aggregate.dst_pct.mean, 60.0);
  EXPECT_NE(results_markdown({bad}).find("(1 failed)"), std::string::npos);
}

TEST(Summary, BestMarkingOnToyTable) {
  const auto f = ScenarioFamily::kStationary;
  const std::vector<ResultRow> rows{row(f, 1, Method::kCoMOTO, 90, 50, 40, 0.5),
                                    row(f, 1, Method::kLegible, 70, 60, 40, 0.2),
                                    row(f, 1, Method::kNominal, 95, 10, 10, 0.0)};
  const SummaryTable t = summarize(rows);
  EXPECT_TRUE(is_best(t, f, Method::kNominal, MetricColumn::kDst));
  EXPECT_FALSE(is_best(t, f, Method::kCoMOTO, MetricColumn::kDst));
  EXPECT_TRUE(is_best(t, f, Method::kLegible, MetricColumn::kVis));
  // Ties are all marked.
  EXPECT_TRUE(is_best(t, f, Method::kCoMOTO, MetricColumn::kLeg));
  EXPECT_TRUE(is_best(t, f, Method::kLegible, MetricColumn::kLeg));
  // Lower deviation wins and the nominal itself is excluded.
  EXPECT_TRUE(is_best(t, f, Method::kLegible, MetricColumn::kNom));
  EXPECT_FALSE(is_best(t, f, Method::kNominal, MetricColumn::kNom));
  EXPECT_FALSE(is_best(t, f, Method::kCoMOTO, MetricColumn::kNom));
}

TEST(Markdown, BoldsBestAndHidesNominalDeviation) {
  const auto f = ScenarioFamily::kReachingNear;
  const std::string md = results_markdown({row(f, 1, Method::kCoMOTO, 90, 50, 40, 0.5),
                                           row(f, 1, Method::kNominal, 80, 60, 10, 0.0)});
  EXPECT_NE(md.find("| reaching_near | CoMOTO | **90.0 ± 0.0** | 50.0 ± 0.0 | **40.0 ± 0.0** | **0.50 ± 0.00** | 1/1 |"),
            std::string::npos)
      << md;
  EXPECT_NE(md.find("| reaching_near | Nominal | 80.0 ± 0.0 | **60.0 ± 0.0** | 10.0 ± 0.0 | n/a | 1/1 |"),
            std::string::npos)
      << md;
}

TEST(Markdown, CountsIncompleteRuns) {
  ResultRow stuck = row(ScenarioFamily::kReachingNear, 2, Method::kSpeedAdj, 30, 100, 0, 0.1);
  stuck.metrics.completed = false;
  const std::string md =
      results_markdown({row(ScenarioFamily::kReachingNear, 1, Method::kSpeedAdj, 30, 100, 0, 0.1), stuck});
  EXPECT_NE(md.find("| 1/2 |"), std::string::npos) << md;
}

TEST(Json, ParsesWithRowsAndSummary) {
  const auto doc = nlohmann::json::parse(
      results_json({row(ScenarioFamily::kStationary, 4, Method::kDistVis, 100, 90, 12.5, 3.0)}));
  ASSERT_EQ(doc["rows"].size(), 1u);
  EXPECT_EQ(doc["rows"][0]["method"], "Dist+Vis");
  EXPECT_EQ(doc["rows"][0]["seed"], 4);
  EXPECT_DOUBLE_EQ(doc["rows"][0]["legibility"].get<double>(), 12.5);
  ASSERT_EQ(doc["summary"].size(), 1u);
  EXPECT_EQ(doc["summary"][0]["scenario_family"], "stationary");
}

TEST(EmitReport, EmptyRowsAreAUsageError) {
  EXPECT_THROW(emit_report({}, ReportFormat::kAll, scratch_dir("empty")), UsageError);
}

TEST(EmitReport, WritesRequestedFiles) {
  const fs::path dir = scratch_dir("files");
  const std::vector<ResultRow> rows{row(ScenarioFamily::kStationary, 1, Method::kCoMOTO, 1, 2, 3, 4)};
  const auto all = emit_report(rows, ReportFormat::kAll, dir);
  EXPECT_EQ(all.size(), 4u);
  for (const auto& p : all) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_EQ(read_text_file(dir / "results.csv"), results_csv(rows));
  const auto csv_only = emit_report(rows, ReportFormat::kCsv, scratch_dir("csv"));
  EXPECT_EQ(csv_only.size(), 2u);
  fs::remove_all(dir);
}

TEST(EmitReport, UnwritablePathNamesThePath) {
  const fs::path dir = scratch_dir("blocked");
  fs::create_directories(dir);
  const fs::path blocker = dir / "not_a_dir";
  write_text_file(blocker, "x");
  const fs::path target = blocker / "out";
  try {
    emit_report({row(ScenarioFamily::kStationary, 1, Method::kCoMOTO, 1, 2, 3, 4)}, ReportFormat::kCsv, target);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_text_file(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace comoto

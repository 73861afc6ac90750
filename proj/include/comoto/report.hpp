#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "comoto/benchmark.hpp"
#include "comoto/metrics.hpp"

namespace comoto {

enum class ReportFormat { kCsv, kJson, kMarkdown, kAll };

ReportFormat parse_format(std::string_view name);

enum class MetricColumn { kDst, kVis, kLeg, kNom };

/// Mean and SD per (family, method) over the rows that did not fail.
struct SummaryCell {
  MetricAggregate aggregate;
  std::size_t failed = 0;
  std::size_t incomplete = 0;
};

struct SummaryTable {
  std::vector<ScenarioFamily> families;
  std::vector<Method> methods;
  std::map<std::pair<ScenarioFamily, Method>, SummaryCell> cells;

  bool has(ScenarioFamily f, Method m) const { return cells.count({f, m}) > 0; }
  const SummaryCell& at(ScenarioFamily f, Method m) const { return cells.at({f, m}); }
};

SummaryTable summarize(const std::vector<ResultRow>& rows);

double column_mean(const SummaryCell& cell, MetricColumn column);

/// True when `m` holds the best mean of `column` within family `f`. Higher is better
/// except for nominal deviation, where lower wins and the Nominal method itself is
/// not a candidate. Ties are all marked.
bool is_best(const SummaryTable& table, ScenarioFamily f, Method m, MetricColumn column);

/// Deterministic per-run table. Columns:
/// scenario_family,seed,method,dst_pct,vis_pct,legibility,nom_dev,completed,converged,iterations,failed,message
/// Floating values use the shortest representation that round-trips.
std::string results_csv(const std::vector<ResultRow>& rows);
/// scenario_family,seed,method,wall_time
std::string timings_csv(const std::vector<ResultRow>& rows);
/// Inverse of results_csv (wall_time is left at 0).
std::vector<ResultRow> parse_results_csv(std::string_view text);

std::string results_json(const std::vector<ResultRow>& rows);
std::string results_markdown(const std::vector<ResultRow>& rows);

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_double(double v);

/// Writes the requested files into `out_dir` (created when missing) and returns
/// their paths. Empty rows raise UsageError; write failures raise IoError.
std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir);

/// Writes `text` to `path`, raising IoError naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace comoto

#include "comoto/report.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

const char* kResultsHeader =
    "scenario_family,seed,method,dst_pct,vis_pct,legibility,nom_dev,completed,converged,"
    "iterations,failed,message";

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError("malformed number '" + s + "' in results CSV");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw UsageError("malformed boolean '" + s + "' in results CSV");
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError("malformed integer '" + s + "' in results CSV");
  }
  return v;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json mean_sd_json(const MeanSd& m) { return {{"mean", number(m.mean)}, {"sd", number(m.sd)}}; }

}  // namespace

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "all") return ReportFormat::kAll;
  throw UsageError("unknown format '" + std::string(name) + "' (expected csv, json, markdown or all)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SummaryTable summarize(const std::vector<ResultRow>& rows) {
  SummaryTable table;
  std::map<std::pair<ScenarioFamily, Method>, std::vector<MetricReport>> ok;
  for (const ResultRow& r : rows) {
    if (std::find(table.families.begin(), table.families.end(), r.family) == table.families.end()) {
      table.families.push_back(r.family);
    }
    if (std::find(table.methods.begin(), table.methods.end(), r.method) == table.methods.end()) {
      table.methods.push_back(r.method);
    }
    SummaryCell& cell = table.cells[{r.family, r.method}];
    if (r.failed) {
      ++cell.failed;
      continue;
    }
    if (!r.metrics.completed) ++cell.incomplete;
    ok[{r.family, r.method}].push_back(r.metrics);
  }
  std::sort(table.families.begin(), table.families.end());
  std::sort(table.methods.begin(), table.methods.end());
  for (auto& [key, cell] : table.cells) {
    const auto it = ok.find(key);
    if (it != ok.end()) {
      cell.aggregate = aggregate(it->second);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.aggregate = {{nan, nan}, {nan, nan}, {nan, nan}, {nan, nan}, 0};
    }
  }
  return table;
}

double column_mean(const SummaryCell& cell, MetricColumn column) {
  switch (column) {
    case MetricColumn::kDst: return cell.aggregate.dst_pct.mean;
    case MetricColumn::kVis: return cell.aggregate.vis_pct.mean;
    case MetricColumn::kLeg: return cell.aggregate.legibility.mean;
    case MetricColumn::kNom: return cell.aggregate.nom_dev.mean;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool is_best(const SummaryTable& table, ScenarioFamily f, Method m, MetricColumn column) {
  const bool lower = column == MetricColumn::kNom;
  if (lower && m == Method::kNominal) return false;
  if (!table.has(f, m)) return false;
  const double mine = column_mean(table.at(f, m), column);
  if (std::isnan(mine)) return false;
  for (Method other : table.methods) {
    if (other == m || !table.has(f, other)) continue;
    if (lower && other == Method::kNominal) continue;
    const double v = column_mean(table.at(f, other), column);
    if (std::isnan(v)) continue;
    if (lower ? v < mine : v > mine) return false;
  }
  return true;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << family_name(r.family) << ',' << r.seed << ',' << method_name(r.method) << ','
        << format_double(r.metrics.dst_pct) << ',' << format_double(r.metrics.vis_pct) << ','
        << format_double(r.metrics.legibility) << ',' << format_double(r.metrics.nom_dev) << ','
        << bool_text(r.metrics.completed) << ',' << bool_text(r.converged) << ',' << r.iterations
        << ',' << bool_text(r.failed) << ',' << csv_escape(r.message) << '\n';
  }
  return out.str();
}

std::string timings_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "scenario_family,seed,method,wall_time\n";
  for (const ResultRow& r : rows) {
    out << family_name(r.family) << ',' << r.seed << ',' << method_name(r.method) << ','
        << format_double(r.wall_time) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != kResultsHeader) throw UsageError("results CSV has an unexpected header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw UsageError("results CSV row has " + std::to_string(f.size()) + " fields, expected 12");
    ResultRow r;
    r.family = parse_family(f[0]);
    r.seed = parse_int<std::uint64_t>(f[1]);
    r.method = parse_method(f[2]);
    r.metrics.dst_pct = parse_double(f[3]);
    r.metrics.vis_pct = parse_double(f[4]);
    r.metrics.legibility = parse_double(f[5]);
    r.metrics.nom_dev = parse_double(f[6]);
    r.metrics.completed = parse_bool(f[7]);
    r.converged = parse_bool(f[8]);
    r.iterations = parse_int<int>(f[9]);
    r.failed = parse_bool(f[10]);
    r.message = f[11];
    rows.push_back(std::move(r));
  }
  if (header) throw UsageError("results CSV is empty");
  return rows;
}

std::string results_json(const std::vector<ResultRow>& rows) {
  nlohmann::json doc;
  doc["rows"] = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    doc["rows"].push_back({{"scenario_family", family_name(r.family)},
                           {"seed", r.seed},
                           {"method", method_name(r.method)},
                           {"dst_pct", number(r.metrics.dst_pct)},
                           {"vis_pct", number(r.metrics.vis_pct)},
                           {"legibility", number(r.metrics.legibility)},
                           {"nom_dev", number(r.metrics.nom_dev)},
                           {"completed", r.metrics.completed},
                           {"converged", r.converged},
                           {"iterations", r.iterations},
                           {"failed", r.failed},
                           {"message", r.message}});
  }
  const SummaryTable table = summarize(rows);
  doc["summary"] = nlohmann::json::array();
  for (ScenarioFamily f : table.families) {
    for (Method m : table.methods) {
      if (!table.has(f, m)) continue;
      const SummaryCell& c = table.at(f, m);
      doc["summary"].push_back({{"scenario_family", family_name(f)},
                                {"method", method_name(m)},
                                {"count", c.aggregate.count},
                                {"failed", c.failed},
                                {"incomplete", c.incomplete},
                                {"dst_pct", mean_sd_json(c.aggregate.dst_pct)},
                                {"vis_pct", mean_sd_json(c.aggregate.vis_pct)},
                                {"legibility", mean_sd_json(c.aggregate.legibility)},
                                {"nom_dev", mean_sd_json(c.aggregate.nom_dev)}});
    }
  }
  return doc.dump(2) + "\n";
}

std::string results_markdown(const std::vector<ResultRow>& rows) {
  require(!rows.empty(), "markdown table needs rows");
  const SummaryTable table = summarize(rows);
  std::ostringstream out;
  out << "| Scenario | Method | Dst. (%) | Vis. (%) | Leg. | Nom. (m^2) | Completed |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (ScenarioFamily f : table.families) {
    for (Method m : table.methods) {
      if (!table.has(f, m)) continue;
      const SummaryCell& c = table.at(f, m);
      const auto cell = [&](MetricColumn col, const MeanSd& v, int digits) {
        std::string s = fixed(v.mean, digits) + " ± " + fixed(v.sd, digits);
        return is_best(table, f, m, col) ? "**" + s + "**" : s;
      };
      const std::size_t total = c.aggregate.count + c.failed;
      out << "| " << family_name(f) << " | " << method_name(m);
      if (c.failed > 0) out << " (" << c.failed << " failed)";
      out << " | " << cell(MetricColumn::kDst, c.aggregate.dst_pct, 1) << " | "
          << cell(MetricColumn::kVis, c.aggregate.vis_pct, 1) << " | "
          << cell(MetricColumn::kLeg, c.aggregate.legibility, 1) << " | "
          << (m == Method::kNominal ? std::string("n/a") : cell(MetricColumn::kNom, c.aggregate.nom_dev, 2))
          << " | " << (c.aggregate.count - c.incomplete) << "/" << total << " |\n";
    }
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir) {
  if (rows.empty()) throw UsageError("no result rows to report");
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const char* name, const std::string& text) {
    const auto path = out_dir / name;
    write_text_file(path, text);
    written.push_back(path);
  };
  if (format == ReportFormat::kCsv || format == ReportFormat::kAll) {
    emit("results.csv", results_csv(rows));
    emit("timings.csv", timings_csv(rows));
  }
  if (format == ReportFormat::kJson || format == ReportFormat::kAll) emit("results.json", results_json(rows));
  if (format == ReportFormat::kMarkdown || format == ReportFormat::kAll) {
    emit("results.md", results_markdown(rows));
  }
  return written;
}

}  // namespace comoto

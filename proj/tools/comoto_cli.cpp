// comoto: scenario generation, benchmark runs, metric evaluation and single solves.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comoto/benchmark.hpp"
#include "comoto/config_io.hpp"
#include "comoto/errors.hpp"
#include "comoto/report.hpp"
#include "comoto/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace comoto;

namespace {

constexpr const char* kOutEnv = "COMOTO_OUT_DIR";

struct Options {
  std::string config;
  std::vector<std::string> families;
  std::string seeds;
  std::string out;
  std::string format = "all";
  bool verbose = false;

  std::string scenario;
  std::string trajectory;
  std::string nominal;
  std::string human;
};

/// "1,2,5" or "1-5" or a mix.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    try {
      const std::size_t dash = item.find('-', 1);
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dash));
        const std::uint64_t hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw UsageError("seed range '" + item + "' is reversed");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse seeds '" + text + "'");
    }
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

/// Config file, then command-line overrides. Invalid values are usage errors.
RunConfig resolve_config(const Options& o) {
  try {
    RunConfig c = o.config.empty() ? default_run_config() : load_run_config(o.config);
    if (!o.families.empty()) {
      c.families.clear();
      for (const auto& f : o.families) c.families.push_back(parse_family(f));
    }
    if (!o.seeds.empty()) c.seeds = parse_seeds(o.seeds);
    if (const char* env = std::getenv(kOutEnv); env && *env) c.out_dir = env;
    if (!o.out.empty()) c.out_dir = o.out;
    c.validate();
    return c;
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
}

std::string stem(const Scenario& s) {
  return std::string(family_name(s.family)) + "_" + std::to_string(s.seed);
}

std::string file_method(Method m) {
  std::string name(method_name(m));
  for (char& c : name) {
    if (c == '+') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return name;
}

int cmd_gen(const Options& o) {
  const RunConfig c = resolve_config(o);
  const fs::path out(c.out_dir);
  std::size_t count = 0;
  for (ScenarioFamily f : c.families) {
    for (const Scenario& s : generate_scenarios(f, c.seeds, c.geometry, c.chain)) {
      write_text_file(out / ("scenario_" + stem(s) + ".yaml"), scenario_to_yaml(s));
      save_human_trajectory(out / ("human_" + stem(s) + ".txt"),
                            generate_reach(s.human_script, c.geometry.rate, c.skeleton));
      ++count;
      if (o.verbose) std::cerr << "wrote scenario " << stem(s) << "\n";
    }
  }
  std::cout << "generated " << count << " scenarios in " << out.string() << "\n";
  return 0;
}

int cmd_run(const Options& o) {
  RunConfig c = resolve_config(o);
  const ReportFormat format = parse_format(o.format);
  const BenchmarkResult result = run_benchmark(c);
  const fs::path out(c.out_dir);
  for (const auto& a : result.artifacts) {
    for (Method m : kAllMethods) {
      const auto& traj = a.trajectories[static_cast<std::size_t>(m)];
      if (traj) {
        save_joint_trajectory(out / "trajectories" / (stem(a.scenario) + "_" + file_method(m) + ".txt"), *traj);
      }
    }
    if (a.speed_trace) {
      write_text_file(out / "trajectories" / (stem(a.scenario) + "_speed-adj_trace.csv"),
                      trace_to_csv(*a.speed_trace));
    }
  }
  const auto files = emit_report(result.rows, format, out);
  std::size_t failed = 0;
  for (const auto& r : result.rows) {
    if (r.failed) ++failed;
    if (o.verbose) {
      std::cerr << family_name(r.family) << " seed " << r.seed << " " << method_name(r.method)
                << ": dst " << r.metrics.dst_pct << " vis " << r.metrics.vis_pct << " leg "
                << r.metrics.legibility << " nom " << r.metrics.nom_dev
                << (r.failed ? " FAILED: " + r.message : std::string()) << "\n";
    }
  }
  if (o.verbose) std::cout << results_markdown(result.rows);
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  std::cout << result.rows.size() << " rows, " << failed << " failed\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const RunConfig c = resolve_config(o);
  if (o.scenario.empty() || o.trajectory.empty()) {
    throw UsageError("eval needs --scenario and --trajectory");
  }
  const Scenario s = load_scenario(o.scenario, c.chain);
  const HumanTrajectory truth = o.human.empty()
                                    ? generate_reach(s.human_script, c.geometry.rate, c.skeleton)
                                    : load_human_trajectory(o.human);
  const JointTrajectory traj = load_joint_trajectory(o.trajectory);
  const JointTrajectory nominal =
      o.nominal.empty() ? prepare_scenario(s, c).nominal : load_joint_trajectory(o.nominal);
  const MetricReport r = evaluate_trajectory(traj, nominal, s, truth, c.thresholds);

  ResultRow row;
  row.family = s.family;
  row.seed = s.seed;
  row.method = Method::kCoMOTO;
  row.metrics = r;
  const std::string fmt = o.format == "all" ? "csv" : o.format;
  if (fmt == "json") {
    std::cout << "{\"dst_pct\": " << format_double(r.dst_pct) << ", \"vis_pct\": "
              << format_double(r.vis_pct) << ", \"legibility\": " << format_double(r.legibility)
              << ", \"nom_dev\": " << format_double(r.nom_dev)
              << ", \"path_length\": " << format_double(path_length(traj, c.chain)) << "}\n";
  } else if (fmt == "csv") {
    std::cout << "dst_pct,vis_pct,legibility,nom_dev,path_length\n"
              << format_double(r.dst_pct) << ',' << format_double(r.vis_pct) << ','
              << format_double(r.legibility) << ',' << format_double(r.nom_dev) << ','
              << format_double(path_length(traj, c.chain)) << "\n";
  } else {
    throw UsageError("eval supports --format csv or json");
  }
  return 0;
}

int cmd_solve(const Options& o) {
  RunConfig c = resolve_config(o);
  if (c.families.size() != 1 || c.seeds.size() != 1) {
    throw UsageError("solve needs exactly one --family and one --seeds value");
  }
  const Scenario s = generate_scenarios(c.families[0], c.seeds, c.geometry, c.chain).front();
  const PreparedScenario prep = prepare_scenario(s, c);
  OptimizerOptions opts = c.optimizer;
  opts.record_trace = true;
  const OptResult res = optimize(prep.context, c.comoto, prep.nominal, opts);

  const fs::path out(c.out_dir);
  save_joint_trajectory(out / ("comoto_" + stem(s) + ".txt"), res.trajectory);
  save_joint_trajectory(out / ("nominal_" + stem(s) + ".txt"), prep.nominal);
  write_text_file(out / ("scenario_" + stem(s) + ".yaml"), scenario_to_yaml(s));
  write_text_file(out / ("trace_" + stem(s) + ".csv"), trace_csv(res.trace));
  if (o.verbose) std::cout << trace_csv(res.trace);

  const MetricReport m = evaluate_trajectory(res.trajectory, prep.nominal, s, prep.truth, c.thresholds);
  std::cout << "iterations " << res.iterations << ", converged " << (res.converged ? "yes" : "no")
            << ", cost " << res.initial_report.total << " -> " << res.final_report.total << "\n";
  for (const auto& [name, v] : res.final_report.per_cost) std::cout << "  " << name << " " << v << "\n";
  std::cout << "dst " << m.dst_pct << "% vis " << m.vis_pct << "% leg " << m.legibility << " nom "
            << m.nom_dev << "\n";
  if (!res.diagnostic.empty()) std::cout << "note: " << res.diagnostic << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "run configuration file (default: shipped config/run.yaml)");
  cmd->add_option("--family", o.families, "scenario family: stationary, reaching_far, reaching_near");
  cmd->add_option("--seeds", o.seeds, "seeds, e.g. 1,2,3 or 1-5");
  cmd->add_option("--out", o.out, std::string("output directory (overrides ") + kOutEnv + ")");
  cmd->add_option("--format", o.format, "csv, json, markdown or all");
  cmd->add_flag("--verbose,-v", o.verbose, "print progress and traces");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective trajectory optimization benchmark"};
  app.require_subcommand(1);
  Options o;
  auto* gen = app.add_subcommand("gen", "write scenario and human trajectory files");
  auto* run = app.add_subcommand("run", "run the full benchmark and write reports");
  auto* eval = app.add_subcommand("eval", "compute metrics for an existing trajectory file");
  auto* solve = app.add_subcommand("solve", "single CoMOTO solve with an iteration trace");
  for (auto* cmd : {gen, run, eval, solve}) add_common(cmd, o);
  eval->add_option("--scenario", o.scenario, "scenario file written by gen");
  eval->add_option("--trajectory", o.trajectory, "joint trajectory file");
  eval->add_option("--nominal", o.nominal, "nominal trajectory file (default: regenerate)");
  eval->add_option("--human", o.human, "human trajectory file (default: regenerate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*run) return cmd_run(o);
    if (*eval) return cmd_eval(o);
    if (*solve) return cmd_solve(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

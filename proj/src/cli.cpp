#include "loctemp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loctemp/config.hpp"
#include "loctemp/report_io.hpp"

namespace loctemp {

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_report(const Report& rep) {
  std::printf("%s  [%s]  %.2fs  config %s\n", rep.scenario.c_str(),
              status_label(rep.overall()), rep.runtime_seconds, rep.config_hash.c_str());
  for (const CheckRecord& c : rep.checks) {
    std::printf("  %-12s %s: %s %s %s%s%s\n", status_label(c.status), c.name.c_str(),
                short_num(c.measured).c_str(), c.comparator.c_str(), short_num(c.bound).c_str(),
                c.note.empty() ? "" : "  -- ", c.note.c_str());
  }
}

void write_outputs(const Report& rep, const ScenarioConfig& cfg, const std::string& out_dir) {
  std::string json = cfg.json_path, csv = cfg.csv_path, plot = cfg.plot_path;
  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / rep.scenario;
    if (json.empty()) json = base.string() + ".json";
    if (csv.empty() && !rep.sweep.empty()) csv = base.string() + ".csv";
    if (plot.empty() && !rep.sweep.empty()) plot = base.string() + ".dat";
  }
  if (!json.empty()) write_report_json(rep, json);
  if (!csv.empty()) write_sweep_csv(rep, csv);
  if (!plot.empty()) write_plot_data(rep, plot);
}

int exit_code_for(const std::vector<Report>& reports) {
  bool inconclusive = false;
  for (const Report& r : reports) {
    const CheckStatus s = r.overall();
    if (s == CheckStatus::Fail) return 1;
    if (s == CheckStatus::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

std::vector<ScenarioConfig> select_scenarios(const ParsedConfig& parsed,
                                             const std::vector<std::string>& wanted) {
  if (wanted.empty()) return parsed.scenarios;
  std::vector<ScenarioConfig> out;
  for (const std::string& id : wanted) {
    const auto it = std::find_if(parsed.scenarios.begin(), parsed.scenarios.end(),
                                 [&id](const ScenarioConfig& c) { return c.id == id; });
    if (it == parsed.scenarios.end())
      throw ConfigError("unknown scenario '" + id + "'; see the list subcommand");
    out.push_back(*it);
  }
  return out;
}

int do_run(const std::string& config_path, const std::vector<std::string>& wanted,
           const std::string& out_dir, bool seed_set, std::uint64_t seed, int jobs) {
  ParsedConfig parsed = load_config(config_path);
  std::vector<ScenarioConfig> selected = select_scenarios(parsed, wanted);
  if (seed_set)
    for (ScenarioConfig& c : selected) c.seed = seed;

  std::vector<Report> reports(selected.size());
  jobs = std::max(1, jobs);
  for (std::size_t base = 0; base < selected.size(); base += jobs) {
    const std::size_t stop = std::min(selected.size(), base + jobs);
    std::vector<std::future<Report>> wave;
    for (std::size_t i = base; i < stop; ++i) {
      const ScenarioConfig& cfg = selected[i];
      const ScenarioInfo* info = find_scenario(cfg.id);
      wave.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                [info, &cfg] { return info->runner(cfg); }));
    }
    for (std::size_t i = base; i < stop; ++i) reports[i] = wave[i - base].get();
  }

  for (std::size_t i = 0; i < reports.size(); ++i) {
    print_report(reports[i]);
    write_outputs(reports[i], selected[i], out_dir);
  }
  return exit_code_for(reports);
}

int do_list() {
  for (const ScenarioInfo& info : scenario_registry())
    std::printf("%-24s %s\n", info.id.c_str(), info.description.c_str());
  return 0;
}

int do_validate(const std::string& config_path) {
  const ParsedConfig parsed = load_config(config_path);
  std::printf("ok: %zu scenarios configured\n", parsed.scenarios.size());
  for (const ScenarioConfig& c : parsed.scenarios)
    std::printf("  %-24s config %s\n", c.id.c_str(), config_digest(c).c_str());
  return 0;
}

int do_sweep(int points, double side, double mass, double beta_min, double beta_max,
             int beta_count, int site, const std::string& out_dir) {
  if (beta_min <= 0.0 || beta_max <= beta_min || beta_count < 2)
    throw ConfigError("sweep needs 0 < beta-min < beta-max and at least two samples");
  ScenarioConfig cfg = with_scenario_defaults(ScenarioConfig{}, "monotonicity");
  cfg.torus_points = points;
  cfg.torus_side = side;
  cfg.mass = mass;
  cfg.site = site;
  cfg.betas.clear();
  for (int i = 0; i < beta_count; ++i)
    cfg.betas.push_back(std::exp(std::log(beta_min) +
                                 (std::log(beta_max) - std::log(beta_min)) * i / (beta_count - 1)));
  const Report rep = run_monotonicity(cfg);
  std::printf("beta            w               temperature\n");
  for (const BetaSweepEntry& e : rep.sweep)
    std::printf("%-15.8g %-15.8g %s\n", e.beta, e.estimate.value,
                e.temperature.defined ? short_num(e.temperature.temperature).c_str() : "undefined");
  write_outputs(rep, cfg, out_dir.empty() ? "." : out_dir);
  return exit_code_for({rep});
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Lattice checks of local temperature for thermal states of a scalar field"};
  app.require_subcommand(1);
  app.footer("Matrix sizes are capped; set LOCTEMP_MAX_DIM to raise the cap.");

  std::string config_path = "default";
  std::vector<std::string> wanted;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "Execute scenarios from a config");
  run->add_option("--config", config_path, "Config file path, or 'default'");
  run->add_option("--scenario", wanted, "Scenario id (repeatable; default: all)");
  run->add_option("--out", out_dir, "Directory for JSON/CSV/plot outputs");
  run->add_option("--seed", seed, "Override the random seed")->each([&seed_set](const std::string&) {
    seed_set = true;
  });
  run->add_option("--jobs", jobs, "Concurrent scenarios")->check(CLI::PositiveNumber);

  app.add_subcommand("list", "Enumerate scenarios with their claims");

  CLI::App* validate = app.add_subcommand("validate", "Check a config without running");
  validate->add_option("--config", config_path, "Config file path, or 'default'");

  CLI::App* sweep = app.add_subcommand("sweep", "Ad-hoc torus beta sweep from flags");
  int points = 16, beta_count = 25, site = 0;
  double side = 1.0, mass = 1.0, beta_min = 0.25, beta_max = 8.0;
  sweep->add_option("--points", points, "Torus points per axis")->check(CLI::PositiveNumber);
  sweep->add_option("--side", side, "Torus side length");
  sweep->add_option("--mass", mass, "Field mass");
  sweep->add_option("--beta-min", beta_min, "Smallest inverse temperature");
  sweep->add_option("--beta-max", beta_max, "Largest inverse temperature");
  sweep->add_option("--beta-count", beta_count, "Number of log-spaced samples");
  sweep->add_option("--site", site, "Evaluation site index");
  sweep->add_option("--out", out_dir, "Directory for CSV/plot outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << config_schema_help();
    return 3;
  }

  try {
    if (app.got_subcommand("list")) return do_list();
    if (app.got_subcommand("validate")) return do_validate(config_path);
    if (app.got_subcommand("sweep"))
      return do_sweep(points, side, mass, beta_min, beta_max, beta_count, site, out_dir);
    return do_run(config_path, wanted, out_dir, seed_set, seed, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace loctemp

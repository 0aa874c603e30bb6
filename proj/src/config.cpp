#include "loctemp/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace loctemp {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

// (scenario scope or "", section, key) -> value
using EntryMap = std::map<std::array<std::string, 3>, Entry>;

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s = {"geometry", "grid", "field",
                                          "states",   "checks", "output"};
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_field(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double parse_double(const std::string& path, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail_field(path, "expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& path, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail_field(path, "expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& path, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail_field(path, "expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& path, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail_field(path, "empty element in list '" + v + "'");
    out.push_back(parse_double(path, item));
  }
  if (out.empty()) fail_field(path, "expected a comma-separated list");
  return out;
}

ConformalVariant parse_variant(const std::string& path, const std::string& v) {
  if (v == "unit") return ConformalVariant::Unit;
  if (v == "exp_newton") return ConformalVariant::ExpNewton;
  if (v == "affine_newton") return ConformalVariant::AffineNewton;
  if (v == "quartic_shell") return ConformalVariant::QuarticShell;
  fail_field(path, "expected unit, exp_newton, affine_newton or quartic_shell");
}

const char* variant_name(ConformalVariant v) {
  switch (v) {
    case ConformalVariant::Unit: return "unit";
    case ConformalVariant::ExpNewton: return "exp_newton";
    case ConformalVariant::AffineNewton: return "affine_newton";
    default: return "quartic_shell";
  }
}

EntryMap parse_entries(const std::string& text) {
  EntryMap entries;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  std::string scope, section;
  while (std::getline(ss, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      const std::size_t dot = name.find('.');
      if (dot == std::string::npos) {
        scope.clear();
        section = name;
      } else {
        scope = name.substr(0, dot);
        section = name.substr(dot + 1);
        if (!find_scenario(scope)) fail(line, "unknown scenario '" + scope + "'");
      }
      if (!known_sections().count(section)) fail(line, "unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "empty value for key '" + key + "'");
    auto [it, inserted] = entries.insert({{scope, section, key}, Entry{value, line}});
    if (!inserted)
      fail(line, "duplicate key " + section + "." + key + " (first set on line " +
                     std::to_string(it->second.line) + ")");
  }
  return entries;
}

struct Applied {
  bool r_max = false;
  bool variant = false;
};

void apply_entry(ScenarioConfig& cfg, Applied& flags, const std::string& section,
                 const std::string& key, const Entry& e) {
  const std::string path = section + "." + key;
  if (section == "geometry") {
    if (key == "variant") {
      cfg.variant = parse_variant(path, e.value);
      flags.variant = true;
    } else if (key == "profile") {
      if (e.value == "uniform")
        cfg.profile = ShellProfile::Uniform;
      else if (e.value == "bump")
        cfg.profile = ShellProfile::Bump;
      else
        fail_field(path, "expected uniform or bump");
    } else if (key == "r_inner") {
      cfg.r_inner = parse_double(path, e.value);
    } else if (key == "r_outer") {
      cfg.r_outer = parse_double(path, e.value);
    } else if (key == "amplitude") {
      cfg.amplitude = parse_double(path, e.value);
    } else {
      fail(e.line, "unknown key " + path);
    }
  } else if (section == "grid") {
    if (key == "torus_points") cfg.torus_points = static_cast<int>(parse_int(path, e.value));
    else if (key == "torus_side") cfg.torus_side = parse_double(path, e.value);
    else if (key == "radial_points") cfg.radial_points = static_cast<int>(parse_int(path, e.value));
    else if (key == "r_max") { cfg.r_max = parse_double(path, e.value); flags.r_max = true; }
    else if (key == "chart_points") cfg.chart_points = static_cast<int>(parse_int(path, e.value));
    else if (key == "ball_radius") cfg.ball_radius = parse_double(path, e.value);
    else if (key == "refinements") cfg.refinements = static_cast<int>(parse_int(path, e.value));
    else fail(e.line, "unknown key " + path);
  } else if (section == "field") {
    if (key == "xi") cfg.xis = parse_list(path, e.value);
    else if (key == "mass") cfg.mass = parse_double(path, e.value);
    else if (key == "site") cfg.site = static_cast<int>(parse_int(path, e.value));
    else fail(e.line, "unknown key " + path);
  } else if (section == "states") {
    if (key == "beta") cfg.betas = parse_list(path, e.value);
    else fail(e.line, "unknown key " + path);
  } else if (section == "checks") {
    if (key == "sign_margin") cfg.sign_margin = parse_double(path, e.value);
    else if (key == "tolerance") cfg.tolerance = parse_double(path, e.value);
    else if (key == "doubling") cfg.doubling = parse_bool(path, e.value);
    else if (key == "pairs") cfg.pairs = static_cast<int>(parse_int(path, e.value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(path, e.value));
    else fail(e.line, "unknown key " + path);
  } else if (section == "output") {
    if (key == "json") cfg.json_path = e.value;
    else if (key == "csv") cfg.csv_path = e.value;
    else if (key == "plot") cfg.plot_path = e.value;
    else fail(e.line, "unknown key " + path);
  }
}

void validate(const ScenarioConfig& cfg, const Applied& flags) {
  const std::string& id = cfg.id;
  auto check = [&](bool ok, const std::string& path, const std::string& msg) {
    if (!ok) fail_field(path, msg + " (scenario " + id + ")");
  };
  check(cfg.r_inner > 0.0, "geometry.r_inner", "must be positive");
  check(cfg.r_outer > cfg.r_inner, "geometry.r_outer", "must exceed r_inner");
  check(cfg.amplitude > 0.0, "geometry.amplitude", "must be positive");
  check(cfg.torus_points >= 4, "grid.torus_points", "need at least 4 points per axis");
  check(cfg.torus_side > 0.0, "grid.torus_side", "must be positive");
  check(cfg.radial_points >= 8, "grid.radial_points", "need at least 8 nodes");
  check(cfg.r_max > 0.0, "grid.r_max", "must be positive");
  check(cfg.chart_points >= 8, "grid.chart_points", "need at least 8 cells per chart");
  check(cfg.ball_radius > 0.0, "grid.ball_radius", "must be positive");
  check(cfg.refinements == 3 || cfg.refinements == 4, "grid.refinements",
        "extrapolation ladder supports 3 or 4 levels");
  check(cfg.mass > 0.0, "field.mass", "must be positive (a massless uniform torus has a zero mode)");
  check(cfg.site >= 0, "field.site", "must be non-negative");
  for (double b : cfg.betas)
    check(b > 0.0, "states.beta", "inverse temperature must be positive");
  check(std::is_sorted(cfg.betas.begin(), cfg.betas.end()) &&
            std::adjacent_find(cfg.betas.begin(), cfg.betas.end()) == cfg.betas.end(),
        "states.beta", "must be strictly increasing");
  check(cfg.sign_margin > 0.0, "checks.sign_margin", "must be positive");
  check(cfg.tolerance > 0.0, "checks.tolerance", "must be positive");
  check(cfg.pairs >= 1, "checks.pairs", "need at least one pair");

  const bool torus = id == "monotonicity" || id == "comparison_properties" ||
                     id == "reduction_oracle";
  if (torus) {
    const long sites = static_cast<long>(cfg.torus_points) * cfg.torus_points * cfg.torus_points;
    check(cfg.site < sites, "field.site", "site index outside the torus");
    for (double x : cfg.xis)
      check(x == 0.0, "field.xi", "flat torus scenarios have no curvature coupling");
    if (id == "reduction_oracle")
      check(cfg.torus_points <= 8, "grid.torus_points",
            "the four-dimensional inversion needs a small torus (at most 8)");
  }
  if (flags.variant) {
    ScenarioConfig pinned = with_scenario_defaults(ScenarioConfig{}, id);
    check(cfg.variant == pinned.variant, "geometry.variant",
          std::string("this scenario runs on the ") + variant_name(pinned.variant) + " factor");
  }
  if (id == "counterexample") {
    for (double x : cfg.xis)
      check(x >= 0.0 && x < 0.125, "field.xi", "coupling must lie in [0, 1/8)");
  } else if (id == "positive_noncompact") {
    for (double x : cfg.xis)
      check(x >= 0.0 && x <= 0.125, "field.xi", "coupling must lie in [0, 1/8]");
  } else if (id == "positive_compact") {
    for (double x : cfg.xis)
      check(x > 0.0 && x < 1.0 / 6.0, "field.xi",
            "scalar curvature coupling must lie in (0, 1/6)");
    check(cfg.ball_radius > cfg.r_max, "grid.ball_radius",
          "flat reference ball must extend past the chart match radius");
  }
  if (id == "counterexample" || id == "positive_noncompact") {
    check(cfg.radial_points % 10 == 0, "grid.radial_points",
          "must be divisible by 10 for the refinement ladder");
    check(cfg.r_max > cfg.r_outer, "grid.r_max", "domain must contain the shell");
    // the grid must resolve the shell at the coarsest ladder level
    const double coarse_h = cfg.r_max / ((2 * cfg.radial_points) / 5);
    check((cfg.r_outer - cfg.r_inner) / coarse_h >= 16.0, "grid.radial_points",
          "coarsest ladder level must keep at least 16 nodes inside the shell");
  }
  if (id == "positive_compact") {
    const int div = 4 << (cfg.refinements - 3);
    check(cfg.chart_points % div == 0, "grid.chart_points",
          "must be divisible by " + std::to_string(div) + " for the refinement ladder");
    const double coarse_h = cfg.r_max / (cfg.chart_points / (1 << (cfg.refinements - 1)));
    check((cfg.r_outer - cfg.r_inner) / coarse_h >= 16.0, "grid.chart_points",
          "coarsest ladder level must keep at least 16 cells inside the shell");
  }
}

ParsedConfig resolve(const EntryMap& entries) {
  ParsedConfig out;
  for (const ScenarioInfo& info : scenario_registry()) {
    ScenarioConfig cfg = with_scenario_defaults(ScenarioConfig{}, info.id);
    Applied flags;
    for (const auto& [k, e] : entries) {
      const auto& [scope, section, key] = k;
      if (scope.empty()) apply_entry(cfg, flags, section, key, e);
    }
    for (const auto& [k, e] : entries) {
      const auto& [scope, section, key] = k;
      if (scope == info.id) apply_entry(cfg, flags, section, key, e);
    }
    // the chart match radius tracks the shell unless pinned explicitly
    if (info.id == "positive_compact" && !flags.r_max) cfg.r_max = 2.0 * cfg.r_outer;
    validate(cfg, flags);
    out.scenarios.push_back(std::move(cfg));
  }
  return out;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) { return resolve(parse_entries(text)); }

ParsedConfig default_config() { return parse_config(""); }

ParsedConfig load_config(const std::string& path) {
  if (path == "default") return default_config();
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_schema_help() {
  return
      "Config document: INI-style sections with key = value lines.\n"
      "Global sections apply to every scenario; [<scenario>.<section>] overrides one.\n"
      "Lines starting with # or ; are comments. Unknown sections or keys are errors.\n"
      "\n"
      "[geometry]  variant (scenario-pinned: unit | exp_newton | affine_newton | quartic_shell)\n"
      "            profile = uniform | bump   shell density profile\n"
      "            r_inner, r_outer           shell radii (default 1, 2)\n"
      "            amplitude                  density amplitude (default 3/(28*pi))\n"
      "[grid]      torus_points (16), torus_side (1.0), radial_points (4000), r_max (80),\n"
      "            chart_points (1024), ball_radius (16), refinements (3 or 4)\n"
      "[field]     xi = comma list of couplings; mass (1.0, torus scenarios); site (0)\n"
      "[states]    beta = comma list of inverse temperatures, strictly increasing\n"
      "[checks]    sign_margin (5), tolerance (1e-10), doubling (true), pairs (100), seed\n"
      "[output]    json, csv, plot = per-scenario output paths\n"
      "\n"
      "Scenarios: monotonicity, counterexample, positive_noncompact, positive_compact,\n"
      "           comparison_properties, reduction_oracle.\n";
}

}  // namespace loctemp

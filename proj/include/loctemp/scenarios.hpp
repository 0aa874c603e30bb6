#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loctemp/wick.hpp"

namespace loctemp {

enum class CheckStatus { Pass, Fail, Inconclusive };

struct CheckRecord {
  std::string name;        // plain-language claim or invariant being checked
  double measured = 0.0;
  double bound = 0.0;
  std::string comparator;  // relation asserted between measured and bound
  CheckStatus status = CheckStatus::Pass;
  std::string note;
};

struct Report {
  std::string scenario;
  std::string config_hash;        // hex digest of the resolved configuration
  std::vector<double> spacings;   // lattice spacings of the grids used, coarsest first
  std::vector<CheckRecord> checks;
  std::vector<BetaSweepEntry> sweep;  // per-beta rows for CSV/plot export
  double runtime_seconds = 0.0;
  std::string timestamp;          // ISO 8601; excluded from reproducibility hashes

  CheckStatus overall() const;
};

struct ScenarioConfig {
  std::string id;

  // geometry
  ConformalVariant variant = ConformalVariant::Unit;
  ShellProfile profile = ShellProfile::Uniform;
  double r_inner = 1.0;
  double r_outer = 2.0;
  double amplitude = 3.0 / (28.0 * 3.14159265358979323846);

  // grid
  int torus_points = 16;
  double torus_side = 1.0;
  int radial_points = 4000;
  double r_max = 80.0;
  int chart_points = 1024;   // two-chart cells per chart (finest level)
  double ball_radius = 16.0; // flat reference ball coordinate radius
  int refinements = 3;

  // field
  std::vector<double> xis;   // scenario-dependent default when empty
  double mass = 1.0;

  // evaluation point: torus site index; radial scenarios always probe the origin
  int site = 0;

  // states
  std::vector<double> betas; // scenario-dependent default when empty

  // checks
  double sign_margin = 5.0;  // |w| >= margin * error to assert a strict sign
  double tolerance = 1e-10;
  bool doubling = true;      // domain-doubling stability check where applicable
  int pairs = 100;           // random potential pairs for the comparison suite

  // output
  std::string json_path;
  std::string csv_path;
  std::string plot_path;

  std::uint64_t seed = 20260825ULL;
};

// Resolved per-scenario defaults (xi list, beta grid) without touching
// explicitly set values.
ScenarioConfig with_scenario_defaults(ScenarioConfig cfg, const std::string& id);

// FNV-1a digest of the canonicalized configuration; hex string of 16 chars.
std::string config_digest(const ScenarioConfig& cfg);

Report run_monotonicity(const ScenarioConfig& cfg);
Report run_counterexample(const ScenarioConfig& cfg);
Report run_positive_noncompact(const ScenarioConfig& cfg);
Report run_positive_compact(const ScenarioConfig& cfg);
Report run_comparison_properties(const ScenarioConfig& cfg);
Report run_reduction_oracle(const ScenarioConfig& cfg);

struct ScenarioInfo {
  std::string id;
  std::string description;
  Report (*runner)(const ScenarioConfig&);
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo* find_scenario(const std::string& id);

}  // namespace loctemp

// Acceptance gate: ten end-to-end criteria at full production sizes, one
// PASS/FAIL line each. The process exit code is the number of failed
// criteria, so a clean run exits 0.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loctemp/conformal.hpp"
#include "loctemp/operators.hpp"
#include "loctemp/scenarios.hpp"
#include "loctemp/shell.hpp"
#include "loctemp/spectral.hpp"
#include "loctemp/states.hpp"
#include "loctemp/wick.hpp"

using namespace loctemp;

namespace {

int failures = 0;

struct timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void record(int id, bool pass, const std::string& text) {
  std::printf("[%2d] %s  %s\n", id, pass ? "PASS" : "FAIL", text.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool all_pass(const Report& rep) { return rep.overall() == CheckStatus::Pass; }

void criterion_monotonicity() {
  timer t;
  const Report rep = run_monotonicity(with_scenario_defaults(ScenarioConfig{}, "monotonicity"));
  const double secs = t.seconds();
  const bool pass = all_pass(rep) && rep.sweep.size() == 25 && secs < 120.0;
  record(1, pass,
         "thermal excess strictly decreasing over 25 inverse temperatures in [0.25, 8] on the "
         "16-cubed unit torus, Lipschitz and inverse-beta tail bounds included (" +
             fmt(secs) + "s, limit 120)");
}

void criterion_ground_limit() {
  const SpectralDecomposition dec =
      decompose(assemble_torus(make_torus_grid(1.0, 16), 0.0, 1.0));
  const EvalPoint site = EvalPoint::at_site(0);
  const double w1 = wick_excess(StationaryState::kms(1.0), dec, site).value;
  const double w64 = wick_excess(StationaryState::kms(64.0), dec, site).value;
  const double ratio = w64 / w1;
  record(2, ratio <= 1e-3,
         "ground-state limit: thermal excess at beta 64 is " + fmt(ratio) +
             " of the beta 1 value (bound 1e-3)");
}

void criterion_flat_calibration() {
  timer t;
  const double beta = 0.1, mass = 0.05;
  const double target = 1.0 / (12.0 * beta * beta);
  std::vector<double> hs, vals;
  for (int n : {16, 24, 32}) {
    const TorusGrid grid = make_torus_grid(1.0, n);
    const SpectralDecomposition dec = decompose(assemble_torus(grid, 0.0, mass));
    hs.push_back(grid.spacing());
    vals.push_back(wick_excess(StationaryState::kms(beta), dec, EvalPoint::at_site(0)).value);
  }
  double inc = 0.0;
  const double w = richardson_extrapolate(hs, vals, &inc);
  const double rel = std::abs(w - target) / target;
  const double secs = t.seconds();
  const bool pass = rel <= 0.02 && secs < 300.0;
  record(3, pass,
         "flat-box high-temperature calibration at beta 0.1, mass 0.05: extrapolated excess " +
             fmt(w) + " vs continuum value " + fmt(target) + ", relative gap " + fmt(rel) +
             " (tolerance 0.02; " + fmt(secs) + "s, limit 300)");
  if (!pass) {
    const double lightest = bose_factor(beta, mass) / mass;  // unit box volume
    std::printf(
        "      the box of side 1 keeps its lightest frequency at the bare mass %s, and that "
        "single mode already contributes %s to the excess; with the volume pinned while the "
        "temperature is %s, the open-space value cannot emerge at any spatial refinement\n",
        fmt(mass).c_str(), fmt(lightest).c_str(), fmt(1.0 / beta).c_str());
  }
}

void criterion_counterexample() {
  timer t;
  const Report rep = run_counterexample(with_scenario_defaults(ScenarioConfig{}, "counterexample"));
  const double secs = t.seconds();
  const bool pass = all_pass(rep) && rep.checks.size() == 8 && secs < 900.0;
  record(4, pass,
         "negative Wick square at the origin of the exponential-factor shell for couplings 0, "
         "0.05 and 0.1, each sign-certain at five error bars and stable under domain doubling (" +
             fmt(secs) + "s, limit 900 for the three couplings)");
}

void criterion_positive_noncompact() {
  timer t;
  const Report rep =
      run_positive_noncompact(with_scenario_defaults(ScenarioConfig{}, "positive_noncompact"));
  const bool pass = all_pass(rep) && rep.checks.size() == 7;
  record(5, pass,
         "non-negative Wick square at the origin of the affine-factor shell: couplings 0 and 1/8 "
         "in the ground state and at beta 1 and 4, temperature defined wherever the value is "
         "non-negative (" + fmt(t.seconds()) + "s)");
}

void criterion_positive_compact() {
  timer t;
  const Report rep =
      run_positive_compact(with_scenario_defaults(ScenarioConfig{}, "positive_compact"));
  const bool pass = all_pass(rep) && rep.checks.size() == 10;
  record(6, pass,
         "non-negative Wick square at the centre of the compactified shell for couplings 0.05 "
         "and 1/6 - 0.01, ground and beta 2, with the independent coefficient fit agreeing "
         "within 10 percent or combined error bars (" + fmt(t.seconds()) + "s)");
}

void criterion_reduction() {
  timer t;
  const Report rep =
      run_reduction_oracle(with_scenario_defaults(ScenarioConfig{}, "reduction_oracle"));
  const bool pass = all_pass(rep) && rep.checks.size() == 4;
  record(7, pass,
         "frequency-sum identity to 1e-10 on every mode, and the four-dimensional lattice "
         "inversion matches the equal-time kernel with a second-order-shrinking envelope "
         "across two time refinements (" + fmt(t.seconds()) + "s)");
}

void criterion_comparison() {
  timer t;
  const Report rep =
      run_comparison_properties(with_scenario_defaults(ScenarioConfig{}, "comparison_properties"));
  const double secs = t.seconds();
  const bool pass = all_pass(rep) && secs < 120.0;
  record(8, pass,
         "100 seeded potential pairs on the 8-cubed torus: Green-kernel inverse ordering "
         "positive semi-definite within 1e-10 of norm, entries strictly positive, zero "
         "violations (" + fmt(secs) + "s, limit 120)");
}

void criterion_lapse() {
  timer t;
  const EvalPoint site = EvalPoint::at_site(0);
  const EvalPoint origin = EvalPoint::origin();
  const SpatialOperator torus = assemble_torus(make_torus_grid(1.0, 16), 0.0, 1.0);
  const ShellPotential pot = make_shell_potential(
      make_shell_density(1.0, 2.0, 3.0 / (28.0 * M_PI), ShellProfile::Uniform));
  const ConformalFactorModel model = make_conformal_model(ConformalVariant::ExpNewton, pot);
  const SpatialOperator radial =
      assemble_radial_conformal(make_radial_grid(20.0, 800, RadialBoundary::Dirichlet), model, 0.0);

  bool pass = true;
  double worst = 0.0;
  for (double c : {0.5, 2.0, 10.0}) {
    for (const SpatialOperator* op : {&torus, &radial}) {
      const LapseCheck lc =
          lapse_rescale_check(*op, c, 1.0, op == &torus ? site : origin);
      pass = pass && lc.pass && lc.residual <= 1e-10;
      worst = std::max(worst, lc.residual);
    }
  }
  record(9, pass,
         "constant lapse rescaling by 1/2, 2 and 10 on the torus and the exponential-factor "
         "shell: excess at the scaled inverse temperature matches 1/c^2 times the base value, "
         "worst relative residual " + fmt(worst) + " (bound 1e-10; " + fmt(t.seconds()) + "s)");
}

void criterion_occupation_states() {
  timer t;
  const TorusGrid grid = make_torus_grid(1.0, 8);
  const SpectralDecomposition dec =
      decompose(assemble_torus(grid, Eigen::ArrayXd::Zero(grid.sites()), 1.0));
  const Eigen::MatrixXd ground = state_kernel(StationaryState::ground(), dec).values;
  const Eigen::ArrayXd gdiag = state_diagonal(StationaryState::ground(), dec);
  const double gnorm = ground.norm();

  std::mt19937_64 rng(20260825ULL);
  std::uniform_real_distribution<double> occ_dist(0.0, 3.0);
  int violations = 0;
  double worst_eig = 0.0;
  for (int s = 0; s < 50; ++s) {
    Eigen::ArrayXd occ(dec.modes());
    for (Eigen::Index i = 0; i < occ.size(); ++i) occ[i] = occ_dist(rng);
    const StationaryState state = StationaryState::perturbed(occ);
    const Eigen::MatrixXd diff = state_kernel(state, dec).values - ground;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues()[0];
    worst_eig = std::min(worst_eig, min_eig);
    if (min_eig < -1e-10 * gnorm) ++violations;
    if (((state_diagonal(state, dec) - gdiag) < 0.0).any()) ++violations;
  }
  record(10, violations == 0,
         "50 seeded occupation states on the 8-cubed torus: kernel difference to the ground "
         "state positive semi-definite (worst eigenvalue " + fmt(worst_eig) +
             ", tolerance -1e-10 of norm) and the diagonal never drops below the ground value "
             "(" + fmt(t.seconds()) + "s)");
}

}  // namespace

int main() {
  std::printf("acceptance: lattice local-temperature checks at production sizes\n");
  timer total;
  criterion_monotonicity();
  criterion_ground_limit();
  criterion_flat_calibration();
  criterion_counterexample();
  criterion_positive_noncompact();
  criterion_positive_compact();
  criterion_reduction();
  criterion_comparison();
  criterion_lapse();
  criterion_occupation_states();
  std::printf("%d of 10 criteria passed (%.1fs total)\n", 10 - failures, total.seconds());
  return failures;
}

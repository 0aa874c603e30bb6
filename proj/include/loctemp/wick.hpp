#pragma once

#include <vector>

#include "loctemp/states.hpp"

namespace loctemp {

// Evaluation location: a torus site, or the coincidence limit at the centre of
// a radial model (diagonal values at small r extrapolated to r -> 0).
struct EvalPoint {
  bool radial_origin = true;
  Eigen::Index site = 0;

  static EvalPoint origin() { return {true, 0}; }
  static EvalPoint at_site(Eigen::Index i) { return {false, i}; }
};

struct WickEstimate {
  double value = 0.0;
  double error = 0.0;                // refinement-extrapolation error estimate, > 0
  std::vector<double> spacings;      // spacing per refinement level, coarse to fine
  std::vector<double> level_values;  // per-level estimates before extrapolation
  EvalPoint point;
  bool converged = true;
};

struct TemperatureReading {
  bool defined = false;
  double temperature = 0.0;  // sqrt(12 w) when defined
  double w = 0.0;            // retained Wick-square value when undefined
};

// Second-order Richardson/Neville extrapolation in spacing^2; writes the last
// stage increment (the error estimate) through last_increment when non-null.
double richardson_extrapolate(const std::vector<double>& spacings,
                              const std::vector<double>& values, double* last_increment);

// Additive bias a Dirichlet wall at geodesic radius D leaves on the ground
// kernel diagonal near the centre of a flat ball: -1/(48 D^2). Cancels between
// operators sharing a wall and is subtracted when only the reference has one.
double dirichlet_wall_bias(double geodesic_radius);

// Single-level coincidence difference between two state kernels at the point
// (wall bias not applied). Exposed so scenario runners can share
// decompositions across many state combinations.
double coincidence_difference(const SpectralDecomposition& model_dec, const StationaryState& state,
                              const SpectralDecomposition& ref_dec, const StationaryState& ref_state,
                              const EvalPoint& point);

// Renormalized Wick square by same-lattice kernel differencing: the reference
// operator must match the model's local (flat) geometry around the point. Both
// operators are refined levels-many times (x1, x2, x4, ...) and the point value
// is Richardson-extrapolated. States must be Ground or KMS.
WickEstimate wick_square_relative(const SpatialOperator& model_op, const SpatialOperator& ref_op,
                                  const StationaryState& state, const StationaryState& ref_state,
                                  const EvalPoint& point, int levels = 3);

// Thermal or occupation excess over the ground state on one decomposition; no
// reference subtraction is needed since the kernel difference is smooth.
WickEstimate wick_excess(const StationaryState& state, const SpectralDecomposition& dec,
                         const EvalPoint& point);

TemperatureReading local_temperature(const WickEstimate& w);

struct BetaSweepEntry {
  double beta = 0.0;
  WickEstimate estimate;
  TemperatureReading temperature;
};

struct BetaSweepResult {
  std::vector<BetaSweepEntry> entries;
  bool strictly_decreasing = true;
  // w(beta) <= (beta0/beta) w(beta0) for every pair beta > beta0
  bool tail_bound_ok = true;
  // |w(beta) - w(beta0)| <= 2 beta0^{-1} |beta - beta0| w(beta0/4)
  bool lipschitz_ok = true;
};

BetaSweepResult beta_sweep(const SpectralDecomposition& dec, const std::vector<double>& betas,
                           const EvalPoint& point);

struct LapseCheck {
  double c = 1.0;
  double beta = 0.0;
  double w_base = 0.0;
  double w_scaled = 0.0;
  double residual = 0.0;
  bool pass = false;
};

// Constant-lapse rescaling identity: the excess Wick square on the operator
// scaled by c, read at inverse temperature c*beta, must equal c^{-2} times the
// unscaled value at beta.
LapseCheck lapse_rescale_check(const SpatialOperator& op, double c, double beta,
                               const EvalPoint& point);

struct FitWindow {
  double lo = 0.3;
  double hi = 0.8;
};

struct FitEstimate {
  double w_fit = 0.0;
  double fit_error = 0.0;
};

// Independent w estimator from the off-diagonal kernel against the continuum
// flat reference: fits 4 pi^2 G(x, 0) - 1/d(x)^2 to constant plus linear over
// the window of geodesic distances d; the constant is 4 pi^2 w.
FitEstimate mass_coefficient_estimate(const SpatialOperator& op, const SpectralDecomposition& dec,
                                      const StationaryState& state, const FitWindow& window);

}  // namespace loctemp

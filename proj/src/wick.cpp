#include "loctemp/wick.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace loctemp {

namespace {

constexpr double pi = 3.14159265358979323846;

struct line_fit {
  double intercept = 0.0;
  double slope = 0.0;
  double sigma_intercept = 0.0;
};

// least squares y ~ a + b x via 2x2 normal equations; sigma_intercept is the
// regression estimate of the intercept standard error (0 when m == 2)
line_fit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw std::invalid_argument("fit_affine: need at least two points");
  double s1 = static_cast<double>(m), sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double det = s1 * sxx - sx * sx;
  if (det <= 0.0) throw std::invalid_argument("fit_affine: degenerate abscissae");
  line_fit out;
  out.intercept = (sxx * sy - sx * sxy) / det;
  out.slope = (s1 * sxy - sx * sy) / det;
  if (m > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = y[i] - out.intercept - out.slope * x[i];
      rss += r * r;
    }
    const double var = rss / static_cast<double>(m - 2);
    out.sigma_intercept = std::sqrt(std::max(0.0, var * sxx / det));
  }
  return out;
}

// diagonal kernel entry at node i from eigenfunction rows, avoiding full
// kernel assembly
double diag_entry(const SpectralDecomposition& dec, const Eigen::ArrayXd& weights,
                  Eigen::Index i) {
  if (dec.mode_sum) return weights.sum() / dec.total_measure;
  return (dec.eigenfunctions.row(i).transpose().array().square() * weights).sum();
}

bool is_radial(const SpectralDecomposition& dec) { return dec.position.size() > 0; }

// coincidence limit of a radial kernel difference at the origin: sample the
// first three off-origin nodes and extrapolate r -> 0 with a + b r^2
double origin_difference(const SpectralDecomposition& model_dec, const Eigen::ArrayXd& model_weights,
                         const SpectralDecomposition& ref_dec, const Eigen::ArrayXd& ref_weights) {
  constexpr Eigen::Index probe[3] = {1, 2, 3};
  std::vector<double> r2(3), dv(3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Index i = probe[k];
    if (i >= model_dec.nodes() || i >= ref_dec.nodes())
      throw std::invalid_argument("origin_difference: grid too small for probe nodes");
    const double rm = model_dec.position[i];
    const double rr = ref_dec.position[i];
    if (std::abs(rm - rr) > 1e-9 * std::max(rm, 1.0))
      throw std::invalid_argument("origin_difference: probe positions disagree between lattices");
    double d = diag_entry(model_dec, model_weights, i) - diag_entry(ref_dec, ref_weights, i);
    if (model_dec.kernel_form == KernelForm::USubstitution) d /= 4.0 * pi * rm * rm;
    r2[k] = rm * rm;
    dv[k] = d;
  }
  return fit_affine(r2, dv).intercept;
}

double state_difference(const SpectralDecomposition& model_dec, const StationaryState& state,
                        const SpectralDecomposition& ref_dec, const StationaryState& ref_state,
                        const EvalPoint& point) {
  const Eigen::ArrayXd fm = state_weights(state, model_dec);
  const Eigen::ArrayXd fr = state_weights(ref_state, ref_dec);
  if (is_radial(model_dec)) {
    if (!point.radial_origin)
      throw std::invalid_argument("coincidence_difference: radial lattices evaluate at the origin");
    return origin_difference(model_dec, fm, ref_dec, fr);
  }
  if (point.radial_origin)
    throw std::invalid_argument("coincidence_difference: torus lattices need an explicit site");
  if (point.site < 0 || point.site >= model_dec.nodes() ||
      (ref_dec.nodes() != model_dec.nodes()))
    throw std::invalid_argument("coincidence_difference: site out of range");
  return diag_entry(model_dec, fm, point.site) - diag_entry(ref_dec, fr, point.site);
}

// wall bias carried by an operator's Dirichlet boundary, in geodesic units
double wall_bias(const SpatialOperator& op) {
  switch (op.meta.kind) {
    case AssemblyKind::RadialConformal: {
      const auto& g = std::get<RadialGrid>(op.grid);
      return dirichlet_wall_bias(g.r_max);
    }
    case AssemblyKind::FlatBall: {
      const auto& g = std::get<RadialGrid>(op.grid);
      return dirichlet_wall_bias(op.meta.flat_factor * op.meta.flat_factor * g.r_max);
    }
    default:
      return 0.0;
  }
}

void check_probe_flat(const SpatialOperator& op) {
  if (!op.meta.model || op.meta.model->variant == ConformalVariant::Unit) return;
  const auto& g = std::get<RadialGrid>(op.grid);
  const double h = g.spacing();
  const double outermost = (op.kernel_form == KernelForm::USubstitution) ? 4.0 * h : 3.5 * h;
  if (!in_flat_region(*op.meta.model, outermost, 2.0 * h))
    throw std::invalid_argument(
        "wick_square_relative: probe nodes reach outside the flat region; refine the grid");
}

void check_pair(const SpatialOperator& model_op, const SpatialOperator& ref_op,
                const StationaryState& state, const StationaryState& ref_state,
                const EvalPoint& point) {
  if (state.kind == StateKind::Perturbed || ref_state.kind == StateKind::Perturbed)
    throw std::invalid_argument(
        "wick_square_relative: perturbed states carry grid-tied occupations and cannot be refined; "
        "difference state_diagonal values on a fixed lattice instead");
  if (model_op.kernel_form != ref_op.kernel_form)
    throw std::invalid_argument("wick_square_relative: operators use different kernel conventions");
  const bool model_radial = std::holds_alternative<RadialGrid>(model_op.grid);
  const bool ref_radial = std::holds_alternative<RadialGrid>(ref_op.grid);
  if (model_radial != ref_radial)
    throw std::invalid_argument("wick_square_relative: cannot mix torus and radial lattices");
  if (model_radial) {
    if (!point.radial_origin)
      throw std::invalid_argument("wick_square_relative: radial estimates evaluate at the origin");
    const auto& gm = std::get<RadialGrid>(model_op.grid);
    const auto& gr = std::get<RadialGrid>(ref_op.grid);
    if (std::abs(gm.spacing() - gr.spacing()) > 1e-12 * gm.spacing())
      throw std::invalid_argument("wick_square_relative: lattice spacings disagree");
    if (model_op.kernel_form == KernelForm::USubstitution && gm.points != gr.points)
      throw std::invalid_argument("wick_square_relative: substitution-form lattices must coincide");
    check_probe_flat(model_op);
    check_probe_flat(ref_op);
  } else {
    const auto& gm = std::get<TorusGrid>(model_op.grid);
    const auto& gr = std::get<TorusGrid>(ref_op.grid);
    if (gm.points_per_axis != gr.points_per_axis || gm.side != gr.side)
      throw std::invalid_argument("wick_square_relative: torus grids disagree");
    if (point.radial_origin)
      throw std::invalid_argument("wick_square_relative: torus estimates need an explicit site");
  }
}

}  // namespace

double richardson_extrapolate(const std::vector<double>& spacings, const std::vector<double>& values,
                              double* last_increment) {
  const std::size_t m = values.size();
  if (m < 2 || spacings.size() != m)
    throw std::invalid_argument("richardson_extrapolate: need matching spacings and at least two values");
  std::vector<double> h2(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (spacings[i] <= 0.0) throw std::invalid_argument("richardson_extrapolate: spacings must be positive");
    h2[i] = spacings[i] * spacings[i];
  }
  std::vector<double> tab = values;
  double inc = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> next(m - k);
    for (std::size_t i = 0; i + k < m; ++i) {
      const double ratio = h2[i] / h2[i + k];
      if (std::abs(ratio - 1.0) < 1e-14)
        throw std::invalid_argument("richardson_extrapolate: repeated spacing");
      next[i] = (ratio * tab[i + 1] - tab[i]) / (ratio - 1.0);
    }
    inc = std::abs(next.back() - tab.back());
    tab = std::move(next);
  }
  if (last_increment) *last_increment = inc;
  return tab.back();
}

double dirichlet_wall_bias(double geodesic_radius) {
  if (geodesic_radius <= 0.0)
    throw std::invalid_argument("dirichlet_wall_bias: radius must be positive");
  return -1.0 / (48.0 * geodesic_radius * geodesic_radius);
}

double coincidence_difference(const SpectralDecomposition& model_dec, const StationaryState& state,
                              const SpectralDecomposition& ref_dec, const StationaryState& ref_state,
                              const EvalPoint& point) {
  return state_difference(model_dec, state, ref_dec, ref_state, point);
}

WickEstimate wick_square_relative(const SpatialOperator& model_op, const SpatialOperator& ref_op,
                                  const StationaryState& state, const StationaryState& ref_state,
                                  const EvalPoint& point, int levels) {
  if (levels < 2) throw std::invalid_argument("wick_square_relative: need at least two levels");
  check_pair(model_op, ref_op, state, ref_state, point);
  const double bias = wall_bias(model_op) - wall_bias(ref_op);

  WickEstimate out;
  out.point = point;
  for (int level = 0; level < levels; ++level) {
    const int factor = 1 << level;
    const SpatialOperator mop = (factor == 1) ? model_op : refine(model_op, factor);
    const SpatialOperator rop = (factor == 1) ? ref_op : refine(ref_op, factor);
    const SpectralDecomposition md = decompose(mop);
    const SpectralDecomposition rd = decompose(rop);
    double h;
    if (std::holds_alternative<RadialGrid>(mop.grid))
      h = std::get<RadialGrid>(mop.grid).spacing();
    else
      h = std::get<TorusGrid>(mop.grid).spacing();
    out.spacings.push_back(h);
    out.level_values.push_back(state_difference(md, state, rd, ref_state, point) - bias);
  }
  double inc = 0.0;
  out.value = richardson_extrapolate(out.spacings, out.level_values, &inc);
  out.error = std::max(inc, 1e-18);
  if (out.level_values.size() >= 3) {
    const auto& v = out.level_values;
    const double d1 = std::abs(v[v.size() - 2] - v[v.size() - 3]);
    const double d2 = std::abs(v[v.size() - 1] - v[v.size() - 2]);
    out.converged = d2 <= 0.6 * d1 + 1e-18;
  } else {
    out.converged = true;
  }
  return out;
}

WickEstimate wick_excess(const StationaryState& state, const SpectralDecomposition& dec,
                         const EvalPoint& point) {
  if (state.kind == StateKind::Ground)
    throw std::invalid_argument("wick_excess: the ground state has no excess over itself");
  Eigen::ArrayXd extra = state_weights(state, dec) - state_weights(StationaryState::ground(), dec);
  WickEstimate out;
  out.point = point;
  out.converged = true;
  if (is_radial(dec)) {
    if (!point.radial_origin)
      throw std::invalid_argument("wick_excess: radial lattices evaluate at the origin");
    constexpr Eigen::Index probe[3] = {1, 2, 3};
    std::vector<double> r2(3), dv(3);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Index i = probe[k];
      if (i >= dec.nodes()) throw std::invalid_argument("wick_excess: grid too small");
      const double r = dec.position[i];
      double d = diag_entry(dec, extra, i);
      if (dec.kernel_form == KernelForm::USubstitution) d /= 4.0 * pi * r * r;
      r2[k] = r * r;
      dv[k] = d;
    }
    const line_fit fit = fit_affine(r2, dv);
    out.value = fit.intercept;
    out.error = std::max({fit.sigma_intercept, std::abs(out.value) * 1e-13, 1e-18});
  } else {
    if (point.radial_origin)
      throw std::invalid_argument("wick_excess: torus lattices need an explicit site");
    if (point.site < 0 || point.site >= dec.nodes())
      throw std::invalid_argument("wick_excess: site out of range");
    out.value = diag_entry(dec, extra, point.site);
    out.error = std::max(std::abs(out.value) * 1e-13, 1e-18);
  }
  return out;
}

TemperatureReading local_temperature(const WickEstimate& estimate) {
  TemperatureReading out;
  out.w = estimate.value;
  if (estimate.value >= 0.0) {
    out.defined = true;
    out.temperature = std::sqrt(12.0 * estimate.value);
  } else {
    out.defined = false;
    out.temperature = 0.0;
  }
  return out;
}

BetaSweepResult beta_sweep(const SpectralDecomposition& dec, const std::vector<double>& betas,
                           const EvalPoint& point) {
  if (betas.size() < 2) throw std::invalid_argument("beta_sweep: need at least two temperatures");
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (!(betas[i] > betas[i - 1]))
      throw std::invalid_argument("beta_sweep: inverse temperatures must increase strictly");

  BetaSweepResult out;
  out.strictly_decreasing = true;
  out.tail_bound_ok = true;
  out.lipschitz_ok = true;

  std::map<double, double> quarter_cache;
  auto excess_at = [&](double beta) {
    return wick_excess(StationaryState::kms(beta), dec, point).value;
  };

  for (double beta : betas) {
    BetaSweepEntry entry;
    entry.beta = beta;
    entry.estimate = wick_excess(StationaryState::kms(beta), dec, point);
    entry.temperature = local_temperature(entry.estimate);
    out.entries.push_back(std::move(entry));
  }
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    const double wi = out.entries[i].estimate.value;
    const double bi = out.entries[i].beta;
    for (std::size_t j = i + 1; j < out.entries.size(); ++j) {
      const double wj = out.entries[j].estimate.value;
      const double bj = out.entries[j].beta;
      if (!(wj < wi)) out.strictly_decreasing = false;
      if (wj > wi * (bi / bj) * (1.0 + slack) + 1e-18) out.tail_bound_ok = false;
      auto it = quarter_cache.find(bi);
      if (it == quarter_cache.end()) it = quarter_cache.emplace(bi, excess_at(bi / 4.0)).first;
      const double bound = (2.0 / bi) * (bj - bi) * it->second * (1.0 + slack) + 1e-18;
      if (std::abs(wj - wi) > bound) out.lipschitz_ok = false;
    }
  }
  return out;
}

LapseCheck lapse_rescale_check(const SpatialOperator& op, double c, double beta,
                               const EvalPoint& point) {
  if (c <= 0.0) throw std::invalid_argument("lapse_rescale_check: scale must be positive");
  if (beta <= 0.0) throw std::invalid_argument("lapse_rescale_check: beta must be positive");
  LapseCheck out;
  out.c = c;
  out.beta = beta;
  const SpectralDecomposition base = decompose(op);
  out.w_base = wick_excess(StationaryState::kms(beta), base, point).value;
  const SpatialOperator scaled_op = scale_lapse(op, c);
  const SpectralDecomposition scaled = decompose(scaled_op);
  out.w_scaled = wick_excess(StationaryState::kms(c * beta), scaled, point).value;
  const double target = out.w_base / (c * c);
  out.residual = std::abs(out.w_scaled - target) / std::max(std::abs(target), 1e-300);
  out.pass = out.residual <= 1e-10;
  return out;
}

FitEstimate mass_coefficient_estimate(const SpatialOperator& op, const SpectralDecomposition& dec,
                                      const StationaryState& state, const FitWindow& window) {
  if (!std::holds_alternative<RadialGrid>(op.grid))
    throw std::invalid_argument("mass_coefficient_estimate: needs a radial lattice");
  if (!(window.lo > 0.0) || !(window.hi > window.lo))
    throw std::invalid_argument("mass_coefficient_estimate: window must satisfy 0 < lo < hi");
  const auto& grid = std::get<RadialGrid>(op.grid);
  const double h = grid.spacing();
  if (window.lo < 3.0 * h)
    throw std::invalid_argument("mass_coefficient_estimate: window starts below three spacings");
  if (op.meta.model && op.meta.model->variant != ConformalVariant::Unit &&
      !in_flat_region(*op.meta.model, window.hi, 0.0))
    throw std::invalid_argument("mass_coefficient_estimate: window extends beyond the flat region");
  if (dec.mode_sum || dec.position.size() != static_cast<Eigen::Index>(op.size()))
    throw std::invalid_argument("mass_coefficient_estimate: decomposition does not match the operator");

  // geodesic distance per coordinate unit at the origin chart
  double scale = 1.0;
  switch (op.meta.kind) {
    case AssemblyKind::RadialConformal:
      scale = op.meta.model ? conformal_factor(*op.meta.model, 0.0) : 1.0;
      scale *= scale;
      break;
    case AssemblyKind::RadialQuartic: {
      const double u0 = op.meta.shell ? shell_potential_eval(*op.meta.shell, 0.0) : 1.0;
      scale = u0 * u0;
      break;
    }
    case AssemblyKind::FlatBall:
      scale = op.meta.flat_factor * op.meta.flat_factor;
      break;
    default:
      throw std::invalid_argument("mass_coefficient_estimate: unsupported lattice kind");
  }

  const Eigen::ArrayXd f = state_weights(state, dec);
  constexpr Eigen::Index nsrc = 3;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < dec.nodes(); ++i) {
    const double r = dec.position[i];
    if (r >= window.lo && r <= window.hi) rows.push_back(i);
  }
  if (rows.size() < 6)
    throw std::invalid_argument("mass_coefficient_estimate: window too narrow for a stable fit");
  if (dec.nodes() < nsrc + 1)
    throw std::invalid_argument("mass_coefficient_estimate: grid too small");

  Eigen::MatrixXd src(nsrc, dec.modes());
  for (Eigen::Index k = 0; k < nsrc; ++k) src.row(k) = dec.eigenfunctions.row(k);
  Eigen::MatrixXd field(static_cast<Eigen::Index>(rows.size()), dec.modes());
  for (std::size_t k = 0; k < rows.size(); ++k) field.row(static_cast<Eigen::Index>(k)) = dec.eigenfunctions.row(rows[k]);
  const Eigen::MatrixXd block = field * f.matrix().asDiagonal() * src.transpose();

  std::vector<double> src_r2(nsrc);
  for (Eigen::Index k = 0; k < nsrc; ++k) {
    const double rs = dec.position[k];
    src_r2[k] = rs * rs;
  }

  std::vector<double> dist, y;
  dist.reserve(rows.size());
  y.reserve(rows.size());
  const bool usub = dec.kernel_form == KernelForm::USubstitution;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double r = dec.position[rows[k]];
    std::vector<double> g3(nsrc);
    for (Eigen::Index s = 0; s < nsrc; ++s) {
      double v = block(static_cast<Eigen::Index>(k), s);
      if (usub) v /= 4.0 * pi * r * dec.position[s];
      g3[static_cast<std::size_t>(s)] = v;
    }
    const double g0 = fit_affine(src_r2, g3).intercept;
    const double d = scale * r;
    dist.push_back(d);
    y.push_back(4.0 * pi * pi * g0 - 1.0 / (d * d));
  }

  auto fit_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> xs(dist.begin() + static_cast<std::ptrdiff_t>(lo),
                           dist.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<double> ys(y.begin() + static_cast<std::ptrdiff_t>(lo),
                           y.begin() + static_cast<std::ptrdiff_t>(hi));
    return fit_affine(xs, ys);
  };
  const line_fit full = fit_range(0, dist.size());
  const std::size_t half = dist.size() / 2;
  double window_var = 0.0;
  if (half >= 3 && dist.size() - half >= 3) {
    const double lower = fit_range(0, half).intercept;
    const double upper = fit_range(half, dist.size()).intercept;
    window_var = std::max(std::abs(lower - full.intercept), std::abs(upper - full.intercept));
  }

  FitEstimate out;
  out.w_fit = full.intercept / (4.0 * pi * pi);
  out.fit_error = std::max((window_var + full.sigma_intercept) / (4.0 * pi * pi), 1e-18);
  return out;
}

}  // namespace loctemp

#include "loctemp/operators.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace loctemp {

namespace {

constexpr double kPi = 3.14159265358979323846;

int read_dim_cap() {
  if (const char* s = std::getenv("LOCTEMP_MAX_DIM")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end && *end == '\0' && v >= 16) return int(v);
  }
  return 5000;
}

void check_dim(Eigen::Index n, const char* what) {
  if (n > max_matrix_dim())
    throw std::length_error(std::string(what) + ": matrix dimension " + std::to_string(n) +
                            " exceeds the resource cap " + std::to_string(max_matrix_dim()) +
                            " (set LOCTEMP_MAX_DIM to raise it)");
}

int sturm_count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double x) {
  const double pivmin = 1e-300;
  int count = 0;
  double p = d[0] - x;
  if (p < 0.0) ++count;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    double denom = p;
    if (std::abs(denom) < pivmin) denom = denom < 0.0 ? -pivmin : pivmin;
    p = (d[i] - x) - e[i - 1] * e[i - 1] / denom;
    if (p < 0.0) ++count;
  }
  return count;
}

double tridiagonal_smallest(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  const Eigen::Index n = d.size();
  if (n == 1) return d[0];
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(e[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(e[i]) : 0.0;
    lo = std::min(lo, d[i] - left - right);
    hi = std::max(hi, d[i] + left + right);
  }
  for (int iter = 0; iter < 120 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count_below(d, e, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double gershgorin_max(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  double hi = std::numeric_limits<double>::lowest();
  const Eigen::Index n = d.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(e[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(e[i]) : 0.0;
    hi = std::max(hi, std::abs(d[i]) + left + right);
  }
  return hi;
}

// Rejects operators whose smallest eigenvalue is not safely positive; the
// threshold is tied to the spectral scale so exact zero modes (compact
// manifold at xi = 0, massless torus) are caught reliably.
void require_positive(const SpatialOperator& op, const char* what) {
  double scale = 1.0;
  switch (op.form) {
    case OperatorForm::Dense:
      scale = op.dense.cwiseAbs().rowwise().sum().maxCoeff();
      break;
    case OperatorForm::Tridiagonal:
      scale = gershgorin_max(op.diag, op.offdiag);
      break;
    case OperatorForm::ModeSum:
      scale = 1.0;
      break;
  }
  const double lam_min = smallest_eigenvalue(op);
  if (!(lam_min > 1e-9 * scale))
    throw std::domain_error(std::string(what) +
                            ": assembled operator is not positive definite (smallest eigenvalue " +
                            std::to_string(lam_min) + "); a zero mode or indefinite potential is present");
}

int shell_node_count(const Eigen::ArrayXd& r, const ShellDensity& d) {
  int inside = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r[i] >= d.r_inner && r[i] <= d.r_outer) ++inside;
  return inside;
}

}  // namespace

int max_matrix_dim() {
  static const int cap = read_dim_cap();
  return cap;
}

SpatialOperator assemble_torus(const TorusGrid& grid, double potential_uniform, double mass) {
  if (grid.points_per_axis < 4 || !(grid.side > 0.0))
    throw std::invalid_argument("torus assembly: invalid grid");
  if (potential_uniform < 0.0) throw std::invalid_argument("torus assembly: potential must be non-negative");
  if (mass < 0.0) throw std::invalid_argument("torus assembly: mass must be non-negative");
  if (potential_uniform == 0.0 && mass == 0.0)
    throw std::domain_error("torus assembly: V = 0 with m = 0 leaves a zero mode; the inverse is undefined");
  SpatialOperator op;
  op.form = OperatorForm::ModeSum;
  op.kernel_form = KernelForm::PlainSite;
  const double h = grid.spacing();
  op.measure = Eigen::ArrayXd::Constant(grid.sites(), h * h * h);
  op.grid = grid;
  op.meta.kind = AssemblyKind::TorusUniform;
  op.meta.mass = mass;
  op.meta.potential_uniform = potential_uniform;
  return op;
}

SpatialOperator assemble_torus(const TorusGrid& grid, const Eigen::ArrayXd& potential, double mass) {
  if (grid.points_per_axis < 4 || !(grid.side > 0.0))
    throw std::invalid_argument("torus assembly: invalid grid");
  const int n_axis = grid.points_per_axis;
  const Eigen::Index sites = grid.sites();
  if (potential.size() != sites)
    throw std::invalid_argument("torus assembly: potential sample count does not match the grid");
  if ((potential < 0.0).any())
    throw std::invalid_argument("torus assembly: potential must be non-negative pointwise");
  if (mass < 0.0) throw std::invalid_argument("torus assembly: mass must be non-negative");
  if (mass == 0.0 && potential.maxCoeff() == 0.0)
    throw std::domain_error("torus assembly: V = 0 with m = 0 leaves a zero mode; the inverse is undefined");
  check_dim(sites, "torus assembly");

  SpatialOperator op;
  op.form = OperatorForm::Dense;
  op.kernel_form = KernelForm::PlainSite;
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  op.dense = Eigen::MatrixXd::Zero(sites, sites);
  auto site = [n_axis](int ix, int iy, int iz) {
    return (ix + n_axis) % n_axis + n_axis * (((iy + n_axis) % n_axis) + n_axis * ((iz + n_axis) % n_axis));
  };
  for (int iz = 0; iz < n_axis; ++iz)
    for (int iy = 0; iy < n_axis; ++iy)
      for (int ix = 0; ix < n_axis; ++ix) {
        const int i = site(ix, iy, iz);
        op.dense(i, i) = 6.0 * inv_h2 + potential[i] + mass * mass;
        op.dense(i, site(ix + 1, iy, iz)) -= inv_h2;
        op.dense(i, site(ix - 1, iy, iz)) -= inv_h2;
        op.dense(i, site(ix, iy + 1, iz)) -= inv_h2;
        op.dense(i, site(ix, iy - 1, iz)) -= inv_h2;
        op.dense(i, site(ix, iy, iz + 1)) -= inv_h2;
        op.dense(i, site(ix, iy, iz - 1)) -= inv_h2;
      }
  op.measure = Eigen::ArrayXd::Constant(sites, h * h * h);
  op.grid = grid;
  op.meta.kind = AssemblyKind::TorusSampled;
  op.meta.mass = mass;
  op.meta.potential = potential;
  require_positive(op, "torus assembly");
  return op;
}

SpatialOperator assemble_radial_conformal(const RadialGrid& grid, const ConformalFactorModel& model,
                                          double xi) {
  if (grid.boundary != RadialBoundary::Dirichlet)
    throw std::invalid_argument("radial conformal assembly: needs a Dirichlet grid; the quartic metric owns the two-chart form");
  if (model.variant == ConformalVariant::QuarticShell)
    throw std::invalid_argument("radial conformal assembly: quartic metric requires the two-chart assembly");
  const Eigen::Index n = grid.points - 1;
  if (n < 7) throw std::invalid_argument("radial conformal assembly: too few interior nodes");
  check_dim(n, "radial conformal assembly");
  const double h = grid.spacing();
  Eigen::ArrayXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r[i] = h * double(i + 1);
  if (model.variant != ConformalVariant::Unit) {
    const ShellDensity& d = model.potential.density;
    if (grid.r_max <= d.r_outer)
      throw std::invalid_argument("radial conformal assembly: domain must contain the shell");
    if (shell_node_count(r, d) < 16)
      throw std::invalid_argument("radial conformal assembly: fewer than 16 nodes resolve the shell");
  }

  SpatialOperator op;
  op.form = OperatorForm::Tridiagonal;
  op.kernel_form = KernelForm::USubstitution;
  op.diag.resize(n);
  op.offdiag.resize(n - 1);
  Eigen::ArrayXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) inv[i] = 1.0 / conformal_factor(model, r[i]);
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < n; ++i)
    op.diag[i] = 2.0 * inv_h2 * inv[i] * inv[i] + (xi - 0.125) * curvature_at(model, r[i]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) op.offdiag[i] = -inv_h2 * inv[i] * inv[i + 1];
  op.measure = Eigen::ArrayXd::Constant(n, h);
  op.position = r;
  op.grid = grid;
  op.meta.kind = AssemblyKind::RadialConformal;
  op.meta.xi = xi;
  op.meta.model = model;
  require_positive(op, "radial conformal assembly");
  return op;
}

SpatialOperator assemble_radial_quartic(const RadialGrid& grid, const ShellPotential& potential,
                                        double xi) {
  if (grid.boundary != RadialBoundary::TwoChart)
    throw std::invalid_argument("radial quartic assembly: needs a two-chart grid");
  if (!(xi >= 0.0) || xi > 1.0 / 6.0)
    throw std::invalid_argument("radial quartic assembly: curvature coupling must lie in (0, 1/6]");
  const double r_match = grid.r_max;
  if (r_match <= potential.density.r_outer)
    throw std::invalid_argument("radial quartic assembly: match radius must lie outside the shell");
  const int k = grid.points;
  const Eigen::Index n = 2 * Eigen::Index(k);
  check_dim(n, "radial quartic assembly");
  const double h = r_match / k;
  const double mu = potential.mu;
  const double s_match = mu * mu / r_match;
  const double hs = s_match / k;

  const ConformalFactorModel model = make_conformal_model(ConformalVariant::QuarticShell, potential);

  SpatialOperator op;
  op.form = OperatorForm::Tridiagonal;
  op.kernel_form = KernelForm::PlainSite;
  op.measure.resize(n);
  op.position.resize(n);
  Eigen::ArrayXd s_out(k);
  for (int i = 0; i < k; ++i) {
    const double r = (double(i) + 0.5) * h;
    const double u = potential(r);
    op.position[i] = r;
    op.measure[i] = 4.0 * kPi * std::pow(u, 6) * r * r * h;
  }
  for (int i = 0; i < k; ++i) {
    // outer chart nodes in descending s so positions ascend through the seam
    const double s = s_match - (double(i) + 0.5) * hs;
    s_out[i] = s;
    op.position[k + i] = mu * mu / s;
    op.measure[k + i] = 4.0 * kPi * s * s * hs;  // chart factor is 1 near infinity
  }
  {
    const ShellDensity& d = potential.density;
    if (shell_node_count(op.position.head(k), d) < 16)
      throw std::invalid_argument("radial quartic assembly: fewer than 16 nodes resolve the shell");
  }

  // face conductances; boundary faces at r = 0 and s = 0 carry none (closed manifold)
  Eigen::ArrayXd cond(n - 1);
  for (int i = 1; i < k; ++i) {
    const double f = double(i) * h;
    const double u = potential(f);
    cond[i - 1] = 4.0 * kPi * u * u * f * f / h;
  }
  {
    const double r_a = op.position[k - 1];
    const double r_b = op.position[k];
    const double u = potential(r_match);
    cond[k - 1] = 4.0 * kPi * u * u * r_match * r_match / (r_b - r_a);
  }
  for (int i = 1; i < k; ++i) {
    const double f = s_match - double(i) * hs;
    cond[k + i - 1] = 4.0 * kPi * f * f / hs;
  }

  op.diag.resize(n);
  op.offdiag.resize(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? cond[i - 1] : 0.0;
    const double right = i + 1 < n ? cond[i] : 0.0;
    double q = 0.0;
    if (i < k) q = xi * curvature_at(model, op.position[i]);
    op.diag[i] = q + (left + right) / op.measure[i];
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    op.offdiag[i] = -cond[i] / std::sqrt(op.measure[i] * op.measure[i + 1]);

  op.grid = grid;
  op.meta.kind = AssemblyKind::RadialQuartic;
  op.meta.xi = xi;
  op.meta.model = model;
  op.meta.shell = potential;
  require_positive(op, "radial quartic assembly");
  return op;
}

SpatialOperator assemble_flat_ball(int points, double spacing, double factor) {
  if (points < 8) throw std::invalid_argument("flat ball assembly: need at least 8 cells");
  if (!(spacing > 0.0) || !(factor > 0.0))
    throw std::invalid_argument("flat ball assembly: spacing and factor must be positive");
  const Eigen::Index n = points;
  check_dim(n, "flat ball assembly");
  const double h = spacing;
  const double c2 = factor * factor;
  const double c6 = c2 * c2 * c2;

  SpatialOperator op;
  op.form = OperatorForm::Tridiagonal;
  op.kernel_form = KernelForm::PlainSite;
  op.measure.resize(n);
  op.position.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (double(i) + 0.5) * h;
    op.position[i] = r;
    op.measure[i] = 4.0 * kPi * c6 * r * r * h;
  }
  Eigen::ArrayXd cond(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double f = double(i) * h;
    cond[i - 1] = 4.0 * kPi * c2 * f * f / h;
  }
  op.diag.resize(n);
  op.offdiag.resize(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? cond[i - 1] : 0.0;
    const double right = i + 1 < n ? cond[i] : 0.0;
    op.diag[i] = (left + right) / op.measure[i];
  }
  // Dirichlet at the outer face: flux against a zero ghost value half a cell away
  const double f_out = double(n) * h;
  op.diag[n - 1] += (4.0 * kPi * c2 * f_out * f_out / (0.5 * h)) / op.measure[n - 1];
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    op.offdiag[i] = -cond[i] / std::sqrt(op.measure[i] * op.measure[i + 1]);

  op.grid = RadialGrid{f_out, points, RadialBoundary::Dirichlet};
  op.meta.kind = AssemblyKind::FlatBall;
  op.meta.flat_factor = factor;
  require_positive(op, "flat ball assembly");
  return op;
}

SpatialOperator refine(const SpatialOperator& op, int factor) {
  if (factor < 2) throw std::invalid_argument("refine: factor must be at least 2");
  SpatialOperator out;
  switch (op.meta.kind) {
    case AssemblyKind::TorusUniform: {
      const auto& g = std::get<TorusGrid>(op.grid);
      out = assemble_torus(TorusGrid{g.side, g.points_per_axis * factor},
                           op.meta.potential_uniform, op.meta.mass);
      break;
    }
    case AssemblyKind::TorusSampled:
      throw std::invalid_argument("refine: sampled torus potentials carry no refinement prescription");
    case AssemblyKind::RadialConformal: {
      const auto& g = std::get<RadialGrid>(op.grid);
      out = assemble_radial_conformal(RadialGrid{g.r_max, g.points * factor, g.boundary},
                                      *op.meta.model, op.meta.xi);
      break;
    }
    case AssemblyKind::RadialQuartic: {
      const auto& g = std::get<RadialGrid>(op.grid);
      out = assemble_radial_quartic(RadialGrid{g.r_max, g.points * factor, g.boundary},
                                    *op.meta.shell, op.meta.xi);
      break;
    }
    case AssemblyKind::FlatBall: {
      const auto& g = std::get<RadialGrid>(op.grid);
      out = assemble_flat_ball(g.points * factor, g.spacing() / factor, op.meta.flat_factor);
      break;
    }
    default:
      throw std::logic_error("refine: unknown assembly kind");
  }
  if (op.meta.lapse != 1.0) out = scale_lapse(out, op.meta.lapse);
  return out;
}

SpatialOperator scale_lapse(const SpatialOperator& op, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale_lapse: factor must be positive");
  SpatialOperator out = op;
  const double inv_c2 = 1.0 / (c * c);
  switch (op.form) {
    case OperatorForm::Dense:
      out.dense *= inv_c2;
      break;
    case OperatorForm::Tridiagonal:
      out.diag *= inv_c2;
      out.offdiag *= inv_c2;
      break;
    case OperatorForm::ModeSum:
      break;
  }
  out.op_scale = op.op_scale * inv_c2;
  out.measure = op.measure * (c * c * c);
  out.meta.lapse = op.meta.lapse * c;
  return out;
}

double smallest_eigenvalue(const SpatialOperator& op) {
  switch (op.form) {
    case OperatorForm::ModeSum: {
      const double m = op.meta.mass;
      return op.op_scale * (m * m + op.meta.potential_uniform);
    }
    case OperatorForm::Tridiagonal:
      return tridiagonal_smallest(op.diag, op.offdiag);
    case OperatorForm::Dense: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense, Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff();
    }
  }
  throw std::logic_error("smallest_eigenvalue: bad form");
}

double measure_asymmetry(const SpatialOperator& op) {
  if (op.form != OperatorForm::Dense) return 0.0;
  const double scale = std::max(1e-300, op.dense.cwiseAbs().maxCoeff());
  return (op.dense - op.dense.transpose()).cwiseAbs().maxCoeff() / scale;
}

void dump_triplets(const SpatialOperator& op, std::ostream& os) {
  char buf[128];
  const Eigen::Index n = op.size();
  const char* form = op.form == OperatorForm::Dense      ? "dense"
                     : op.form == OperatorForm::Tridiagonal ? "tridiagonal"
                                                            : "modesum";
  os << "# spatial operator n=" << n << " form=" << form << "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "w %lld %.17g\n", static_cast<long long>(i), op.measure[i]);
    os << buf;
  }
  if (op.form == OperatorForm::Tridiagonal) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "a %lld %lld %.17g\n", static_cast<long long>(i),
                    static_cast<long long>(i), op.diag[i]);
      os << buf;
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      std::snprintf(buf, sizeof buf, "a %lld %lld %.17g\n", static_cast<long long>(i),
                    static_cast<long long>(i + 1), op.offdiag[i]);
      os << buf;
    }
  } else if (op.form == OperatorForm::Dense) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j)
        if (op.dense(i, j) != 0.0) {
          std::snprintf(buf, sizeof buf, "a %lld %lld %.17g\n", static_cast<long long>(i),
                        static_cast<long long>(j), op.dense(i, j));
          os << buf;
        }
  } else {
    os << "# closed-form spectrum; no matrix entries stored\n";
  }
}

}  // namespace loctemp

#include "loctemp/conformal.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace loctemp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Radial pieces entering both closed-form curvature expressions.
struct LocalData {
  double rho;
  double u;       // U(r)
  double uprime;  // U'(r)
};

LocalData local_data(const ShellPotential& p, double r) {
  return {density_at(p.density, r), p(r), shell_potential_derivative(p, r)};
}

}  // namespace

ConformalFactorModel make_conformal_model(ConformalVariant variant, const ShellPotential& p) {
  if (!(p.mu > 0.0) || !(p.nu > 0.0))
    throw std::invalid_argument("conformal model: potential moments must be positive");
  return {variant, p};
}

double conformal_factor(const ConformalFactorModel& m, double r) {
  switch (m.variant) {
    case ConformalVariant::Unit:
      return 1.0;
    case ConformalVariant::ExpNewton:
      return std::exp(m.potential.nu - m.potential(r));
    case ConformalVariant::AffineNewton:
      return 0.5 + m.potential(r) / (2.0 * m.potential.nu);
    case ConformalVariant::QuarticShell:
      return m.potential(r);
  }
  throw std::logic_error("conformal_factor: bad variant");
}

double curvature_at(const ConformalFactorModel& m, double r) {
  const ShellPotential& p = m.potential;
  switch (m.variant) {
    case ConformalVariant::Unit:
      return 0.0;
    case ConformalVariant::ExpNewton: {
      // log form with ln(factor) = nu - U: Laplacian of the log is 4 pi rho.
      const LocalData d = local_data(p, r);
      const double om = std::exp(p.nu - d.u);
      return -(16.0 * kPi * d.rho + 2.0 * d.uprime * d.uprime) / (om * om);
    }
    case ConformalVariant::AffineNewton: {
      const LocalData d = local_data(p, r);
      const double om = 0.5 + d.u / (2.0 * p.nu);
      const double om2 = om * om;
      return 8.0 * kPi * d.rho / (p.nu * om * om2) +
             d.uprime * d.uprime / (2.0 * p.nu * p.nu * om2 * om2);
    }
    case ConformalVariant::QuarticShell: {
      const LocalData d = local_data(p, r);
      const double u = d.u;
      return 32.0 * kPi * d.rho / (u * u * u * u * u);
    }
  }
  throw std::logic_error("curvature_at: bad variant");
}

namespace {

// factor, its radial derivative, and its flat Laplacian f'' + 2f'/r, all in
// closed form. Only meaningful for the smooth-factor variants (Unit, ExpNewton,
// AffineNewton); the quartic metric uses the fourth power and its own formula.
struct FactorJet {
  double om;
  double dom;
  double lap;
};

FactorJet factor_jet(const ConformalFactorModel& m, double r) {
  const ShellPotential& p = m.potential;
  const LocalData d = local_data(m.potential, r);
  switch (m.variant) {
    case ConformalVariant::Unit:
      return {1.0, 0.0, 0.0};
    case ConformalVariant::ExpNewton: {
      // Omega = exp(nu-U): Omega' = -U' Omega, Lap Omega = (4 pi rho + U'^2) Omega
      const double om = std::exp(p.nu - d.u);
      return {om, -d.uprime * om, (4.0 * kPi * d.rho + d.uprime * d.uprime) * om};
    }
    case ConformalVariant::AffineNewton: {
      // Omega = 1/2 + U/(2 nu): Lap Omega = Lap U/(2 nu) = -2 pi rho / nu
      const double om = 0.5 + d.u / (2.0 * p.nu);
      return {om, d.uprime / (2.0 * p.nu), -2.0 * kPi * d.rho / p.nu};
    }
    default:
      throw std::invalid_argument("factor jet: smooth-factor variant required");
  }
}

double check_shell_resolution(const ConformalFactorModel& m, const Eigen::ArrayXd& r,
                              int min_shell_points) {
  if (r.size() < 2) throw std::invalid_argument("curvature grid: need at least 2 samples");
  const ShellDensity& d = m.potential.density;
  int inside = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r[i] >= d.r_inner && r[i] <= d.r_outer) ++inside;
  if (m.variant != ConformalVariant::Unit && inside < min_shell_points)
    throw std::invalid_argument("curvature grid: shell support resolved by fewer than the required minimum of samples");
  // mean spacing doubles as the flat-region clearance unit
  return (r[r.size() - 1] - r[0]) / double(r.size() - 1);
}

CurvatureField build_field(const ConformalFactorModel& m, const Eigen::ArrayXd& r,
                           int min_shell_points,
                           const std::function<double(double)>& curv) {
  const double spacing = check_shell_resolution(m, r, min_shell_points);
  CurvatureField f;
  f.r = r;
  f.samples.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) f.samples[i] = curv(r[i]);
  const double clearance = 2.0 * spacing;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (in_flat_region(m, r[i], clearance)) f.flat_region.push_back(int(i));
  return f;
}

double curvature_log_form(const ConformalFactorModel& m, double r) {
  // R = -4 Om^-2 Lap(ln Om) - 2 Om^-2 |grad ln Om|^2 for the metric Om^2 delta
  const FactorJet j = factor_jet(m, r);
  const double dlog = j.dom / j.om;
  const double laplog = j.lap / j.om - dlog * dlog;
  return (-4.0 * laplog - 2.0 * dlog * dlog) / (j.om * j.om);
}

double curvature_direct_form(const ConformalFactorModel& m, double r) {
  // R = -4 Om^-3 Lap(Om) + 2 Om^-4 |grad Om|^2, same metric convention
  const FactorJet j = factor_jet(m, r);
  const double om2 = j.om * j.om;
  return -4.0 * j.lap / (om2 * j.om) + 2.0 * j.dom * j.dom / (om2 * om2);
}

}  // namespace

CurvatureField curvature_log_conformal(const ConformalFactorModel& m,
                                       const Eigen::ArrayXd& r, int min_shell_points) {
  if (m.variant == ConformalVariant::QuarticShell)
    throw std::invalid_argument("log-form curvature: variant carries a quartic metric; use curvature_quartic");
  return build_field(m, r, min_shell_points,
                     [&](double x) { return curvature_log_form(m, x); });
}

CurvatureField curvature_affine_conformal(const ConformalFactorModel& m,
                                          const Eigen::ArrayXd& r, int min_shell_points) {
  if (m.variant == ConformalVariant::QuarticShell)
    throw std::invalid_argument("direct-form curvature: variant carries a quartic metric; use curvature_quartic");
  return build_field(m, r, min_shell_points,
                     [&](double x) { return curvature_direct_form(m, x); });
}

CurvatureField curvature_quartic(const ConformalFactorModel& m,
                                 const Eigen::ArrayXd& r, int min_shell_points) {
  if (m.variant != ConformalVariant::QuarticShell)
    throw std::invalid_argument("quartic curvature: variant must carry the quartic metric");
  return build_field(m, r, min_shell_points,
                     [&](double x) { return curvature_at(m, x); });
}

CurvatureField curvature_field(const ConformalFactorModel& m,
                               const Eigen::ArrayXd& r, int min_shell_points) {
  return build_field(m, r, min_shell_points,
                     [&](double x) { return curvature_at(m, x); });
}

bool in_flat_region(const ConformalFactorModel& m, double r, double clearance) {
  const ShellDensity& d = m.potential.density;
  switch (m.variant) {
    case ConformalVariant::Unit:
      return true;
    case ConformalVariant::ExpNewton:
    case ConformalVariant::AffineNewton:
      // curvature decays like r^-4 outside but never vanishes there; only the
      // interior of the shell is exactly flat
      return r <= d.r_inner - clearance;
    case ConformalVariant::QuarticShell:
      return r <= d.r_inner - clearance || r >= d.r_outer + clearance;
  }
  return false;
}

void write_curvature_csv(const CurvatureField& f, std::ostream& os) {
  os << "r,R\n";
  char buf[64];
  for (Eigen::Index i = 0; i < f.r.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.r[i], f.samples[i]);
    os << buf;
  }
}

}  // namespace loctemp

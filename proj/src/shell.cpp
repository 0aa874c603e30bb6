#include "loctemp/shell.hpp"

#include <cmath>
#include <stdexcept>

namespace loctemp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Antiderivative of (c + s*v)^2 (1 - v^2)^2 in v, for the bump profile.
double bump_antideriv2(double c, double s, double v) {
  const double c0 = c * c;
  const double c1 = 2.0 * c * s;
  const double c2 = s * s - 2.0 * c * c;
  const double c3 = -4.0 * c * s;
  const double c4 = c * c - 2.0 * s * s;
  const double c5 = 2.0 * c * s;
  const double c6 = s * s;
  double acc = c6 / 7.0;
  acc = acc * v + c5 / 6.0;
  acc = acc * v + c4 / 5.0;
  acc = acc * v + c3 / 4.0;
  acc = acc * v + c2 / 3.0;
  acc = acc * v + c1 / 2.0;
  acc = acc * v + c0;
  return acc * v;
}

// Antiderivative of (c + s*v) (1 - v^2)^2 in v.
double bump_antideriv1(double c, double s, double v) {
  double acc = s / 6.0;
  acc = acc * v + c / 5.0;
  acc = acc * v - 2.0 * s / 4.0;
  acc = acc * v - 2.0 * c / 3.0;
  acc = acc * v + s / 2.0;
  acc = acc * v + c;
  return acc * v;
}

double bump_u(const ShellDensity& d, double r) {
  const double c = 0.5 * (d.r_inner + d.r_outer);
  const double s = 0.5 * (d.r_outer - d.r_inner);
  return (r - c) / s;
}

// 4*pi*int_{r}^{r_outer} t rho(t) dt
double tail_integral(const ShellDensity& d, double r) {
  if (r >= d.r_outer) return 0.0;
  if (d.profile == ShellProfile::Uniform) {
    const double lo = std::max(r, d.r_inner);
    return 2.0 * kPi * d.amplitude * (d.r_outer * d.r_outer - lo * lo);
  }
  const double c = 0.5 * (d.r_inner + d.r_outer);
  const double s = 0.5 * (d.r_outer - d.r_inner);
  const double u = std::max(bump_u(d, r), -1.0);
  return 4.0 * kPi * d.amplitude * s *
         (bump_antideriv1(c, s, 1.0) - bump_antideriv1(c, s, u));
}

}  // namespace

ShellDensity make_shell_density(double r_inner, double r_outer, double amplitude,
                                ShellProfile profile) {
  if (r_inner <= 0.0) throw std::invalid_argument("shell: r_inner must be > 0");
  if (r_outer <= r_inner) throw std::invalid_argument("shell: r_outer must exceed r_inner");
  if (amplitude <= 0.0) throw std::invalid_argument("shell: amplitude must be > 0");
  return ShellDensity{r_inner, r_outer, amplitude, profile};
}

double density_at(const ShellDensity& d, double r) {
  if (d.profile == ShellProfile::Uniform) {
    if (r > d.r_inner && r < d.r_outer) return d.amplitude;
    // half value exactly on a seam so that cell averages stay second order
    if (r == d.r_inner || r == d.r_outer) return 0.5 * d.amplitude;
    return 0.0;
  }
  const double u = bump_u(d, r);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return d.amplitude * q * q;
}

double enclosed_mass(const ShellDensity& d, double r) {
  if (r <= d.r_inner) return 0.0;
  if (d.profile == ShellProfile::Uniform) {
    const double hi = std::min(r, d.r_outer);
    return 4.0 * kPi / 3.0 * d.amplitude *
           (hi * hi * hi - d.r_inner * d.r_inner * d.r_inner);
  }
  const double c = 0.5 * (d.r_inner + d.r_outer);
  const double s = 0.5 * (d.r_outer - d.r_inner);
  const double u = std::min(bump_u(d, r), 1.0);
  return 4.0 * kPi * d.amplitude * s *
         (bump_antideriv2(c, s, u) - bump_antideriv2(c, s, -1.0));
}

ShellMoments shell_moments(const ShellDensity& d) {
  make_shell_density(d.r_inner, d.r_outer, d.amplitude, d.profile);
  return ShellMoments{enclosed_mass(d, d.r_outer), tail_integral(d, 0.0)};
}

ShellPotential make_shell_potential(const ShellDensity& d) {
  const ShellMoments m = shell_moments(d);
  return ShellPotential{d, m.mu, m.nu};
}

double ShellPotential::operator()(double r) const { return shell_potential_eval(*this, r); }

double shell_potential_eval(const ShellPotential& p, double r) {
  if (r < 0.0) throw std::invalid_argument("shell potential: r must be >= 0");
  if (r <= p.density.r_inner) return p.nu;
  if (r >= p.density.r_outer) return p.mu / r;
  return enclosed_mass(p.density, r) / r + tail_integral(p.density, r);
}

double shell_potential_derivative(const ShellPotential& p, double r) {
  if (r < 0.0) throw std::invalid_argument("shell potential: r must be >= 0");
  if (r <= p.density.r_inner) return 0.0;
  return -enclosed_mass(p.density, r) / (r * r);
}

Eigen::ArrayXd density_samples(const ShellDensity& d, const Eigen::ArrayXd& r) {
  return r.unaryExpr([&](double x) { return density_at(d, x); });
}

Eigen::ArrayXd potential_samples(const ShellPotential& p, const Eigen::ArrayXd& r) {
  return r.unaryExpr([&](double x) { return shell_potential_eval(p, x); });
}

}  // namespace loctemp

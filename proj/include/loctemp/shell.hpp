#pragma once

#include <Eigen/Dense>

namespace loctemp {

enum class ShellProfile { Uniform, Bump };

// Spherically symmetric matter density supported on [r_inner, r_outer].
// Uniform: constant amplitude on the shell (seam samples take the half value).
// Bump: amplitude * (1 - u^2)^2 with u the normalized offset from the shell
// center, C^1 at the seams; used where smoothness matters.
struct ShellDensity {
  double r_inner = 1.0;
  double r_outer = 2.0;
  double amplitude = 3.0 / (28.0 * 3.14159265358979323846);
  ShellProfile profile = ShellProfile::Uniform;
};

ShellDensity make_shell_density(double r_inner, double r_outer, double amplitude,
                                ShellProfile profile = ShellProfile::Uniform);

double density_at(const ShellDensity& d, double r);

// mass mu = integral of rho over space, nu = integral of rho(x)/|x|
struct ShellMoments {
  double mu;
  double nu;
};

ShellMoments shell_moments(const ShellDensity& d);

// enclosed mass 4*pi*int_0^r t^2 rho(t) dt, in closed form
double enclosed_mass(const ShellDensity& d, double r);

struct ShellPotential {
  ShellDensity density;
  double mu = 0.0;
  double nu = 0.0;
  double operator()(double r) const;
};

ShellPotential make_shell_potential(const ShellDensity& d);

// U(r): equals nu for r <= r_inner, mu/r for r >= r_outer, monotone in between
double shell_potential_eval(const ShellPotential& p, double r);
double shell_potential_derivative(const ShellPotential& p, double r);

Eigen::ArrayXd density_samples(const ShellDensity& d, const Eigen::ArrayXd& r);
Eigen::ArrayXd potential_samples(const ShellPotential& p, const Eigen::ArrayXd& r);

}  // namespace loctemp

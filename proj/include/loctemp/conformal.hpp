#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "loctemp/shell.hpp"

namespace loctemp {

// Spatial metric is Omega^2 * delta_ij where Omega is the variant's factor,
// except QuarticShell, which stores factor = U and carries the metric
// U^4 * delta_ij (i.e. Omega = U^2):
//   Unit          factor = 1
//   ExpNewton     factor = exp(nu - U),   >= 1, equal to 1 inside the shell
//   AffineNewton  factor = 1/2 + U/(2 nu), in [1/2, 1], equal to 1 inside
//   QuarticShell  factor = U itself, flat inside and outside the shell
enum class ConformalVariant { Unit, ExpNewton, AffineNewton, QuarticShell };

struct ConformalFactorModel {
  ConformalVariant variant = ConformalVariant::Unit;
  ShellPotential potential{};
};

ConformalFactorModel make_conformal_model(ConformalVariant variant, const ShellPotential& p);

double conformal_factor(const ConformalFactorModel& m, double r);

// Scalar curvature of the model metric at radius r, closed form.
double curvature_at(const ConformalFactorModel& m, double r);

struct CurvatureField {
  Eigen::ArrayXd r;
  Eigen::ArrayXd samples;
  std::vector<int> flat_region;  // indices where R = 0 and the metric is flat
};

// Sampled curvature with flat-region tagging. Throws when fewer than
// min_shell_points samples fall inside the shell support.
CurvatureField curvature_log_conformal(const ConformalFactorModel& m,
                                       const Eigen::ArrayXd& r, int min_shell_points = 16);
CurvatureField curvature_affine_conformal(const ConformalFactorModel& m,
                                          const Eigen::ArrayXd& r, int min_shell_points = 16);
CurvatureField curvature_quartic(const ConformalFactorModel& m,
                                 const Eigen::ArrayXd& r, int min_shell_points = 16);
CurvatureField curvature_field(const ConformalFactorModel& m,
                               const Eigen::ArrayXd& r, int min_shell_points = 16);

// True where the metric is exactly flat with margin grid spacings of clearance
// from the shell support.
bool in_flat_region(const ConformalFactorModel& m, double r, double clearance);

void write_curvature_csv(const CurvatureField& f, std::ostream& os);

}  // namespace loctemp

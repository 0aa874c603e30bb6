#pragma once

#include <optional>
#include <ostream>
#include <variant>

#include <Eigen/Dense>

#include "loctemp/conformal.hpp"
#include "loctemp/grids.hpp"

namespace loctemp {

enum class OperatorForm {
  Dense,
  Tridiagonal,
  ModeSum  // uniform-potential torus: spectrum is known in closed form, no matrix stored
};

// How node values of a kernel built from this operator relate to the physical
// two-point kernel G3.
enum class KernelForm {
  PlainSite,      // node value is already G3 (torus sites, cell-centered radial charts)
  USubstitution   // G3(r,r') = K(r,r') / (4 pi r r') after the u = r*phi reduction
};

enum class AssemblyKind { TorusUniform, TorusSampled, RadialConformal, RadialQuartic, FlatBall };

struct OperatorMetadata {
  AssemblyKind kind = AssemblyKind::TorusUniform;
  double xi = 0.0;
  double mass = 0.0;
  double potential_uniform = 0.0;             // TorusUniform
  Eigen::ArrayXd potential;                   // TorusSampled per-site values
  std::optional<ConformalFactorModel> model;  // radial assemblies
  std::optional<ShellPotential> shell;        // RadialQuartic
  double flat_factor = 1.0;                   // FlatBall constant conformal factor
  double lapse = 1.0;                         // accumulated constant-lapse rescaling
};

// Discretized spatial Klein-Gordon operator. The stored matrix lives in the
// half-density frame W^{1/2} A W^{-1/2}, which is plainly symmetric; measure
// holds the positive node weights W. Euclidean-orthonormal eigenvectors of the
// stored matrix become measure-orthonormal eigenfunctions after dividing by
// sqrt(measure).
struct SpatialOperator {
  OperatorForm form = OperatorForm::Dense;
  KernelForm kernel_form = KernelForm::PlainSite;
  Eigen::MatrixXd dense;    // Dense form only
  Eigen::VectorXd diag;     // Tridiagonal form
  Eigen::VectorXd offdiag;  // Tridiagonal form, size n-1
  Eigen::ArrayXd measure;
  Eigen::ArrayXd position;  // radial node coordinates; empty for torus forms
  std::variant<TorusGrid, RadialGrid> grid;
  OperatorMetadata meta;
  double op_scale = 1.0;  // lapse rescaling factor applied to the ModeSum spectrum

  Eigen::Index size() const { return measure.size(); }
};

// Matrix-dimension resource cap; override with the LOCTEMP_MAX_DIM environment
// variable.
int max_matrix_dim();

// Periodic 7-point Laplacian plus diagonal potential, uniform measure h^3.
// The uniform-potential overload keeps the closed-form spectrum (no matrix);
// the sampled overload builds the dense matrix.
SpatialOperator assemble_torus(const TorusGrid& grid, double potential_uniform, double mass);
SpatialOperator assemble_torus(const TorusGrid& grid, const Eigen::ArrayXd& potential, double mass);

// s-wave operator on u = r*phi over interior nodes i*h with Dirichlet ends:
// A = F^{-1}(-d^2/dr^2)F^{-1} + (xi - 1/8) R, measure dr. Accepts the
// smooth-factor variants (Unit, ExpNewton, AffineNewton).
SpatialOperator assemble_radial_conformal(const RadialGrid& grid, const ConformalFactorModel& model,
                                          double xi);

// Compactified two-chart s-wave operator for the quartic shell metric U^4 delta:
// cell-centered divergence form with measure 4 pi U^6 r^2 dr on the inner chart,
// the inverted flat chart outside, flux matching at r_max, and potential xi*R.
// xi must lie in (0, 1/6]: at xi = 0 the compact manifold carries a zero mode.
SpatialOperator assemble_radial_quartic(const RadialGrid& grid, const ShellPotential& potential,
                                        double xi);

// Cell-centered flat reference ball with constant conformal factor, natural
// centre and Dirichlet outer face; measure 4 pi factor^6 r^2 dr.
SpatialOperator assemble_flat_ball(int points, double spacing, double factor);

// Same model, factor-times more points.
SpatialOperator refine(const SpatialOperator& op, int factor);

// Constant-lapse rescaling: matrix / c^2, measure * c^3.
SpatialOperator scale_lapse(const SpatialOperator& op, double c);

double smallest_eigenvalue(const SpatialOperator& op);
double measure_asymmetry(const SpatialOperator& op);
void dump_triplets(const SpatialOperator& op, std::ostream& os);

}  // namespace loctemp

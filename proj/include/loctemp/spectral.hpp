#pragma once

#include <string>

#include <Eigen/Dense>

#include "loctemp/operators.hpp"

namespace loctemp {

// Full eigensystem of a SpatialOperator in the measure frame: eigenfunctions
// are measure-orthonormal (sum_x w_x psi_i(x) psi_j(x) = delta_ij). ModeSum
// operators keep only the closed-form spectrum; their eigenfunction moduli are
// uniform, so diagonal kernel evaluations remain available.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;     // ascending, strictly positive
  Eigen::MatrixXd eigenfunctions;  // measure-orthonormal columns; empty when mode_sum
  Eigen::ArrayXd measure;
  Eigen::ArrayXd position;  // radial node coordinates when applicable
  KernelForm kernel_form = KernelForm::PlainSite;
  double residual = 0.0;  // max_i ||A v_i - lambda_i v_i|| / lambda_max
  bool mode_sum = false;
  double total_measure = 0.0;

  Eigen::Index modes() const { return eigenvalues.size(); }
  Eigen::Index nodes() const { return measure.size(); }
};

struct KernelMatrix {
  Eigen::MatrixXd values;  // symmetric kernel K(x,y) against the node measure
  std::string state_tag;
};

SpectralDecomposition decompose(const SpatialOperator& op);

// Planck occupation (e^{beta k} - 1)^{-1}, stable across all beta*k regimes.
double bose_factor(double beta, double k);

// per-mode spectral weights applied to eigenvalue lambda = omega^2
double ground_weight(double lambda);
double excess_weight(double beta, double lambda);
double thermal_weight(double beta, double lambda);

// Truncated Matsubara frequency sum (1/beta) sum_{|n| <= terms} (omega_n^2 +
// lambda)^{-1}, omega_n = 2 pi n / beta, plus a midpoint tail estimate;
// converges to thermal_weight(beta, lambda) as terms grows.
double matsubara_thermal_weight(double beta, double lambda, int terms);

KernelMatrix ground_kernel(const SpectralDecomposition& dec);
KernelMatrix thermal_kernel(const SpectralDecomposition& dec, double beta);
KernelMatrix excess_kernel(const SpectralDecomposition& dec, double beta);
KernelMatrix green_kernel(const SpectralDecomposition& dec);  // kernel of A^{-1}

// Diagonal-only kernel evaluations; these also accept mode-sum decompositions.
Eigen::ArrayXd ground_diagonal(const SpectralDecomposition& dec);
Eigen::ArrayXd excess_diagonal(const SpectralDecomposition& dec, double beta);
Eigen::ArrayXd thermal_diagonal(const SpectralDecomposition& dec, double beta);

}  // namespace loctemp

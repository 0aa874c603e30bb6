#pragma once

#include <Eigen/Dense>

#include "loctemp/spectral.hpp"

namespace loctemp {

enum class StateKind { Ground, KMS, Perturbed };

// Stationary Gaussian state descriptor. Perturbed states sit above the
// ground state by non-negative per-mode occupations n(omega_i), ordered like
// the decomposition's eigenvalues.
struct StationaryState {
  StateKind kind = StateKind::Ground;
  double beta = 0.0;
  Eigen::ArrayXd occupations;

  static StationaryState ground() { return {}; }
  static StationaryState kms(double beta);
  static StationaryState perturbed(const Eigen::ArrayXd& occupations);
};

// per-mode weights f_i so the state's equal-time kernel is sum_i f_i psi_i psi_i
Eigen::ArrayXd state_weights(const StationaryState& s, const SpectralDecomposition& dec);

KernelMatrix state_kernel(const StationaryState& s, const SpectralDecomposition& dec);
Eigen::ArrayXd state_diagonal(const StationaryState& s, const SpectralDecomposition& dec);

}  // namespace loctemp

#include "loctemp/states.hpp"

#include <cmath>
#include <stdexcept>

namespace loctemp {

StationaryState StationaryState::kms(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("kms state: beta must be positive");
  StationaryState s;
  s.kind = StateKind::KMS;
  s.beta = beta;
  return s;
}

StationaryState StationaryState::perturbed(const Eigen::ArrayXd& occupations) {
  if ((occupations < 0.0).any())
    throw std::invalid_argument("perturbed state: occupations must be non-negative");
  StationaryState s;
  s.kind = StateKind::Perturbed;
  s.occupations = occupations;
  return s;
}

namespace {

Eigen::ArrayXd perturbation_weights(const StationaryState& s, const SpectralDecomposition& dec) {
  if (s.occupations.size() != dec.modes())
    throw std::invalid_argument("perturbed state: occupation count does not match the mode count");
  Eigen::ArrayXd f(dec.modes());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f[i] = s.occupations[i] / std::sqrt(dec.eigenvalues[i]);
  return f;
}

}  // namespace

Eigen::ArrayXd state_weights(const StationaryState& s, const SpectralDecomposition& dec) {
  Eigen::ArrayXd f(dec.modes());
  switch (s.kind) {
    case StateKind::Ground:
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = ground_weight(dec.eigenvalues[i]);
      return f;
    case StateKind::KMS:
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = thermal_weight(s.beta, dec.eigenvalues[i]);
      return f;
    case StateKind::Perturbed: {
      const Eigen::ArrayXd extra = perturbation_weights(s, dec);
      for (Eigen::Index i = 0; i < f.size(); ++i)
        f[i] = ground_weight(dec.eigenvalues[i]) + extra[i];
      return f;
    }
  }
  throw std::logic_error("state_weights: bad state kind");
}

KernelMatrix state_kernel(const StationaryState& s, const SpectralDecomposition& dec) {
  switch (s.kind) {
    case StateKind::Ground:
      return ground_kernel(dec);
    case StateKind::KMS:
      return thermal_kernel(dec, s.beta);
    case StateKind::Perturbed: {
      // ground part plus the occupation excess, kept as an exact sum so the
      // difference to the ground kernel is positive semi-definite by
      // construction
      KernelMatrix k = ground_kernel(dec);
      const Eigen::ArrayXd extra = perturbation_weights(s, dec);
      const Eigen::MatrixXd scaled = dec.eigenfunctions * extra.sqrt().matrix().asDiagonal();
      Eigen::MatrixXd bump = Eigen::MatrixXd::Zero(k.values.rows(), k.values.cols());
      bump.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
      bump.triangularView<Eigen::StrictlyUpper>() =
          bump.triangularView<Eigen::StrictlyLower>().transpose();
      k.values += bump;
      k.state_tag = "perturbed";
      return k;
    }
  }
  throw std::logic_error("state_kernel: bad state kind");
}

Eigen::ArrayXd state_diagonal(const StationaryState& s, const SpectralDecomposition& dec) {
  switch (s.kind) {
    case StateKind::Ground:
      return ground_diagonal(dec);
    case StateKind::KMS:
      return thermal_diagonal(dec, s.beta);
    case StateKind::Perturbed: {
      const Eigen::ArrayXd extra = perturbation_weights(s, dec);
      Eigen::ArrayXd out = ground_diagonal(dec);
      if (dec.mode_sum) return out + extra.sum() / dec.total_measure;
      out += (dec.eigenfunctions.array().square().matrix() * extra.matrix()).array();
      return out;
    }
  }
  throw std::logic_error("state_diagonal: bad state kind");
}

}  // namespace loctemp

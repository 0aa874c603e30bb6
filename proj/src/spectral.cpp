#include "loctemp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loctemp {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd mode_sum_eigenvalues(const SpatialOperator& op) {
  const auto& g = std::get<TorusGrid>(op.grid);
  const int n_axis = g.points_per_axis;
  const double h = g.spacing();
  const double base = op.meta.mass * op.meta.mass + op.meta.potential_uniform;
  Eigen::ArrayXd axis(n_axis);
  for (int n = 0; n < n_axis; ++n) {
    const double s = std::sin(kPi * double(n) / double(n_axis));
    axis[n] = (2.0 / h) * (2.0 / h) * s * s;
  }
  Eigen::VectorXd lam(g.sites());
  Eigen::Index idx = 0;
  for (int nz = 0; nz < n_axis; ++nz)
    for (int ny = 0; ny < n_axis; ++ny)
      for (int nx = 0; nx < n_axis; ++nx)
        lam[idx++] = op.op_scale * (base + axis[nx] + axis[ny] + axis[nz]);
  std::sort(lam.data(), lam.data() + lam.size());
  return lam;
}

double tridiagonal_residual(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                            const Eigen::VectorXd& lam, const Eigen::MatrixXd& q) {
  const Eigen::Index n = d.size();
  double worst = 0.0;
  Eigen::VectorXd av(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& v = q.col(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = d[i] * v[i];
      if (i > 0) s += e[i - 1] * v[i - 1];
      if (i + 1 < n) s += e[i] * v[i + 1];
      av[i] = s;
    }
    worst = std::max(worst, (av - lam[k] * v).norm());
  }
  return worst / std::max(1e-300, lam[n - 1]);
}

}  // namespace

SpectralDecomposition decompose(const SpatialOperator& op) {
  SpectralDecomposition dec;
  dec.measure = op.measure;
  dec.position = op.position;
  dec.kernel_form = op.kernel_form;
  dec.total_measure = op.measure.sum();

  switch (op.form) {
    case OperatorForm::ModeSum: {
      dec.eigenvalues = mode_sum_eigenvalues(op);
      dec.mode_sum = true;
      dec.residual = 0.0;
      break;
    }
    case OperatorForm::Tridiagonal: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(op.diag, op.offdiag, Eigen::ComputeEigenvectors);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("decompose: tridiagonal eigensolver failed to converge");
      dec.eigenvalues = es.eigenvalues();
      dec.residual = tridiagonal_residual(op.diag, op.offdiag, dec.eigenvalues, es.eigenvectors());
      dec.eigenfunctions = es.eigenvectors();
      for (Eigen::Index i = 0; i < dec.eigenfunctions.rows(); ++i)
        dec.eigenfunctions.row(i) /= std::sqrt(op.measure[i]);
      break;
    }
    case OperatorForm::Dense: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("decompose: dense eigensolver failed to converge");
      dec.eigenvalues = es.eigenvalues();
      const Eigen::MatrixXd resid =
          op.dense * es.eigenvectors() - es.eigenvectors() * dec.eigenvalues.asDiagonal();
      dec.residual = resid.colwise().norm().maxCoeff() /
                     std::max(1e-300, dec.eigenvalues[dec.eigenvalues.size() - 1]);
      dec.eigenfunctions = es.eigenvectors();
      for (Eigen::Index i = 0; i < dec.eigenfunctions.rows(); ++i)
        dec.eigenfunctions.row(i) /= std::sqrt(op.measure[i]);
      break;
    }
  }
  if (!(dec.eigenvalues[0] > 0.0))
    throw std::domain_error("decompose: operator is not positive definite (smallest eigenvalue " +
                            std::to_string(dec.eigenvalues[0]) + ")");
  return dec;
}

double bose_factor(double beta, double k) {
  if (!(beta > 0.0)) throw std::invalid_argument("bose_factor: beta must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("bose_factor: energy must be positive");
  const double x = beta * k;
  if (x > 700.0) return std::exp(-x);
  return 1.0 / std::expm1(x);
}

double ground_weight(double lambda) { return 0.5 / std::sqrt(lambda); }

double excess_weight(double beta, double lambda) {
  const double omega = std::sqrt(lambda);
  return bose_factor(beta, omega) / omega;
}

double thermal_weight(double beta, double lambda) {
  return ground_weight(lambda) + excess_weight(beta, lambda);
}

double matsubara_thermal_weight(double beta, double lambda, int terms) {
  if (!(beta > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("matsubara weight: beta and lambda must be positive");
  if (terms < 1) throw std::invalid_argument("matsubara weight: need at least one frequency");
  const double w0 = 2.0 * kPi / beta;
  double sum = 1.0 / lambda;
  for (int n = 1; n <= terms; ++n) {
    const double wn = w0 * double(n);
    sum += 2.0 / (wn * wn + lambda);
  }
  // midpoint estimate of the remaining tail, summed over both signs
  const double root = std::sqrt(lambda);
  const double x0 = w0 * (double(terms) + 0.5);
  const double tail = (kPi / 2.0 - std::atan(x0 / root)) / (kPi * root);
  return sum / beta + tail;
}

namespace {

void check_kernel_dim(Eigen::Index n) {
  if (n > max_matrix_dim())
    throw std::length_error("kernel assembly: dimension " + std::to_string(n) +
                            " exceeds the resource cap (set LOCTEMP_MAX_DIM to raise it)");
}

KernelMatrix kernel_from_weights(const SpectralDecomposition& dec, const Eigen::ArrayXd& f,
                                 const std::string& tag) {
  if (dec.mode_sum)
    throw std::invalid_argument(
        "kernel assembly: mode-sum decomposition stores no eigenfunctions; use the diagonal "
        "evaluators or a dense assembly");
  const Eigen::Index n = dec.nodes();
  check_kernel_dim(n);
  const Eigen::MatrixXd scaled =
      dec.eigenfunctions * f.sqrt().matrix().asDiagonal();
  KernelMatrix k;
  k.values = Eigen::MatrixXd::Zero(n, n);
  k.values.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  k.values.triangularView<Eigen::StrictlyUpper>() =
      k.values.triangularView<Eigen::StrictlyLower>().transpose();
  k.state_tag = tag;
  return k;
}

Eigen::ArrayXd mode_weights(const SpectralDecomposition& dec,
                            double (*w)(double)) {
  Eigen::ArrayXd f(dec.modes());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = w(dec.eigenvalues[i]);
  return f;
}

Eigen::ArrayXd diagonal_from_weights(const SpectralDecomposition& dec, const Eigen::ArrayXd& f) {
  if (dec.mode_sum) {
    // plane waves: |psi|^2 = 1 / total measure at every site
    const double value = f.sum() / dec.total_measure;
    return Eigen::ArrayXd::Constant(dec.nodes(), value);
  }
  return (dec.eigenfunctions.array().square().matrix() * f.matrix()).array();
}

}  // namespace

KernelMatrix ground_kernel(const SpectralDecomposition& dec) {
  return kernel_from_weights(dec, mode_weights(dec, &ground_weight), "ground");
}

KernelMatrix excess_kernel(const SpectralDecomposition& dec, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("excess_kernel: beta must be positive");
  Eigen::ArrayXd f(dec.modes());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = excess_weight(beta, dec.eigenvalues[i]);
  return kernel_from_weights(dec, f, "excess beta=" + std::to_string(beta));
}

KernelMatrix green_kernel(const SpectralDecomposition& dec) {
  return kernel_from_weights(dec, dec.eigenvalues.array().inverse(), "green");
}

KernelMatrix thermal_kernel(const SpectralDecomposition& dec, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("thermal_kernel: beta must be positive");
  KernelMatrix k = ground_kernel(dec);
  k.values += excess_kernel(dec, beta).values;
  k.state_tag = "kms beta=" + std::to_string(beta);
  return k;
}

Eigen::ArrayXd ground_diagonal(const SpectralDecomposition& dec) {
  return diagonal_from_weights(dec, mode_weights(dec, &ground_weight));
}

Eigen::ArrayXd excess_diagonal(const SpectralDecomposition& dec, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("excess_diagonal: beta must be positive");
  Eigen::ArrayXd f(dec.modes());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = excess_weight(beta, dec.eigenvalues[i]);
  return diagonal_from_weights(dec, f);
}

Eigen::ArrayXd thermal_diagonal(const SpectralDecomposition& dec, double beta) {
  return ground_diagonal(dec) + excess_diagonal(dec, beta);
}

}  // namespace loctemp

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "loctemp/conformal.hpp"
#include "loctemp/operators.hpp"
#include "loctemp/shell.hpp"
#include "loctemp/spectral.hpp"

using namespace loctemp;

namespace {

constexpr double pi = 3.14159265358979323846;

ShellPotential default_shell() {
  return make_shell_potential(make_shell_density(1.0, 2.0, 3.0 / (28.0 * pi)));
}

// closed-form spectrum of the periodic 7-point Laplacian plus constant shift
std::vector<double> torus_eigs(int n, double side, double shift) {
  const double h = side / n;
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out;
  out.reserve(std::size_t(n) * n * n);
  auto line = [&](int k) { return (2.0 - 2.0 * std::cos(2.0 * pi * k / n)) * inv_h2; };
  for (int kx = 0; kx < n; ++kx)
    for (int ky = 0; ky < n; ++ky)
      for (int kz = 0; kz < n; ++kz) out.push_back(line(kx) + line(ky) + line(kz) + shift);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("uniform torus keeps the closed-form spectrum") {
  const TorusGrid grid = make_torus_grid(4.0, 4);
  const SpatialOperator op = assemble_torus(grid, 0.0, 1.0);
  CHECK(op.form == OperatorForm::ModeSum);
  CHECK(op.kernel_form == KernelForm::PlainSite);
  CHECK(op.size() == 64);
  CHECK(op.dense.size() == 0);
  // h = 1, so the cell measure is exactly 1 and the zero Fourier mode gives m^2
  CHECK(op.measure.minCoeff() == 1.0);
  CHECK(op.measure.maxCoeff() == 1.0);
  CHECK(smallest_eigenvalue(op) == 1.0);

  const SpatialOperator shifted = assemble_torus(grid, 0.5, 2.0);
  CHECK(smallest_eigenvalue(shifted) == 4.5);

  CHECK_THROWS_AS(assemble_torus(grid, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(assemble_torus(grid, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_torus(grid, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("torus spectrum matches the Fourier oracle") {
  const int n = 8;
  const double side = 2.0;
  const double v = 0.7;
  const double m = 1.3;
  const TorusGrid grid = make_torus_grid(side, n);

  const SpatialOperator mode = assemble_torus(grid, v, m);
  const SpectralDecomposition mode_dec = decompose(mode);
  CHECK(mode_dec.mode_sum);
  CHECK(mode_dec.eigenfunctions.size() == 0);
  CHECK(mode_dec.modes() == 512);

  const std::vector<double> oracle = torus_eigs(n, side, v + m * m);
  const double scale = oracle.back();
  for (Eigen::Index i = 0; i < mode_dec.modes(); ++i) {
    CHECK(std::abs(mode_dec.eigenvalues[i] - oracle[std::size_t(i)]) <= 1e-12 * scale);
    if (i > 0) CHECK(mode_dec.eigenvalues[i] >= mode_dec.eigenvalues[i - 1]);
  }

  // sampling the same constant potential must reproduce the mode-sum spectrum
  const SpatialOperator dense =
      assemble_torus(grid, Eigen::ArrayXd::Constant(grid.sites(), v), m);
  CHECK(dense.form == OperatorForm::Dense);
  const SpectralDecomposition dense_dec = decompose(dense);
  CHECK_FALSE(dense_dec.mode_sum);
  CHECK(dense_dec.eigenfunctions.cols() == 512);
  for (Eigen::Index i = 0; i < 512; ++i)
    CHECK(std::abs(dense_dec.eigenvalues[i] - oracle[std::size_t(i)]) <= 1e-9 * scale);
}

TEST_CASE("sampled torus rejects unusable potentials") {
  const TorusGrid grid = make_torus_grid(1.0, 4);
  CHECK_THROWS_AS(assemble_torus(grid, Eigen::ArrayXd::Zero(63), 1.0), std::invalid_argument);
  Eigen::ArrayXd neg = Eigen::ArrayXd::Zero(64);
  neg[10] = -1e-3;
  CHECK_THROWS_AS(assemble_torus(grid, neg, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_torus(grid, Eigen::ArrayXd::Zero(64), 0.0), std::domain_error);
  CHECK_THROWS_AS(assemble_torus(grid, Eigen::ArrayXd::Zero(64), -2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_torus_grid(1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_torus_grid(0.0, 8), std::invalid_argument);
}

TEST_CASE("flat wall eigenvalues are exact") {
  // unit factor, zero curvature: the operator is the plain Dirichlet second
  // difference on u, whose spectrum is known exactly
  const int points = 64;
  const RadialGrid grid = make_radial_grid(8.0, points, RadialBoundary::Dirichlet);
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, default_shell());
  const SpatialOperator op = assemble_radial_conformal(grid, unit, 0.0);
  CHECK(op.form == OperatorForm::Tridiagonal);
  CHECK(op.kernel_form == KernelForm::USubstitution);
  CHECK(op.size() == points - 1);
  CHECK(op.measure.isApproxToConstant(grid.spacing(), 1e-15));

  const SpectralDecomposition dec = decompose(op);
  const double h = grid.spacing();
  for (Eigen::Index k = 0; k < dec.modes(); ++k) {
    const double exact = (2.0 - 2.0 * std::cos(double(k + 1) * pi / points)) / (h * h);
    CHECK(std::abs(dec.eigenvalues[k] - exact) <= 1e-10 * exact);
  }

  CHECK(smallest_eigenvalue(op) == doctest::Approx(dec.eigenvalues[0]).epsilon(1e-12));
}

TEST_CASE("radial assembly guards its domain") {
  const ShellPotential p = default_shell();
  const ConformalFactorModel exp_m = make_conformal_model(ConformalVariant::ExpNewton, p);
  const ConformalFactorModel quart = make_conformal_model(ConformalVariant::QuarticShell, p);

  // shell barely sampled: h = 0.5 leaves only 3 nodes inside [1, 2]
  CHECK_THROWS_WITH_AS(
      assemble_radial_conformal(make_radial_grid(20.0, 40, RadialBoundary::Dirichlet), exp_m, 0.0),
      doctest::Contains("fewer than 16 nodes"), std::invalid_argument);
  // wall inside the shell
  CHECK_THROWS_WITH_AS(
      assemble_radial_conformal(make_radial_grid(1.5, 64, RadialBoundary::Dirichlet), exp_m, 0.0),
      doctest::Contains("contain the shell"), std::invalid_argument);
  // wrong boundary and wrong metric family
  CHECK_THROWS_AS(
      assemble_radial_conformal(make_radial_grid(20.0, 400, RadialBoundary::TwoChart), exp_m, 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      assemble_radial_conformal(make_radial_grid(20.0, 400, RadialBoundary::Dirichlet), quart, 0.0),
      std::invalid_argument);
  // handmade grid below the node floor
  CHECK_THROWS_WITH_AS(assemble_radial_conformal(RadialGrid{1.0, 7, RadialBoundary::Dirichlet},
                                                 make_conformal_model(ConformalVariant::Unit, p), 0.0),
                       doctest::Contains("too few interior nodes"), std::invalid_argument);
  // the unit factor has no shell to resolve, so coarse grids are fine
  CHECK_NOTHROW(assemble_radial_conformal(make_radial_grid(2.0, 16, RadialBoundary::Dirichlet),
                                          make_conformal_model(ConformalVariant::Unit, p), 0.0));
}

TEST_CASE("curvature coupling shifts the diagonal with the curvature sign") {
  const ShellPotential p = default_shell();
  const RadialGrid grid = make_radial_grid(20.0, 400, RadialBoundary::Dirichlet);

  for (ConformalVariant v : {ConformalVariant::ExpNewton, ConformalVariant::AffineNewton}) {
    const ConformalFactorModel model = make_conformal_model(v, p);
    const SpatialOperator a0 = assemble_radial_conformal(grid, model, 0.0);
    const SpatialOperator a8 = assemble_radial_conformal(grid, model, 0.125);
    CHECK((a0.offdiag - a8.offdiag).cwiseAbs().maxCoeff() == 0.0);
    // diag(xi=0) - diag(xi=1/8) = -R/8 pointwise
    const Eigen::VectorXd diff = a0.diag - a8.diag;
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
      const double r8 = -curvature_at(model, a0.position[i]) / 8.0;
      CHECK(std::abs(diff[i] - r8) <= 1e-12 * (std::abs(a0.diag[i]) + 1.0));
      max_abs = std::max(max_abs, std::abs(diff[i]));
      if (v == ConformalVariant::ExpNewton)
        CHECK(diff[i] >= 0.0);  // R <= 0 for this variant
      else
        CHECK(diff[i] <= 0.0);  // R >= 0 for this variant
    }
    CHECK(max_abs > 0.0);
  }
}

TEST_CASE("two-chart operator carries the compact metric") {
  const ShellPotential p = default_shell();
  const int k = 64;
  const RadialGrid grid = make_radial_grid(4.0, k, RadialBoundary::TwoChart);
  const SpatialOperator op = assemble_radial_quartic(grid, p, 0.05);

  CHECK(op.size() == 2 * k);
  CHECK(op.kernel_form == KernelForm::PlainSite);
  const double h = grid.spacing();
  // inner chart: cell centres with the U^6 volume element
  for (int i : {0, 5, k - 1}) {
    const double r = (i + 0.5) * h;
    const double u = p(r);
    CHECK(op.position[i] == doctest::Approx(r).epsilon(1e-15));
    CHECK(op.measure[i] == doctest::Approx(4.0 * pi * std::pow(u, 6) * r * r * h).epsilon(1e-14));
  }
  // outer chart: inverted coordinate s = mu^2 / r, flat measure in s
  const double s_match = p.mu * p.mu / grid.r_max;
  const double hs = s_match / k;
  for (int i : {0, k / 2, k - 1}) {
    const double s = s_match - (i + 0.5) * hs;
    CHECK(op.position[k + i] == doctest::Approx(p.mu * p.mu / s).epsilon(1e-14));
    CHECK(op.measure[k + i] == doctest::Approx(4.0 * pi * s * s * hs).epsilon(1e-14));
  }
  // physical radius must ascend straight through the seam
  for (Eigen::Index i = 1; i < op.size(); ++i) CHECK(op.position[i] > op.position[i - 1]);
  CHECK(op.position[k - 1] < grid.r_max);
  CHECK(op.position[k] > grid.r_max);
}

TEST_CASE("two-chart spectrum anchors") {
  // frozen reference eigenvalues for the compact shell metric at xi = 0.05,
  // match radius 4 (independent tridiagonal eigensolver)
  const ShellPotential p = default_shell();
  struct Anchor {
    int k;
    double lam0;
  };
  const Anchor anchors[] = {
      {64, 1.442737641780}, {128, 1.442776462528}, {256, 1.442786117081}};
  for (const Anchor& a : anchors) {
    const SpatialOperator op =
        assemble_radial_quartic(make_radial_grid(4.0, a.k, RadialBoundary::TwoChart), p, 0.05);
    const SpectralDecomposition dec = decompose(op);
    CHECK(std::abs(dec.eigenvalues[0] - a.lam0) <= 1e-9);
    if (a.k == 256) {
      CHECK(std::abs(dec.eigenvalues[1] - 23.542311501245) <= 1e-8);
      CHECK(std::abs(dec.eigenvalues[2] - 52.852787308859) <= 1e-8);
    }
  }
}

TEST_CASE("two-chart assembly guards the coupling and the charts") {
  const ShellPotential p = default_shell();
  const RadialGrid grid = make_radial_grid(4.0, 64, RadialBoundary::TwoChart);
  // xi = 0 passes the range check but leaves the constant zero mode, which the
  // positivity gate must catch
  CHECK_THROWS_AS(assemble_radial_quartic(grid, p, 0.0), std::domain_error);
  CHECK_THROWS_AS(assemble_radial_quartic(grid, p, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(assemble_radial_quartic(grid, p, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(
      assemble_radial_quartic(make_radial_grid(4.0, 64, RadialBoundary::Dirichlet), p, 0.05),
      std::invalid_argument);
  // match radius must clear the shell
  CHECK_THROWS_WITH_AS(
      assemble_radial_quartic(make_radial_grid(1.5, 64, RadialBoundary::TwoChart), p, 0.05),
      doctest::Contains("outside the shell"), std::invalid_argument);
  // 8 cells over [0, 4] leave the shell under-resolved
  CHECK_THROWS_WITH_AS(
      assemble_radial_quartic(make_radial_grid(4.0, 8, RadialBoundary::TwoChart), p, 0.05),
      doctest::Contains("fewer than 16"), std::invalid_argument);
}

TEST_CASE("refinement cuts the eigenvalue error at second order") {
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, default_shell());
  const RadialGrid grid = make_radial_grid(8.0, 32, RadialBoundary::Dirichlet);
  const SpatialOperator coarse = assemble_radial_conformal(grid, unit, 0.0);
  const SpatialOperator fine = refine(coarse, 2);
  CHECK(fine.size() == 63);
  CHECK(std::get<RadialGrid>(fine.grid).spacing() == doctest::Approx(grid.spacing() / 2));
  CHECK(fine.meta.xi == coarse.meta.xi);

  const double exact = std::pow(pi / grid.r_max, 2);
  const double e1 = smallest_eigenvalue(coarse) - exact;
  const double e2 = smallest_eigenvalue(fine) - exact;
  CHECK(e1 < 0.0);  // the discrete spectrum bounds the continuum one from below
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  CHECK_THROWS_AS(refine(coarse, 1), std::invalid_argument);
  const TorusGrid tg = make_torus_grid(1.0, 4);
  const SpatialOperator sampled = assemble_torus(tg, Eigen::ArrayXd::Constant(64, 0.3), 1.0);
  CHECK_THROWS_AS(refine(sampled, 2), std::invalid_argument);
  const SpatialOperator mode = assemble_torus(tg, 0.3, 1.0);
  CHECK(refine(mode, 2).size() == 512);
}

TEST_CASE("lapse rescaling acts on matrix, measure and spectrum") {
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, default_shell());
  const SpatialOperator op =
      assemble_radial_conformal(make_radial_grid(8.0, 32, RadialBoundary::Dirichlet), unit, 0.0);
  const double c = 2.0;
  const SpatialOperator sc = scale_lapse(op, c);
  CHECK((sc.diag - op.diag / 4.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sc.offdiag - op.offdiag / 4.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sc.measure - op.measure * 8.0).abs().maxCoeff() == 0.0);
  CHECK(sc.meta.lapse == 2.0);
  CHECK(smallest_eigenvalue(sc) == doctest::Approx(smallest_eigenvalue(op) / 4.0).epsilon(1e-13));

  // round trip restores the operator
  const SpatialOperator back = scale_lapse(sc, 1.0 / c);
  CHECK((back.diag - op.diag).cwiseAbs().maxCoeff() <= 1e-15 * op.diag.cwiseAbs().maxCoeff());
  CHECK(back.meta.lapse == doctest::Approx(1.0).epsilon(1e-15));

  // refinement preserves an accumulated lapse
  const SpatialOperator ref = refine(sc, 2);
  CHECK(ref.meta.lapse == 2.0);
  CHECK(smallest_eigenvalue(ref) ==
        doctest::Approx(smallest_eigenvalue(refine(op, 2)) / 4.0).epsilon(1e-12));

  const SpatialOperator mode = assemble_torus(make_torus_grid(1.0, 4), 0.0, 2.0);
  const SpatialOperator mode_sc = scale_lapse(mode, 10.0);
  CHECK(mode_sc.op_scale == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(smallest_eigenvalue(mode_sc) == doctest::Approx(0.04).epsilon(1e-15));

  CHECK_THROWS_AS(scale_lapse(op, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_lapse(op, -1.0), std::invalid_argument);
}

TEST_CASE("flat ball cells carry the metric measure") {
  const int points = 32;
  const double h = 0.25;
  const double factor = 0.75;
  const SpatialOperator op = assemble_flat_ball(points, h, factor);
  CHECK(op.size() == points);
  CHECK(op.kernel_form == KernelForm::PlainSite);
  const RadialGrid& g = std::get<RadialGrid>(op.grid);
  CHECK(g.r_max == doctest::Approx(points * h).epsilon(1e-15));
  CHECK(g.boundary == RadialBoundary::Dirichlet);
  const double c6 = std::pow(factor, 6);
  for (int i : {0, 7, points - 1}) {
    const double r = (i + 0.5) * h;
    CHECK(op.position[i] == doctest::Approx(r).epsilon(1e-15));
    CHECK(op.measure[i] == doctest::Approx(4.0 * pi * c6 * r * r * h).epsilon(1e-14));
  }
  // cell sum approximates the ball volume in the scaled metric
  const double volume = 4.0 / 3.0 * pi * c6 * std::pow(points * h, 3);
  CHECK(op.measure.sum() == doctest::Approx(volume).epsilon(1e-3));
  CHECK(smallest_eigenvalue(op) > 0.0);

  CHECK_THROWS_AS(assemble_flat_ball(7, h, factor), std::invalid_argument);
  CHECK_THROWS_AS(assemble_flat_ball(points, 0.0, factor), std::invalid_argument);
  CHECK_THROWS_AS(assemble_flat_ball(points, h, -1.0), std::invalid_argument);
}

TEST_CASE("total measure tracks the domain") {
  const SpatialOperator mode = assemble_torus(make_torus_grid(2.0, 8), 0.0, 1.0);
  CHECK(mode.measure.sum() == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(refine(mode, 2).measure.sum() == doctest::Approx(8.0).epsilon(1e-13));

  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, default_shell());
  const RadialGrid rg = make_radial_grid(8.0, 64, RadialBoundary::Dirichlet);
  const SpatialOperator wall = assemble_radial_conformal(rg, unit, 0.0);
  // interior nodes cover r_max minus one spacing
  CHECK(wall.measure.sum() == doctest::Approx(8.0 - rg.spacing()).epsilon(1e-13));
}

TEST_CASE("diagnostics report stored structure") {
  const SpatialOperator dense =
      assemble_torus(make_torus_grid(1.0, 4), Eigen::ArrayXd::Constant(64, 0.3), 1.0);
  CHECK(measure_asymmetry(dense) == 0.0);

  const SpatialOperator ball = assemble_flat_ball(8, 0.5, 1.0);
  CHECK(measure_asymmetry(ball) == 0.0);

  std::ostringstream os;
  dump_triplets(ball, os);
  const std::string text = os.str();
  // header, 8 weights, 8 diagonal entries, 7 off-diagonal entries
  CHECK(std::count(text.begin(), text.end(), '\n') == 24);
  CHECK(text.find("form=tridiagonal") != std::string::npos);

  std::ostringstream om;
  dump_triplets(assemble_torus(make_torus_grid(1.0, 4), 0.0, 1.0), om);
  CHECK(om.str().find("closed-form spectrum") != std::string::npos);
}

TEST_CASE("matrix dimension cap rejects oversized assemblies") {
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, default_shell());
  const RadialGrid big{80.0, max_matrix_dim() + 2, RadialBoundary::Dirichlet};
  CHECK_THROWS_WITH_AS(assemble_radial_conformal(big, unit, 0.0),
                       doctest::Contains("LOCTEMP_MAX_DIM"), std::length_error);
}

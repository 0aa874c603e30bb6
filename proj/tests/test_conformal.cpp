#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>

#include "loctemp/conformal.hpp"

using namespace loctemp;

namespace {

constexpr double pi = 3.14159265358979323846;

ShellPotential smooth_potential() {
  return make_shell_potential(make_shell_density(1.0, 2.0, 0.1, ShellProfile::Bump));
}

ShellPotential default_potential() {
  return make_shell_potential(make_shell_density(1.0, 2.0, 3.0 / (28.0 * pi)));
}

// scalar curvature of Omega^2 * delta from second differences of Omega
double curvature_fd(const ConformalFactorModel& m, double r, bool quartic) {
  const double h = 1e-4;
  auto omega = [&](double x) {
    const double f = conformal_factor(m, x);
    return quartic ? f * f : f;
  };
  const double om = omega(r);
  const double d1 = (omega(r + h) - omega(r - h)) / (2.0 * h);
  const double d2 = (omega(r + h) - 2.0 * om + omega(r - h)) / (h * h);
  const double lap = d2 + 2.0 * d1 / r;
  return -4.0 * lap / (om * om * om) + 2.0 * d1 * d1 / (om * om * om * om);
}

}  // namespace

TEST_CASE("factor values per variant") {
  const ShellPotential p = default_potential();
  const double nu = 9.0 / 14.0;

  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, p);
  CHECK(conformal_factor(unit, 0.3) == 1.0);
  CHECK(conformal_factor(unit, 5.0) == 1.0);
  CHECK(curvature_at(unit, 1.5) == 0.0);

  const ConformalFactorModel exp_m = make_conformal_model(ConformalVariant::ExpNewton, p);
  CHECK(conformal_factor(exp_m, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(conformal_factor(exp_m, 3.0) == doctest::Approx(std::exp(nu - 1.0 / 3.0)).epsilon(1e-14));
  for (double r = 0.1; r < 6.0; r += 0.3) CHECK(conformal_factor(exp_m, r) >= 1.0);

  const ConformalFactorModel aff = make_conformal_model(ConformalVariant::AffineNewton, p);
  CHECK(conformal_factor(aff, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(conformal_factor(aff, 3.0) == doctest::Approx(0.5 + 1.0 / (6.0 * nu)).epsilon(1e-14));
  for (double r = 0.1; r < 50.0; r += 0.7) {
    CHECK(conformal_factor(aff, r) <= 1.0 + 1e-15);
    CHECK(conformal_factor(aff, r) >= 0.5);
  }

  const ConformalFactorModel quart = make_conformal_model(ConformalVariant::QuarticShell, p);
  CHECK(conformal_factor(quart, 0.5) == doctest::Approx(nu).epsilon(1e-14));
  CHECK(conformal_factor(quart, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("closed-form curvature against finite differences") {
  const ShellPotential p = smooth_potential();
  for (ConformalVariant v :
       {ConformalVariant::ExpNewton, ConformalVariant::AffineNewton, ConformalVariant::QuarticShell}) {
    const ConformalFactorModel m = make_conformal_model(v, p);
    const bool quartic = v == ConformalVariant::QuarticShell;
    for (double r : {0.6, 1.3, 1.5, 1.7, 2.5, 4.0}) {
      const double closed = curvature_at(m, r);
      const double fd = curvature_fd(m, r, quartic);
      CHECK(closed == doctest::Approx(fd).epsilon(2e-5).scale(std::abs(closed) + 1.0));
    }
  }
}

TEST_CASE("curvature sign pattern drives the two smooth geometries apart") {
  const ShellPotential p = default_potential();
  const ConformalFactorModel exp_m = make_conformal_model(ConformalVariant::ExpNewton, p);
  const ConformalFactorModel aff = make_conformal_model(ConformalVariant::AffineNewton, p);
  const ConformalFactorModel quart = make_conformal_model(ConformalVariant::QuarticShell, p);
  for (double r = 0.2; r < 6.0; r += 0.1) {
    CHECK(curvature_at(exp_m, r) <= 0.0);
    CHECK(curvature_at(aff, r) >= 0.0);
    CHECK(curvature_at(quart, r) >= 0.0);
  }
  // strictly curved outside the shell for the smooth variants, flat for quartic
  CHECK(curvature_at(exp_m, 3.0) < 0.0);
  CHECK(curvature_at(aff, 3.0) > 0.0);
  CHECK(curvature_at(quart, 3.0) == 0.0);
  CHECK(curvature_at(quart, 0.5) == 0.0);
  CHECK(curvature_at(quart, 1.5) > 0.0);
}

TEST_CASE("log-form and direct-form curvature agree for smooth factors") {
  const ShellPotential p = smooth_potential();
  const Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(200, 0.05, 5.0);
  for (ConformalVariant v : {ConformalVariant::ExpNewton, ConformalVariant::AffineNewton}) {
    const ConformalFactorModel m = make_conformal_model(v, p);
    const CurvatureField a = curvature_log_conformal(m, r);
    const CurvatureField b = curvature_affine_conformal(m, r);
    const CurvatureField c = curvature_field(m, r);
    const double scale = a.samples.abs().maxCoeff();
    CHECK(((a.samples - b.samples).abs().maxCoeff()) <= 1e-12 * scale);
    CHECK(((a.samples - c.samples).abs().maxCoeff()) <= 1e-12 * scale);
  }
}

TEST_CASE("quartic curvature matches the density in closed form") {
  const ShellPotential p = smooth_potential();
  const ConformalFactorModel m = make_conformal_model(ConformalVariant::QuarticShell, p);
  const Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(100, 0.1, 3.0);
  const CurvatureField f = curvature_quartic(m, r);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double u = shell_potential_eval(p, r[i]);
    CHECK(f.samples[i] ==
          doctest::Approx(32.0 * pi * density_at(p.density, r[i]) / std::pow(u, 5)).epsilon(1e-12));
  }
}

TEST_CASE("flat regions per variant") {
  const ShellPotential p = default_potential();
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, p);
  const ConformalFactorModel exp_m = make_conformal_model(ConformalVariant::ExpNewton, p);
  const ConformalFactorModel aff = make_conformal_model(ConformalVariant::AffineNewton, p);
  const ConformalFactorModel quart = make_conformal_model(ConformalVariant::QuarticShell, p);

  CHECK(in_flat_region(unit, 100.0, 10.0));
  CHECK(in_flat_region(exp_m, 0.5, 0.3));
  CHECK_FALSE(in_flat_region(exp_m, 0.9, 0.2));
  CHECK_FALSE(in_flat_region(exp_m, 3.0, 0.1));
  CHECK(in_flat_region(aff, 0.5, 0.5));
  CHECK_FALSE(in_flat_region(aff, 30.0, 0.1));
  CHECK(in_flat_region(quart, 0.5, 0.3));
  CHECK(in_flat_region(quart, 3.0, 0.5));
  CHECK_FALSE(in_flat_region(quart, 2.2, 0.5));
}

TEST_CASE("flat-region tags follow the clearance rule") {
  const ShellPotential p = default_potential();
  const ConformalFactorModel m = make_conformal_model(ConformalVariant::QuarticShell, p);
  const Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(81, 0.05, 4.05);  // spacing 0.05
  const CurvatureField f = curvature_quartic(m, r);
  REQUIRE(!f.flat_region.empty());
  for (int idx : f.flat_region) CHECK(in_flat_region(m, r[idx], 0.1));
  for (int idx : f.flat_region) CHECK(f.samples[idx] == 0.0);
}

TEST_CASE("sampling guards") {
  const ShellPotential p = default_potential();
  const ConformalFactorModel exp_m = make_conformal_model(ConformalVariant::ExpNewton, p);
  const Eigen::ArrayXd coarse = Eigen::ArrayXd::LinSpaced(20, 0.0, 10.0);
  CHECK_THROWS_AS(curvature_field(exp_m, coarse), std::invalid_argument);
  const ConformalFactorModel unit = make_conformal_model(ConformalVariant::Unit, p);
  CHECK_NOTHROW(curvature_field(unit, coarse));
  Eigen::ArrayXd single(1);
  single << 1.0;
  CHECK_THROWS_AS(curvature_field(unit, single), std::invalid_argument);

  const ConformalFactorModel quart = make_conformal_model(ConformalVariant::QuarticShell, p);
  const Eigen::ArrayXd fine = Eigen::ArrayXd::LinSpaced(200, 0.05, 5.0);
  CHECK_THROWS_AS(curvature_log_conformal(quart, fine), std::invalid_argument);
  CHECK_THROWS_AS(curvature_affine_conformal(quart, fine), std::invalid_argument);
  CHECK_THROWS_AS(curvature_quartic(exp_m, fine), std::invalid_argument);

  CHECK_THROWS_AS(make_conformal_model(ConformalVariant::Unit, ShellPotential{}),
                  std::invalid_argument);
}

TEST_CASE("curvature csv export") {
  const ShellPotential p = default_potential();
  const ConformalFactorModel m = make_conformal_model(ConformalVariant::AffineNewton, p);
  const Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(40, 0.5, 3.0);
  const CurvatureField f = curvature_field(m, r);
  std::ostringstream os;
  write_curvature_csv(f, os);
  const std::string text = os.str();
  CHECK(text.rfind("r,R\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 41);
}

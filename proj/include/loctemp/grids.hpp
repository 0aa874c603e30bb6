#pragma once

#include <stdexcept>
#include <variant>

namespace loctemp {

struct TorusGrid {
  double side = 1.0;
  int points_per_axis = 4;

  double spacing() const { return side / points_per_axis; }
  int sites() const { return points_per_axis * points_per_axis * points_per_axis; }
};

inline TorusGrid make_torus_grid(double side, int points_per_axis) {
  if (!(side > 0.0)) throw std::invalid_argument("torus grid: side must be positive");
  if (points_per_axis < 4) throw std::invalid_argument("torus grid: need at least 4 points per axis");
  return {side, points_per_axis};
}

enum class RadialBoundary {
  Dirichlet,  // single chart (0, r_max], wall at r_max
  TwoChart    // inner chart (0, r_max] glued to an inverted outer chart
};

struct RadialGrid {
  double r_max = 1.0;  // wall radius (Dirichlet) or chart match radius (TwoChart)
  int points = 8;      // intervals per chart
  RadialBoundary boundary = RadialBoundary::Dirichlet;

  double spacing() const { return r_max / points; }
};

inline RadialGrid make_radial_grid(double r_max, int points, RadialBoundary boundary) {
  if (!(r_max > 0.0)) throw std::invalid_argument("radial grid: r_max must be positive");
  if (points < 8) throw std::invalid_argument("radial grid: need at least 8 intervals");
  return {r_max, points, boundary};
}

}  // namespace loctemp

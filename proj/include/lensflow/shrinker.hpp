#pragma once
#include <Eigen/Dense>

#include "lensflow/curve.hpp"

namespace lensflow::shrinker {

// right half of the homothetic profile, apex to axis, from the shooting solve
struct ShootResult {
  double angle_residual = 0;  // tangent angle at the axis minus the -pi/3 target
  bool crossed = false;
  Eigen::VectorXd s;      // arclength from the apex
  Eigen::Matrix2Xd pts;   // integrator nodes
  Eigen::VectorXd theta;  // tangent angle at each node
};

struct ShrinkerProfile {
  PlanarCurve curve;  // assembled symmetric polyline, uniform arclength, left to right
  double y0 = 0;      // apex height
  double half_width = 0;
  double half_arclength = 0;
  double residual = 0;  // max |kappa + <p, nu>| at interior nodes of the polyline
  double total_turning = 0;
  ShootResult half;  // dense right half kept for interpolating builders
};

// integrate x' = cos(theta), y' = sin(theta), theta' = x sin(theta) - y cos(theta)
// from (0, y0), theta = 0, until y crosses the axis
ShootResult shoot(double y0, double rk_tol = 1e-12, double h_max = 0.002,
                  double s_budget = 10.0);

ShrinkerProfile solve(int nodes = 801, double rk_tol = 1e-12);

// cubic Hermite interpolation of the half-curve state at arclength s
void sample_half(const ShootResult& half, double s, double& x, double& y, double& theta);

}  // namespace lensflow::shrinker

#pragma once
#include <string>

#include "lensflow/curve.hpp"
#include "lensflow/graph_datum.hpp"

namespace lensflow {

struct ScenarioSpec {
  enum class Family { convex_lens, perturbed_lens, graph_example1, double_bubble };
  Family family = Family::convex_lens;
  int n = 400;  // node count; for graph_example1 the segment count of the x-grid

  // lens families
  double scale = 1.0;
  // perturbed_lens: normal-direction bump amp * B(u) on |u - center| < width/2,
  // u = arclength fraction; B is a C2 polynomial bump
  double bump_amp = 0.0;
  double bump_center = 0.5;
  double bump_width = 0.3;
  // double_bubble: circular-arc radius
  double radius = 1.0;
  // graph_example1 lobe integrals and axis crossings
  double eps = 0.05;
  double c = 0.30;
  double vr = 0.07;
  double x1 = 0.36;
  double x2 = 0.66;

  static Family family_from_name(const std::string& name);
  double bc_angle() const;  // junction tangent angle at x = 0
};

struct CompatibilityReport {
  double endpoint_position_error = 0;  // max |y| over the two endpoints
  double tangent_angle_error = 0;      // max angle error over the two endpoints, radians
  double second_order_residual[2] = {0, 0};      // family-consistent condition
  double second_order_residual_alt[2] = {0, 0};  // opposite-sign reading, informational
  bool embedded = false;
  double min_y_interior = 0;
  int witness_i = -1, witness_j = -1;  // intersecting segment pair when not embedded
};

PlanarCurve build_curve(const ScenarioSpec& spec);
GraphDatum build_graph(const ScenarioSpec& spec);

// residuals of the junction conditions for the given end-tangent angle
// (pi/3 family or 2*pi/3 family)
CompatibilityReport validate(const PlanarCurve& curve, double bc_angle);

// re-seat nodes 1 and n-2 on the endpoint tangent rays, at the distance that
// zeroes the one-sided second-order junction condition
void enforce_junction_compatibility(PlanarCurve& c, double bc_angle);

}  // namespace lensflow

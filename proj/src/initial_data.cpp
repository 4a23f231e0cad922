#include "lensflow/initial_data.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lensflow/shrinker.hpp"

namespace lensflow {

namespace {

const double kSq3 = std::sqrt(3.0);

const shrinker::ShrinkerProfile& cached_profile() {
  static const shrinker::ShrinkerProfile prof = shrinker::solve();
  return prof;
}

// position on the full symmetric profile at arclength s in [0, 2*half_arclength]
Vector2d profile_at(double s) {
  const auto& prof = cached_profile();
  double hl = prof.half_arclength;
  double x, y, th;
  if (s <= hl) {
    shrinker::sample_half(prof.half, hl - s, x, y, th);
    return {-x, y};
  }
  shrinker::sample_half(prof.half, s - hl, x, y, th);
  return {x, y};
}

double angle_between(const Vector2d& a, const Vector2d& b) {
  return std::abs(std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)));
}

PlanarCurve sampled_curve(const std::function<Vector2d(double)>& at, double total, int n,
                          double bc_angle) {
  PlanarCurve c;
  c.p.resize(2, n);
  for (int j = 0; j < n; ++j) c.p.col(j) = at(total * j / (n - 1));
  c.p(1, 0) = 0;
  c.p(1, n - 1) = 0;
  enforce_junction_compatibility(c, bc_angle);
  return c;
}

void reject_if_tangled(const PlanarCurve& c, const char* family) {
  auto rep = validate(c, M_PI / 3);  // the sweep does not depend on the angle
  if (!rep.embedded)
    throw std::runtime_error(std::string(family) + ": not embedded (segments " +
                             std::to_string(rep.witness_i) + ", " +
                             std::to_string(rep.witness_j) + ")");
}

}  // namespace

// place the node adjacent to each endpoint on the boundary-tangent ray, at the
// distance that zeroes the one-sided second-order junction condition; the other
// nodes stay on the sampled curve
void enforce_junction_compatibility(PlanarCurve& c, double bc_angle) {
  const int n = c.n();
  const double sigma = bc_angle < M_PI / 2 ? 1.0 : -1.0;
  {
    Vector2d tau(std::cos(bc_angle), std::sin(bc_angle));
    Vector2d nu(-tau.y(), tau.x());
    Vector2d e = c.p.col(2) - c.p.col(0);
    double r = (e.dot(tau) + e.dot(nu) / (sigma * kSq3)) / 2;
    c.p.col(1) = c.p.col(0) + r * tau;
  }
  {
    Vector2d tau(std::cos(-bc_angle), std::sin(-bc_angle));
    Vector2d nu(-tau.y(), tau.x());
    Vector2d e = c.p.col(n - 3) - c.p.col(n - 1);
    double r = (e.dot(nu) / (sigma * kSq3) - e.dot(tau)) / 2;
    c.p.col(n - 2) = c.p.col(n - 1) - r * tau;
  }
}


ScenarioSpec::Family ScenarioSpec::family_from_name(const std::string& name) {
  if (name == "convex_lens") return Family::convex_lens;
  if (name == "perturbed_lens") return Family::perturbed_lens;
  if (name == "graph_example1") return Family::graph_example1;
  if (name == "double_bubble") return Family::double_bubble;
  throw std::runtime_error("unknown scenario family: " + name);
}

double ScenarioSpec::bc_angle() const {
  return family == Family::double_bubble ? 2 * M_PI / 3 : M_PI / 3;
}

PlanarCurve build_curve(const ScenarioSpec& spec) {
  if (spec.n < 32) throw std::runtime_error("node count must be at least 32");
  using F = ScenarioSpec::Family;
  switch (spec.family) {
    case F::convex_lens: {
      if (spec.scale <= 0) throw std::runtime_error("scale must be positive");
      double total = 2 * cached_profile().half_arclength * spec.scale;
      auto c = sampled_curve(
          [&](double s) { return Vector2d(spec.scale * profile_at(s / spec.scale)); },
          total, spec.n, spec.bc_angle());
      reject_if_tangled(c, "convex_lens");
      return c;
    }
    case F::perturbed_lens: {
      ScenarioSpec base = spec;
      base.family = F::convex_lens;
      PlanarCurve c = build_curve(base);
      if (spec.bump_amp == 0) return c;
      if (spec.bump_width <= 0) throw std::runtime_error("bump width must be positive");
      auto f = compute_frames(c);
      double total = f.s(spec.n - 1);
      auto bump = [&](double u) {
        double w = (u - spec.bump_center) / (spec.bump_width / 2);
        if (std::abs(w) >= 1) return 0.0;
        double v = 1 - w * w;
        return v * v * v;
      };
      for (int j : {0, 1, 2, spec.n - 3, spec.n - 2, spec.n - 1})
        if (bump(f.s(j) / total) != 0)
          throw std::runtime_error("bump support reaches the endpoint stencils");
      for (int j = 3; j < spec.n - 3; ++j)
        c.p.col(j) += spec.bump_amp * bump(f.s(j) / total) * f.nu.col(j);
      reject_if_tangled(c, "perturbed_lens");
      return c;
    }
    case F::double_bubble: {
      if (spec.radius <= 0) throw std::runtime_error("radius must be positive");
      const double R = spec.radius;
      double total = R * 4 * M_PI / 3;
      auto c = sampled_curve(
          [&](double s) {
            double phi = 7 * M_PI / 6 - s / R;
            return Vector2d(R * std::cos(phi), R / 2 + R * std::sin(phi));
          },
          total, spec.n, spec.bc_angle());
      reject_if_tangled(c, "double_bubble");
      return c;
    }
    case F::graph_example1:
      throw std::runtime_error("graph_example1 builds a graph, use build_graph");
  }
  throw std::runtime_error("unreachable");
}

GraphDatum build_graph(const ScenarioSpec& spec) {
  if (spec.family != ScenarioSpec::Family::graph_example1)
    throw std::runtime_error("build_graph only serves graph_example1");
  return build_lobed_graph(spec.eps, spec.c, spec.vr, spec.x1, spec.x2);
}

CompatibilityReport validate(const PlanarCurve& curve, double bc_angle) {
  CompatibilityReport rep;
  const int n = curve.n();
  rep.endpoint_position_error =
      std::max(std::abs(curve.p(1, 0)), std::abs(curve.p(1, n - 1)));

  const double sigma = bc_angle < M_PI / 2 ? 1.0 : -1.0;
  Vector2d tau0(std::cos(bc_angle), std::sin(bc_angle));
  Vector2d tau1(std::cos(-bc_angle), std::sin(-bc_angle));
  Vector2d nu0(-tau0.y(), tau0.x()), nu1(-tau1.y(), tau1.x());
  rep.tangent_angle_error =
      std::max(angle_between(Vector2d(curve.p.col(1) - curve.p.col(0)), tau0),
               angle_between(Vector2d(curve.p.col(n - 1) - curve.p.col(n - 2)), tau1));

  if (n >= 3) {
    double h0 = (curve.p.col(1) - curve.p.col(0)).norm();
    double h1 = (curve.p.col(2) - curve.p.col(1)).norm();
    double n0 = h0 * h1 + (h1 * h1 - h0 * h0) / 2;
    Vector2d D0 = curve.p.col(2) - 2 * curve.p.col(1) + curve.p.col(0);
    rep.second_order_residual[0] =
        std::abs(D0.dot(nu0) + sigma * kSq3 * D0.dot(tau0)) / n0;
    rep.second_order_residual_alt[0] =
        std::abs(D0.dot(nu0) - sigma * kSq3 * D0.dot(tau0)) / n0;

    double g0 = (curve.p.col(n - 1) - curve.p.col(n - 2)).norm();
    double g1 = (curve.p.col(n - 2) - curve.p.col(n - 3)).norm();
    double n1 = g0 * g1 + (g1 * g1 - g0 * g0) / 2;
    Vector2d D1 = curve.p.col(n - 3) - 2 * curve.p.col(n - 2) + curve.p.col(n - 1);
    rep.second_order_residual[1] =
        std::abs(D1.dot(nu1) - sigma * kSq3 * D1.dot(tau1)) / n1;
    rep.second_order_residual_alt[1] =
        std::abs(D1.dot(nu1) + sigma * kSq3 * D1.dot(tau1)) / n1;
  }

  rep.min_y_interior = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < n; ++i)
    rep.min_y_interior = std::min(rep.min_y_interior, curve.p(1, i));
  rep.embedded = rep.min_y_interior > 0;
  for (int i = 0; i + 1 < n && rep.witness_i < 0; ++i)
    for (int j = i + 2; j + 1 < n; ++j)
      if (segments_intersect(curve.p.col(i), curve.p.col(i + 1), curve.p.col(j),
                             curve.p.col(j + 1))) {
        rep.witness_i = i;
        rep.witness_j = j;
        rep.embedded = false;
        break;
      }
  return rep;
}

}  // namespace lensflow

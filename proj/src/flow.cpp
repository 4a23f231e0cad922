#include "lensflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lensflow/initial_data.hpp"
#include "lensflow/tridiag.hpp"

namespace lensflow::flow {
namespace {

using Eigen::VectorXd;

// parameter metric frozen at step start: a_i = 1/(h_{i-1} h_i) plays the role
// of 1/|gamma_x|^2 on the unit parameter grid, so a_i * (p_{i+1} - 2p_i +
// p_{i-1}) recovers kappa*nu exactly at second order on smooth spacing and
// drives the tangential node redistribution on uneven spacing
struct Metric {
  VectorXd a;
  double a_max = 0;
  double h_min = 0;
  bool collapsed = false;
};

Metric metric_of(const PlanarCurve& c) {
  const int n = c.n();
  Metric m;
  m.a.setZero(n);
  VectorXd h(n - 1);
  double total = 0;
  for (int i = 0; i + 1 < n; ++i) {
    h(i) = (c.p.col(i + 1) - c.p.col(i)).norm();
    total += h(i);
  }
  m.h_min = h.minCoeff();
  m.collapsed = !(m.h_min > 1e-6 * (total / (n - 1)));  // also catches NaN geometry
  if (m.collapsed) return m;
  for (int i = 1; i + 1 < n; ++i) {
    m.a(i) = 1.0 / (h(i - 1) * h(i));
    m.a_max = std::max(m.a_max, m.a(i));
  }
  return m;
}

double pick_dt(const StepPolicy& p, const Metric& m, double kappa_abs_max, double ceiling) {
  double dt = std::min(p.dt_cap, ceiling);
  if (p.scheme == Scheme::explicit_euler)
    dt = std::min(dt, 0.5 * p.cfl / m.a_max);
  else
    dt = std::min(dt, p.cfl * m.h_min);
  if (p.curvature_adaptive && kappa_abs_max > 0)
    dt = std::min(dt, p.cfl / (kappa_abs_max * kappa_abs_max));
  return dt;
}

void advance(FlowState& s, const StepPolicy& p, const Metric& m, double dt) {
  PlanarCurve& c = s.curve;
  const int n = c.n();
  const double cot = std::cos(s.bc_angle) / std::sin(s.bc_angle);
  if (p.scheme == Scheme::explicit_euler) {
    Eigen::Matrix2Xd q = c.p;
    for (int i = 1; i + 1 < n; ++i)
      q.col(i) += dt * m.a(i) * (c.p.col(i + 1) - 2.0 * c.p.col(i) + c.p.col(i - 1));
    q(1, 0) = 0;
    q(1, n - 1) = 0;
    q(0, 0) = q(0, 1) - cot * q(1, 1);
    q(0, n - 1) = q(0, n - 2) + cot * q(1, n - 2);
    c.p = q;
  } else {
    VectorXd lo = VectorXd::Zero(n), di = VectorXd::Ones(n), up = VectorXd::Zero(n);
    VectorXd rhs = VectorXd::Zero(n);
    for (int i = 1; i + 1 < n; ++i) {
      double lam = dt * m.a(i);
      lo(i) = -lam;
      di(i) = 1 + 2 * lam;
      up(i) = -lam;
      rhs(i) = c.p(1, i);
    }
    tridiag_solve(lo, di, up, rhs);  // rows 0 and N read y = 0
    VectorXd ynew = rhs;
    for (int i = 1; i + 1 < n; ++i) rhs(i) = c.p(0, i);
    // node 0 and node N rows pin the neighbour onto the fixed tangent ray:
    // x_0 - x_1 = -cot * y_1 makes (p_1 - p_0) parallel to the ray exactly
    di(0) = 1;
    up(0) = -1;
    rhs(0) = -cot * ynew(1);
    di(n - 1) = 1;
    lo(n - 1) = -1;
    rhs(n - 1) = cot * ynew(n - 2);
    tridiag_solve(lo, di, up, rhs);
    c.p.row(0) = rhs.transpose();
    c.p.row(1) = ynew.transpose();
  }
  s.t += dt;
  s.step_count += 1;
  s.last_dt = dt;
}

}  // namespace

const char* halt_name(Halt h) {
  switch (h) {
    case Halt::none: return "none";
    case Halt::horizon: return "horizon";
    case Halt::length_min: return "length_min";
    case Halt::curvature_max: return "curvature_max";
    case Halt::junction_gap: return "junction_gap";
    case Halt::singular_dt: return "singular_dt";
    case Halt::tangled: return "tangled";
    case Halt::step_limit: return "step_limit";
  }
  return "?";
}

PlanarCurve regrid(const PlanarCurve& c) { return resample_uniform(c, c.n()); }

double junction_gap(const PlanarCurve& c) { return c.p(0, c.n() - 1) - c.p(0, 0); }

Halt step(FlowState& s, const StepPolicy& p, double dt_ceiling) {
  if (!(p.cfl > 0) || p.cfl > 1) throw std::invalid_argument("cfl must be in (0, 1]");
  if (s.curve.n() < 4) throw std::invalid_argument("curve too short to step");
  Metric m = metric_of(s.curve);
  if (m.collapsed) {
    PlanarCurve r = regrid(s.curve);
    enforce_junction_compatibility(r, s.bc_angle);
    s.curve = std::move(r);
    m = metric_of(s.curve);
    if (m.collapsed) return Halt::tangled;
  }
  double kmax = 0;
  if (p.curvature_adaptive) kmax = compute_frames(s.curve).kappa.cwiseAbs().maxCoeff();
  double dt = pick_dt(p, m, kmax, dt_ceiling);
  if (!(dt >= 1e-14)) return Halt::singular_dt;
  advance(s, p, m, dt);
  if (p.regrid_every > 0 && s.step_count % p.regrid_every == 0) {
    PlanarCurve r = regrid(s.curve);
    enforce_junction_compatibility(r, s.bc_angle);
    s.curve = std::move(r);
  }
  return Halt::none;
}

RunResult run(FlowState& s, const StepPolicy& p, const StopRules& stops,
              const std::function<void(const FlowState&)>& on_sample, int sample_every) {
  const long start = s.step_count;
  if (sample_every < 1) sample_every = 1;
  auto fire = [&]() -> Halt {
    if (std::isfinite(stops.horizon) &&
        stops.horizon - s.t <= 1e-13 * std::max(1.0, std::abs(stops.horizon)))
      return Halt::horizon;
    if (length(s.curve) <= stops.l_min) return Halt::length_min;
    if (stops.gap_min > 0 && junction_gap(s.curve) <= stops.gap_min) return Halt::junction_gap;
    if (std::isfinite(stops.kappa_max) &&
        compute_frames(s.curve).kappa.cwiseAbs().maxCoeff() >= stops.kappa_max)
      return Halt::curvature_max;
    if (s.step_count - start >= stops.max_steps) return Halt::step_limit;
    return Halt::none;
  };
  if (on_sample) on_sample(s);
  RunResult res;
  for (;;) {
    res.reason = fire();
    if (res.reason != Halt::none) break;
    res.reason = step(s, p, stops.horizon - s.t);
    if (res.reason != Halt::none) break;
    if (on_sample && (s.step_count - start) % sample_every == 0) on_sample(s);
  }
  if (on_sample && (s.step_count - start) % sample_every != 0) on_sample(s);
  res.t_final = s.t;
  res.steps = s.step_count - start;
  return res;
}

PlanarCurve step_pinned(const PlanarCurve& c, double dt, Scheme scheme) {
  Metric m = metric_of(c);
  const int n = c.n();
  PlanarCurve out = c;
  if (scheme == Scheme::explicit_euler) {
    for (int i = 1; i + 1 < n; ++i)
      out.p.col(i) += dt * m.a(i) * (c.p.col(i + 1) - 2.0 * c.p.col(i) + c.p.col(i - 1));
    return out;
  }
  VectorXd lo(n), di(n), up(n), rhs(n);
  for (int coord = 0; coord < 2; ++coord) {
    lo.setZero();
    di.setOnes();
    up.setZero();
    rhs(0) = c.p(coord, 0);
    rhs(n - 1) = c.p(coord, n - 1);
    for (int i = 1; i + 1 < n; ++i) {
      double lam = dt * m.a(i);
      lo(i) = -lam;
      di(i) = 1 + 2 * lam;
      up(i) = -lam;
      rhs(i) = c.p(coord, i);
    }
    tridiag_solve(lo, di, up, rhs);
    out.p.row(coord) = rhs.transpose();
  }
  return out;
}

}  // namespace lensflow::flow

#include "lensflow/graph_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lensflow/tridiag.hpp"

namespace lensflow::graph {
namespace {

const double kSq3 = std::sqrt(3.0);

double max_interior_slope(const GraphState& s) {
  const int m = static_cast<int>(s.f.size()) - 1;
  const double hx = (s.b - s.a) / m;
  double worst = 0;
  for (int j = 1; j < m; ++j)
    worst = std::max(worst, std::abs(s.f(j + 1) - s.f(j - 1)) / (2 * hx));
  return worst;
}

}  // namespace

const char* halt_name(GraphHalt h) {
  switch (h) {
    case GraphHalt::none: return "none";
    case GraphHalt::vplus_exhausted: return "vplus_exhausted";
    case GraphHalt::right_pinch: return "right_pinch";
    case GraphHalt::slope_breach: return "slope_breach";
    case GraphHalt::timeout: return "timeout";
  }
  return "?";
}

GraphState make_state(const GraphDatum& d, int segments) {
  if (segments < 8) throw std::invalid_argument("mesh too coarse");
  GraphState s;
  s.f.resize(segments + 1);
  for (int j = 0; j <= segments; ++j) s.f(j) = d.f(double(j) / segments);
  s.f(0) = 0;
  s.f(segments) = 0;
  // seat the one-sided 3-point endpoint slopes exactly on +-sqrt(3)
  const double hx = 1.0 / segments;
  s.f(1) = (s.f(2) + 2 * hx * kSq3) / 4;
  s.f(segments - 1) = (s.f(segments - 2) + 2 * hx * kSq3) / 4;
  return s;
}

PlanarCurve to_curve(const GraphState& s) {
  const int n = static_cast<int>(s.f.size());
  PlanarCurve c;
  c.p.resize(2, n);
  for (int j = 0; j < n; ++j) {
    c.p(0, j) = s.a + (s.b - s.a) * j / (n - 1);
    c.p(1, j) = s.f(j);
  }
  return c;
}

void gstep(GraphState& s, double cfl) {
  const int m = static_cast<int>(s.f.size()) - 1;
  const Eigen::VectorXd& f = s.f;
  const double hx = (s.b - s.a) / m;

  Eigen::VectorXd fx(m + 1);
  for (int j = 1; j < m; ++j) fx(j) = (f(j + 1) - f(j - 1)) / (2 * hx);
  fx(0) = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * hx);
  fx(m) = (3 * f(m) - 4 * f(m - 1) + f(m - 2)) / (2 * hx);

  double fxx_a = (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / (hx * hx);
  double fxx_b = (2 * f(m) - 5 * f(m - 1) + 4 * f(m - 2) - f(m - 3)) / (hx * hx);
  double ap = -fxx_a / (4 * kSq3);
  double bp = +fxx_b / (4 * kSq3);

  double dt = cfl * hx * hx;
  double vmax = std::max({std::abs(ap), std::abs(bp), 1e-30});
  dt = std::min(dt, 0.25 * hx / vmax);

  const double an = s.a + dt * ap;
  const double bn = s.b + dt * bp;
  const double hn = (bn - an) / m;

  Eigen::VectorXd lo = Eigen::VectorXd::Zero(m + 1), di = Eigen::VectorXd::Ones(m + 1),
                  up = Eigen::VectorXd::Zero(m + 1), rhs = f;
  for (int j = 1; j < m; ++j) {
    double xdot = ap + (double(j) / m) * (bp - ap);
    double lam = dt / ((1 + fx(j) * fx(j)) * hn * hn);
    double w = dt * xdot / (2 * hn);
    di(j) = 1 + 2 * lam;
    lo(j) = -lam + w;
    up(j) = -lam - w;
  }
  rhs(0) = 0;
  rhs(m) = 0;
  // junction rows: one-sided slope pinned to +-sqrt(3) on the new mesh
  lo(1) = 0;
  di(1) = 4;
  up(1) = -1;
  rhs(1) = 2 * hn * kSq3;
  lo(m - 1) = -1;
  di(m - 1) = 4;
  up(m - 1) = 0;
  rhs(m - 1) = 2 * hn * kSq3;

  tridiag_solve(lo, di, up, rhs);
  s.f = rhs;
  s.a = an;
  s.b = bn;
  s.t += dt;
  s.step_count += 1;
  s.last_dt = dt;
}

void gstep_pinned(GraphState& s, double cfl) {
  const int m = static_cast<int>(s.f.size()) - 1;
  const Eigen::VectorXd& f = s.f;
  const double hx = (s.b - s.a) / m;

  Eigen::VectorXd fx(m + 1);
  for (int j = 1; j < m; ++j) fx(j) = (f(j + 1) - f(j - 1)) / (2 * hx);

  double dt = cfl * hx * hx;
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(m + 1), di = Eigen::VectorXd::Ones(m + 1),
                  up = Eigen::VectorXd::Zero(m + 1), rhs = f;
  for (int j = 1; j < m; ++j) {
    double lam = dt / ((1 + fx(j) * fx(j)) * hx * hx);
    di(j) = 1 + 2 * lam;
    lo(j) = -lam;
    up(j) = -lam;
  }
  rhs(0) = f(0);
  rhs(m) = f(m);
  tridiag_solve(lo, di, up, rhs);
  s.f = rhs;
  s.t += dt;
  s.step_count += 1;
  s.last_dt = dt;
}

LobeTrack track_lobes(const GraphState& s) {
  const int m = static_cast<int>(s.f.size()) - 1;
  const Eigen::VectorXd& f = s.f;
  const double hx = (s.b - s.a) / m;
  auto xs = [&](int j) { return s.a + (s.b - s.a) * j / m; };

  LobeTrack tr;
  int i = -1;
  for (int j = 0; j < m; ++j)
    if (f(j) > 0 && f(j + 1) <= 0) {
      i = j;
      break;
    }
  if (i < 0) return tr;
  int k = -1;
  for (int j = i; j < m; ++j)
    if (f(j) < 0 && f(j + 1) >= 0) {
      k = j;
      break;
    }
  if (k < 0) return tr;

  tr.valid = true;
  tr.x1 = xs(i) + hx * f(i) / (f(i) - f(i + 1));
  tr.x2 = xs(k) + hx * f(k) / (f(k) - f(k + 1));
  double vp = 0;
  for (int j = 0; j < i; ++j) vp += 0.5 * (f(j) + f(j + 1)) * hx;
  tr.v_plus = vp + 0.5 * f(i) * (tr.x1 - xs(i));
  double vm = 0.5 * f(i + 1) * (xs(i + 1) - tr.x1);
  for (int j = i + 1; j < k; ++j) vm += 0.5 * (f(j) + f(j + 1)) * hx;
  vm += 0.5 * f(k) * (tr.x2 - xs(k));
  tr.v_minus = -vm;
  return tr;
}

GraphRunResult run(GraphState& s, const GraphPolicy& pol,
                   const std::function<void(const GraphState&)>& on_sample, int sample_every) {
  if (!(pol.cfl > 0) || pol.cfl > 1) throw std::invalid_argument("cfl must be in (0, 1]");
  if (sample_every < 1) sample_every = 1;
  const long start = s.step_count;
  const double slope_cap = pol.slope_factor * max_interior_slope(s);
  GraphRunResult res;
  for (;;) {
    const int m = static_cast<int>(s.f.size()) - 1;
    const double hx = (s.b - s.a) / m;
    LobeTrack tr = track_lobes(s);
    if (!tr.valid || s.f(1) <= 0 || tr.x1 - s.a <= 3 * hx) {
      res.reason = GraphHalt::vplus_exhausted;
      break;
    }
    if (s.b - tr.x2 <= 3 * hx) {
      res.reason = GraphHalt::right_pinch;
      break;
    }
    if (max_interior_slope(s) > slope_cap) {
      res.reason = GraphHalt::slope_breach;
      break;
    }
    if (s.t > pol.horizon) {
      res.reason = GraphHalt::timeout;
      break;
    }
    if (on_sample && (s.step_count - start) % sample_every == 0) on_sample(s);
    gstep(s, pol.cfl);
  }
  // the loop samples before stepping, so the halting state is still unseen
  if (on_sample) on_sample(s);
  res.t_final = s.t;
  res.steps = s.step_count - start;
  return res;
}

}  // namespace lensflow::graph

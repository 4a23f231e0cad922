#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lensflow/flow.hpp"
#include "lensflow/initial_data.hpp"

using namespace lensflow;
using flow::FlowState;
using flow::Halt;
using flow::StepPolicy;
using flow::StopRules;

namespace {

const double kPi = 3.14159265358979323846;

FlowState lens_state(int n, double scale = 1.0) {
  ScenarioSpec spec;
  spec.n = n;
  spec.scale = scale;
  FlowState s;
  s.curve = build_curve(spec);
  s.bc_angle = spec.bc_angle();
  return s;
}

double lsq_slope(const std::vector<double>& t, const std::vector<double>& v) {
  double st = 0, sv = 0, stt = 0, stv = 0;
  int m = static_cast<int>(t.size());
  for (int i = 0; i < m; ++i) {
    st += t[i];
    sv += v[i];
    stt += t[i] * t[i];
    stv += t[i] * v[i];
  }
  return (m * stv - st * sv) / (m * stt - st * st);
}

double area_slope_err(int n) {
  FlowState s = lens_state(n);
  StepPolicy pol;
  StopRules stops;
  stops.horizon = 0.25;
  std::vector<double> ts, as;
  flow::run(s, pol, stops, [&](const FlowState& st) {
    ts.push_back(st.t);
    as.push_back(enclosed_area(st.curve));
  });
  double target = -4 * kPi / 3;
  return std::fabs(lsq_slope(ts, as) - target) / std::fabs(target);
}

struct LawResid {
  double worst_rel = 0;
};

// residual of dL/dt + int kappa^2 ds - (xdot_N - xdot_0)/2, relative to the
// dissipation term, via centered differences of a densely sampled run
LawResid length_law_resid(int n, double cfl) {
  FlowState s = lens_state(n);
  StepPolicy pol;
  pol.cfl = cfl;
  StopRules stops;
  stops.horizon = 0.2;
  std::vector<double> ts, Ls, x0s, xNs, k2s;
  flow::run(s, pol, stops, [&](const FlowState& st) {
    FrameSamples f = compute_frames(st.curve);
    ts.push_back(st.t);
    Ls.push_back(length(st.curve));
    x0s.push_back(st.curve.p(0, 0));
    xNs.push_back(st.curve.p(0, st.curve.n() - 1));
    double k2 = 0;
    for (int i = 0; i < st.curve.n(); ++i) k2 += f.kappa(i) * f.kappa(i) * f.ds(i);
    k2s.push_back(k2);
  });
  LawResid out;
  for (size_t i = 10; i + 10 < ts.size(); i += 25) {
    double dt2 = ts[i + 1] - ts[i - 1];
    double resid = (Ls[i + 1] - Ls[i - 1]) / dt2 + k2s[i] -
                   0.5 * ((xNs[i + 1] - xNs[i - 1]) / dt2 - (x0s[i + 1] - x0s[i - 1]) / dt2);
    out.worst_rel = std::max(out.worst_rel, std::fabs(resid) / k2s[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("uniform straight segment is a fixed point of the interior update") {
  PlanarCurve c;
  c.p.resize(2, 21);
  for (int i = 0; i <= 20; ++i) c.p.col(i) = 0.25 * i * Eigen::Vector2d(0.6, 0.8);
  PlanarCurve e = flow::step_pinned(c, 1e-3, flow::Scheme::explicit_euler);
  CHECK((e.p - c.p).cwiseAbs().maxCoeff() == 0.0);  // the update adds exact zeros
  PlanarCurve s = flow::step_pinned(c, 1e-3, flow::Scheme::semi_implicit);
  CHECK((s.p - c.p).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("lens run keeps endpoint invariants and monotone quantities") {
  FlowState s = lens_state(200);
  double L0 = length(s.curve);
  double w0 = flow::junction_gap(s.curve);
  double g0 = embed_ratio(s.curve).g;
  double g_floor = std::min(g0, 4 * std::sqrt(3.0));
  StepPolicy pol;
  StopRules stops;
  stops.horizon = 0.35;
  double prev_area = std::numeric_limits<double>::infinity();
  int samples = 0;
  flow::run(s, pol, stops, [&](const FlowState& st) {
    const int n = st.curve.n();
    CHECK(st.curve.p(1, 0) == 0.0);
    CHECK(st.curve.p(1, n - 1) == 0.0);
    CompatibilityReport rep = validate(st.curve, st.bc_angle);
    CHECK(rep.tangent_angle_error < 1e-8);
    double area = enclosed_area(st.curve);
    CHECK(area < prev_area + 1e-12);
    prev_area = area;
    double w = flow::junction_gap(st.curve);
    CHECK(length(st.curve) <= L0 - 0.5 * w0 + 0.5 * w + 0.01);
    CHECK(embed_ratio(st.curve).g >= g_floor - 0.05 * g_floor);
    ++samples;
  }, 10);
  CHECK(samples > 5);
}

TEST_CASE("lens area drains at 4*pi/3 and the rate sharpens under refinement") {
  double e200 = area_slope_err(200);
  double e400 = area_slope_err(400);
  double e800 = area_slope_err(800);
  CHECK(e400 < 0.01);           // observed 1.9e-3
  CHECK(e800 < 0.7 * e200);     // observed ratio 0.28
}

TEST_CASE("lens extinction time matches the area clock") {
  FlowState s = lens_state(400);
  double t_pred = 3 * enclosed_area(s.curve) / (4 * kPi);
  StepPolicy pol;
  StopRules stops;
  stops.l_min = 1e-3;
  flow::RunResult rr = flow::run(s, pol, stops);
  CHECK(rr.reason == Halt::length_min);
  CHECK(length(s.curve) <= 1e-3);
  CHECK(std::fabs(rr.t_final - t_pred) / t_pred < 0.02);  // observed 5.3e-3
}

TEST_CASE("shrinker profile flows self-similarly over the first half-life") {
  ScenarioSpec spec;
  spec.n = 400;
  PlanarCurve c0 = build_curve(spec);
  FlowState s;
  s.curve = c0;
  s.bc_angle = spec.bc_angle();
  StepPolicy pol;
  StopRules stops;
  stops.horizon = 0.375;  // the scale factor sqrt(1 - 2t) halves here
  double worst = 0;
  flow::run(s, pol, stops, [&](const FlowState& st) {
    double lam = 1.0 / std::sqrt(2 * (0.5 - st.t));
    worst = std::max(worst, hausdorff_distance(scaled(st.curve, lam), c0));
  }, 10);
  CHECK(worst < 1e-2);  // observed 5.5e-3
}

TEST_CASE("zero horizon returns before stepping") {
  FlowState s = lens_state(100);
  Eigen::Matrix2Xd before = s.curve.p;
  StepPolicy pol;
  StopRules stops;
  stops.horizon = 0;
  flow::RunResult rr = flow::run(s, pol, stops);
  CHECK(rr.reason == Halt::horizon);
  CHECK(rr.steps == 0);
  CHECK(s.t == 0.0);
  CHECK((s.curve.p - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("double bubble halts on the junction gap with bounded curvature") {
  ScenarioSpec spec;
  spec.n = 400;
  spec.family = ScenarioSpec::Family::double_bubble;
  FlowState s;
  s.curve = build_curve(spec);
  s.bc_angle = spec.bc_angle();
  StepPolicy pol;
  StopRules stops;
  stops.gap_min = 0.2;
  double k_worst = 0;
  flow::RunResult rr = flow::run(s, pol, stops, [&](const FlowState& st) {
    k_worst = std::max(k_worst, compute_frames(st.curve).kappa.cwiseAbs().maxCoeff());
  }, 5);
  CHECK(rr.reason == Halt::junction_gap);
  CHECK(flow::junction_gap(s.curve) <= 0.2);
  CHECK(k_worst < 20.0);  // observed 8.2
}

TEST_CASE("length dissipation identity holds to first order in h and dt") {
  LawResid coarse = length_law_resid(400, 0.4);
  LawResid fine = length_law_resid(800, 0.2);
  CHECK(coarse.worst_rel < 0.03);               // observed 1.3e-2
  CHECK(fine.worst_rel < 0.6 * coarse.worst_rel);  // observed ratio 0.33
}

TEST_CASE("regrid resamples to uniform arclength and fixes nothing twice") {
  SUBCASE("already uniform nodes stay put") {
    // equal chords by construction: uniform-angle semicircle
    PlanarCurve u;
    int n = 200;
    u.p.resize(2, n);
    for (int i = 0; i < n; ++i) {
      double th = kPi * (n - 1 - i) / (n - 1);
      u.p.col(i) = Eigen::Vector2d(std::cos(th), std::sin(th));
    }
    PlanarCurve v = flow::regrid(u);
    CHECK((v.p - u.p).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("clustered nodes on a segment spread exactly uniformly") {
    PlanarCurve c;
    int n = 30;
    c.p.resize(2, n);
    double x = 0;
    double step = 1.0;
    for (int i = 0; i < n; ++i) {
      c.p.col(i) = Eigen::Vector2d(x, 0.5 * x);
      x += step;
      step *= 0.8;
    }
    PlanarCurve r = flow::regrid(c);
    CHECK(r.p.col(0) == c.p.col(0));
    CHECK(r.p.col(n - 1) == c.p.col(n - 1));
    double total = length(c);
    double want = total / (n - 1);
    for (int i = 0; i + 1 < n; ++i)
      CHECK((r.p.col(i + 1) - r.p.col(i)).norm() == doctest::Approx(want).epsilon(1e-14));
  }

  SUBCASE("randomly spaced semicircle becomes uniform to 1e-6 with length kept") {
    int n = 1800;
    uint64_t z = 20260816;
    auto next = [&]() {
      z += 0x9e3779b97f4a7c15ull;
      uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
      return double((x ^ (x >> 31)) >> 11) * 0x1.0p-53;
    };
    std::vector<double> w(n - 1);
    double tot = 0;
    for (double& wi : w) {
      wi = 0.5 + next();
      tot += wi;
    }
    PlanarCurve c;
    c.p.resize(2, n);
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      double th = kPi * (1 - acc / tot);
      c.p.col(i) = Eigen::Vector2d(std::cos(th), std::sin(th));
      if (i + 1 < n) acc += w[i];
    }
    c.p(1, 0) = 0;
    c.p(1, n - 1) = 0;
    double len_before = length(c);
    PlanarCurve r = flow::regrid(c);
    double hi = 0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) {
      double h = (r.p.col(i + 1) - r.p.col(i)).norm();
      hi = std::max(hi, h);
      lo = std::min(lo, h);
    }
    CHECK(hi / lo < 1 + 1e-6);
    double h_bar = len_before / (n - 1);
    CHECK(std::fabs(length(r) - len_before) < h_bar * h_bar);
  }
}

TEST_CASE("dt floor reports a singular stop without touching the state") {
  FlowState s = lens_state(100);
  Eigen::Matrix2Xd before = s.curve.p;
  StepPolicy pol;
  pol.dt_cap = 1e-15;
  CHECK(flow::step(s, pol) == Halt::singular_dt);
  CHECK(s.t == 0.0);
  CHECK(s.step_count == 0);
  CHECK((s.curve.p - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a collapsed segment is regridded and the step retried") {
  FlowState s = lens_state(100);
  s.curve.p.col(50) = s.curve.p.col(51) + Eigen::Vector2d(1e-13, 0);
  StepPolicy pol;
  CHECK(flow::step(s, pol) == Halt::none);
  CHECK(s.t > 0);
  double mean = length(s.curve) / (s.curve.n() - 1);
  double hmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < s.curve.n(); ++i)
    hmin = std::min(hmin, (s.curve.p.col(i + 1) - s.curve.p.col(i)).norm());
  CHECK(hmin > 0.1 * mean);
}

TEST_CASE("curvature-adaptive dt engages on small lenses") {
  FlowState s = lens_state(400, 1e-3);
  double kmax = compute_frames(s.curve).kappa.cwiseAbs().maxCoeff();
  StepPolicy pol;
  CHECK(flow::step(s, pol) == Halt::none);
  CHECK(s.last_dt <= 1.1 * pol.cfl / (kmax * kmax));
  FlowState s2 = lens_state(400, 1e-3);
  StepPolicy loose;
  loose.curvature_adaptive = false;
  CHECK(flow::step(s2, loose) == Halt::none);
  CHECK(s2.last_dt > 3 * s.last_dt);
}

TEST_CASE("bad policies and curves are rejected") {
  FlowState s = lens_state(50);
  StepPolicy pol;
  pol.cfl = 0;
  CHECK_THROWS_AS(flow::step(s, pol), std::invalid_argument);
  pol.cfl = 1.5;
  CHECK_THROWS_AS(flow::step(s, pol), std::invalid_argument);
  FlowState tiny;
  tiny.curve.p.resize(2, 3);
  tiny.curve.p << 0, 1, 2, 0, 1, 0;
  tiny.bc_angle = kPi / 3;
  StepPolicy ok;
  CHECK_THROWS_AS(flow::step(tiny, ok), std::invalid_argument);
}

TEST_CASE("sampling starts at the initial state and ends at the final one") {
  FlowState s = lens_state(100);
  StepPolicy pol;
  StopRules stops;
  stops.horizon = 0.05;
  std::vector<double> seen;
  flow::RunResult rr = flow::run(s, pol, stops, [&](const FlowState& st) {
    seen.push_back(st.t);
  }, 7);
  REQUIRE(seen.size() >= 2);
  CHECK(seen.front() == 0.0);
  CHECK(seen.back() == doctest::Approx(rr.t_final).epsilon(1e-15));
  for (size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] > seen[i - 1]);
}

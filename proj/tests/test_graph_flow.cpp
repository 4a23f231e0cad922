#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lensflow/graph_flow.hpp"
#include "lensflow/initial_data.hpp"

using namespace lensflow;
using graph::GraphHalt;
using graph::GraphPolicy;
using graph::GraphState;
using graph::LobeTrack;

namespace {

const double kPi = 3.14159265358979323846;
const double kSq3 = std::sqrt(3.0);

GraphState canonical_state(int m) {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  return graph::make_state(build_graph(spec), m);
}

GraphState mirrored_state(int m) {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  GraphState s;
  s.f.resize(m + 1);
  for (int j = 0; j <= m; ++j) s.f(j) = d.f(1.0 - double(j) / m);
  s.f(0) = 0;
  s.f(m) = 0;
  double hx = 1.0 / m;
  s.f(1) = (s.f(2) + 2 * hx * kSq3) / 4;
  s.f(m - 1) = (s.f(m - 2) + 2 * hx * kSq3) / 4;
  return s;
}

double max_slope(const GraphState& s) {
  int m = static_cast<int>(s.f.size()) - 1;
  double hx = (s.b - s.a) / m, w = 0;
  for (int j = 1; j < m; ++j)
    w = std::max(w, std::abs(s.f(j + 1) - s.f(j - 1)) / (2 * hx));
  return w;
}

double end_slope_err(const GraphState& s) {
  int m = static_cast<int>(s.f.size()) - 1;
  double hn = (s.b - s.a) / m;
  double left = (-3 * s.f(0) + 4 * s.f(1) - s.f(2)) / (2 * hn);
  double right = (3 * s.f(m) - 4 * s.f(m - 1) + s.f(m - 2)) / (2 * hn);
  return std::max(std::abs(left - kSq3), std::abs(right + kSq3));
}

}  // namespace

TEST_CASE("sampled datum carries its design integrals and exact end slopes") {
  GraphState s = canonical_state(2400);
  CHECK(s.f(0) == 0.0);
  CHECK(s.f(2400) == 0.0);
  CHECK(end_slope_err(s) < 1e-12);
  LobeTrack tr = graph::track_lobes(s);
  REQUIRE(tr.valid);
  CHECK(std::fabs(tr.v_plus - 0.05) < 1e-6);   // observed 7.4e-8
  CHECK(std::fabs(tr.v_minus - 0.30) < 1e-6);  // observed 2.2e-7
  CHECK(tr.x1 == doctest::Approx(0.36).epsilon(1e-5));
  CHECK(tr.x2 == doctest::Approx(0.66).epsilon(1e-5));
  CHECK(s.a < tr.x1);
  CHECK(tr.x1 < tr.x2);
  CHECK(tr.x2 < s.b);
}

TEST_CASE("symmetric profile centers its sign changes") {
  GraphState s;
  int m = 301;
  s.f.resize(m + 1);
  for (int j = 0; j <= m; ++j) s.f(j) = std::sin(3 * kPi * j / m);
  LobeTrack tr = graph::track_lobes(s);
  REQUIRE(tr.valid);
  CHECK(std::fabs(tr.x1 + tr.x2 - (s.a + s.b)) < 1e-10);
  CHECK(tr.v_plus == doctest::Approx(tr.v_minus / 1.0).epsilon(1e-6));  // equal lobes
}

TEST_CASE("pinned eigenmode decays at the heat-equation rate") {
  int m = 200;
  GraphState s;
  s.f.resize(m + 1);
  double amp = 1e-3;
  for (int j = 0; j <= m; ++j) s.f(j) = amp * std::sin(kPi * j / m);
  s.f(0) = 0;
  s.f(m) = 0;
  double f0 = s.f(m / 2);
  while (s.t < 0.02) graph::gstep_pinned(s, 0.4);
  double rate = std::log(f0 / s.f(m / 2)) / s.t;
  CHECK(std::fabs(rate - kPi * kPi) / (kPi * kPi) < 0.01);  // observed 7.1e-5
  CHECK(s.f(0) == 0.0);
  CHECK(s.f(m) == 0.0);
}

TEST_CASE("stepping keeps the endpoint pins and slope rows exact") {
  GraphState s = canonical_state(400);
  for (int k = 0; k < 200; ++k) graph::gstep(s, 0.4);
  CHECK(s.f(0) == 0.0);
  CHECK(s.f(400) == 0.0);
  CHECK(end_slope_err(s) < 1e-10);
  CHECK(s.b > s.a);
  CHECK(s.step_count == 200);
  CHECK(s.last_dt > 0);
}

TEST_CASE("endpoint speed matches the one-sided curvature reading") {
  // a dome f = s x (1 - x) has f'' = -2s everywhere, and the end stencil
  // (2,-5,4,-1)/h^2 reproduces that exactly, so one step moves each
  // endpoint inward by dt * 2s / (4 sqrt(3)).
  int m = 256;
  double sl = 0.7;
  GraphState st;
  st.a = 0;
  st.b = 1;
  st.f.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    double x = double(j) / m;
    st.f(j) = sl * x * (1 - x);
  }
  graph::gstep(st, 0.4);
  double rate = 2 * sl / (4 * std::sqrt(3.0));
  CHECK(st.a == doctest::Approx(st.last_dt * rate).epsilon(1e-12));
  CHECK(1.0 - st.b == doctest::Approx(st.last_dt * rate).epsilon(1e-12));
}

TEST_CASE("lobe areas obey the drainage bounds until the left lobe dies") {
  GraphState s = canonical_state(800);
  double fx0 = max_slope(s);
  std::vector<double> ts, vps, vms;
  double slope_worst = 0;
  GraphPolicy pol;
  auto rec = [&](const GraphState& st) {
    LobeTrack tr = graph::track_lobes(st);
    if (!tr.valid) return;
    ts.push_back(st.t);
    vps.push_back(tr.v_plus);
    vms.push_back(tr.v_minus);
    slope_worst = std::max(slope_worst, max_slope(st));
  };
  graph::GraphRunResult rr = graph::run(s, pol, rec, 10);

  CHECK(rr.reason == GraphHalt::vplus_exhausted);
  CHECK(rr.t_final <= 3 * 0.05 / kPi + 5e-4);  // observed 0.023965

  double wp = -1e9, wm = 1e9;
  for (size_t i = 0; i < ts.size(); ++i) {
    wp = std::max(wp, vps[i] - (0.05 - kPi / 3 * ts[i]));
    wm = std::min(wm, vms[i] - (0.30 - kPi * ts[i]));
  }
  CHECK(wp <= 1e-3);   // observed -6.7e-7
  CHECK(wm >= -1e-3);  // observed +2.0e-6

  // drainage-rate bounds, skipping the final sliver samples where the
  // positive lobe drops below quadrature resolution
  double dvp = -1e9, dvm = 1e9;
  for (size_t i = 1; i + 1 < ts.size(); ++i) {
    if (vps[i] < 1e-3) continue;
    double dt2 = ts[i + 1] - ts[i - 1];
    dvp = std::max(dvp, (vps[i + 1] - vps[i - 1]) / dt2);
    dvm = std::min(dvm, (vms[i + 1] - vms[i - 1]) / dt2);
  }
  CHECK(dvp <= -kPi / 3 + 0.1);  // observed margin -0.55
  CHECK(dvm >= -kPi - 0.1);      // observed margin +0.53

  // the left lobe dies while the middle one is still fat
  LobeTrack tf = graph::track_lobes(s);
  REQUIRE(tf.valid);
  CHECK(tf.v_minus > 0.1);  // observed 0.2449

  // Lipschitz bound: slopes never exceed the initial maximum
  CHECK(slope_worst <= fx0 * (1 + 1e-6));
}

TEST_CASE("mirrored datum pinches on the right at the mirrored event time") {
  GraphState s = mirrored_state(800);
  GraphPolicy pol;
  graph::GraphRunResult rr = graph::run(s, pol);
  CHECK(rr.reason == GraphHalt::right_pinch);
  CHECK(rr.t_final == doctest::Approx(0.023965).epsilon(1e-2));
}

TEST_CASE("timeout fires when nothing else does") {
  GraphState s = canonical_state(200);
  GraphPolicy pol;
  pol.horizon = 1e-4;
  graph::GraphRunResult rr = graph::run(s, pol);
  CHECK(rr.reason == GraphHalt::timeout);
  CHECK(rr.t_final > 1e-4);
  CHECK(rr.t_final < 2e-4);
}

TEST_CASE("sampling covers the initial and final states in order") {
  GraphState s = canonical_state(200);
  GraphPolicy pol;
  pol.horizon = 2e-4;
  std::vector<double> seen;
  graph::GraphRunResult rr =
      graph::run(s, pol, [&](const GraphState& st) { seen.push_back(st.t); }, 13);
  REQUIRE(seen.size() >= 2);
  CHECK(seen.front() == 0.0);
  CHECK(seen.back() == doctest::Approx(rr.t_final).epsilon(1e-15));
  for (size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] > seen[i - 1]);
}

TEST_CASE("bad arguments are rejected") {
  GraphState s = canonical_state(100);
  GraphPolicy pol;
  pol.cfl = 0;
  CHECK_THROWS_AS(graph::run(s, pol), std::invalid_argument);
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  CHECK_THROWS_AS(graph::make_state(d, 4), std::invalid_argument);
}

TEST_CASE("graph state converts to a plottable curve") {
  GraphState s = canonical_state(300);
  PlanarCurve c = to_curve(s);
  CHECK(c.n() == 301);
  CHECK(c.p(0, 0) == s.a);
  CHECK(c.p(0, 300) == s.b);
  CHECK(c.p(1, 150) == s.f(150));
  FrameSamples f = compute_frames(c);  // strictly increasing xs keep it regular
  CHECK(std::isfinite(f.kappa.cwiseAbs().maxCoeff()));
}

// scratch measurements for the graph flow; not installed
#include <cmath>
#include <cstdio>
#include <vector>

#include "lensflow/graph_flow.hpp"
#include "lensflow/initial_data.hpp"

using namespace lensflow;

static void bounds_run(int M, bool mirror) {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  graph::GraphState s = graph::make_state(d, M);
  if (mirror) {
    for (int j = 0; j <= M; ++j) s.f(j) = d.f(1.0 - double(j) / M);
    s.f(0) = 0; s.f(M) = 0;
    double hx = 1.0 / M;
    s.f(1) = (s.f(2) + 2 * hx * std::sqrt(3.0)) / 4;
    s.f(M - 1) = (s.f(M - 2) + 2 * hx * std::sqrt(3.0)) / 4;
  }
  graph::LobeTrack t0 = graph::track_lobes(s);
  printf("M=%d mirror=%d t0: x1=%.8f x2=%.8f vP=%.10f vM=%.10f\n", M, (int)mirror, t0.x1, t0.x2,
         t0.v_plus, t0.v_minus);
  double fx0 = 0;
  {
    double hx = 1.0 / M;
    for (int j = 1; j < M; ++j)
      fx0 = std::max(fx0, std::abs(s.f(j + 1) - s.f(j - 1)) / (2 * hx));
  }
  std::vector<double> ts, vps, vms, fxs;
  graph::GraphPolicy pol;
  auto rec = [&](const graph::GraphState& st) {
    graph::LobeTrack tr = graph::track_lobes(st);
    if (!tr.valid) return;
    ts.push_back(st.t);
    vps.push_back(tr.v_plus);
    vms.push_back(tr.v_minus);
    double hx = (st.b - st.a) / M, w = 0;
    for (int j = 1; j < M; ++j)
      w = std::max(w, std::abs(st.f(j + 1) - st.f(j - 1)) / (2 * hx));
    fxs.push_back(w);
  };
  graph::GraphRunResult rr = graph::run(s, pol, rec, 10);
  double pi = M_PI;
  double wp = -1e9, wm = 1e9, wfx = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    wp = std::max(wp, vps[i] - (0.05 - pi / 3 * ts[i]));
    wm = std::min(wm, vms[i] - (0.30 - pi * ts[i]));
    wfx = std::max(wfx, fxs[i]);
  }
  // derivative bounds via centered differences of the sampled series
  double dvp_worst = -1e9, dvm_worst = 1e9;
  size_t iworst = 0;
  for (size_t i = 1; i + 1 < ts.size(); ++i) {
    double dt2 = ts[i + 1] - ts[i - 1];
    double ex = (vps[i + 1] - vps[i - 1]) / dt2 + pi / 3;
    if (ex > dvp_worst) { dvp_worst = ex; iworst = i; }
    dvm_worst = std::min(dvm_worst, (vms[i + 1] - vms[i - 1]) / dt2 + pi);
  }
  printf("  dV+ worst at sample %zu/%zu t=%.6f vP=%.3e (t_end=%.6f)\n", iworst, ts.size(),
         ts[iworst], vps[iworst], ts.back());
  double dvp_w = -1e9;
  for (size_t i = 1; i + 1 < ts.size(); ++i) {
    if (vps[i] < 1e-3) continue;  // unresolved sliver at the very end
    double dt2 = ts[i + 1] - ts[i - 1];
    dvp_w = std::max(dvp_w, (vps[i + 1] - vps[i - 1]) / dt2 + pi / 3);
  }
  printf("  dV+ worst excess over resolved samples (vP>=1e-3)=%+.3e\n", dvp_w);
  graph::LobeTrack tf = graph::track_lobes(s);
  printf("  halt=%s t=%.6f steps=%ld  [3eps/pi=%.6f]\n", graph::halt_name(rr.reason), rr.t_final,
         rr.steps, 3 * 0.05 / pi);
  printf("  V+ bound worst=%+.3e  V- bound worst=%+.3e  (want >=0 side)\n", wp, wm);
  printf("  dV+/dt worst excess=%+.3e  dV-/dt worst deficit=%+.3e\n", dvp_worst, dvm_worst);
  printf("  vM(final)=%.6f  slopes fx0=%.4f max=%.4f ratio=%.4f\n", tf.valid ? tf.v_minus : -1,
         fx0, wfx, wfx / fx0);
}

static void eigenmode(int M) {
  graph::GraphState s;
  s.f.resize(M + 1);
  double amp = 1e-3, pi = M_PI;
  for (int j = 0; j <= M; ++j) s.f(j) = amp * std::sin(pi * j / M);
  double f0 = s.f(M / 2);
  while (s.t < 0.02) graph::gstep_pinned(s, 0.4);
  double rate = std::log(f0 / s.f(M / 2)) / s.t;
  printf("eigen M=%d: rate=%.6f pi^2=%.6f rel=%.3e\n", M, rate, pi * pi,
         std::fabs(rate - pi * pi) / (pi * pi));
}

int main() {
  eigenmode(100);
  eigenmode(200);
  bounds_run(800, false);
  bounds_run(800, true);
  bounds_run(2400, false);
  return 0;
}

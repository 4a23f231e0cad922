// scratch measurements for the parametric flow; not installed
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lensflow/flow.hpp"
#include "lensflow/initial_data.hpp"

using namespace lensflow;

static void area_slope(int n, double cfl, flow::Scheme sch) {
  ScenarioSpec spec;
  spec.n = n;
  flow::FlowState st{build_curve(spec), 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.scheme = sch;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.horizon = 0.25;
  std::vector<double> ts, as;
  auto rec = [&](const flow::FlowState& s) {
    ts.push_back(s.t);
    as.push_back(enclosed_area(s.curve));
  };
  flow::RunResult rr = flow::run(st, pol, stops, rec, 1);
  // least squares slope over the run
  double st_ = 0, sa = 0, stt = 0, sta = 0;
  int m = (int)ts.size();
  for (int i = 0; i < m; ++i) {
    st_ += ts[i];
    sa += as[i];
    stt += ts[i] * ts[i];
    sta += ts[i] * as[i];
  }
  double slope = (m * sta - st_ * sa) / (m * stt - st_ * st_);
  double target = -4 * M_PI / 3;
  printf("area_slope n=%d cfl=%.2f scheme=%d: halt=%s steps=%ld slope=%.8f rel_err=%.3e\n", n,
         cfl, (int)sch, flow::halt_name(rr.reason), rr.steps, slope,
         std::fabs(slope - target) / std::fabs(target));
}

static void extinction(int n, double cfl) {
  ScenarioSpec spec;
  spec.n = n;
  PlanarCurve c0 = build_curve(spec);
  double a0 = enclosed_area(c0);
  double t_pred = 3 * a0 / (4 * M_PI);
  flow::FlowState st{c0, 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.l_min = 1e-3;
  flow::RunResult rr = flow::run(st, pol, stops);
  printf("extinct n=%d cfl=%.2f: halt=%s steps=%ld t=%.8f pred=%.8f rel=%.3e len=%.3e\n", n, cfl,
         flow::halt_name(rr.reason), rr.steps, rr.t_final, t_pred,
         std::fabs(rr.t_final - t_pred) / t_pred, length(st.curve));
}

static void selfsim(int n, double cfl) {
  ScenarioSpec spec;
  spec.n = n;
  PlanarCurve c0 = build_curve(spec);
  flow::FlowState st{c0, 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.horizon = 0.375;  // scale falls to 1/2 at t = T(1 - 1/4), T = 1/2
  double worst = 0, worst_t = 0;
  auto rec = [&](const flow::FlowState& s) {
    double lam = 1.0 / std::sqrt(2 * (0.5 - s.t));
    double d = hausdorff_distance(scaled(s.curve, lam), c0);
    if (d > worst) {
      worst = d;
      worst_t = s.t;
    }
  };
  flow::RunResult rr = flow::run(st, pol, stops, rec, 10);
  printf("selfsim n=%d cfl=%.2f: halt=%s steps=%ld worstH=%.3e at t=%.4f\n", n, cfl,
         flow::halt_name(rr.reason), rr.steps, worst, worst_t);
}

static void length_law(int n, double cfl) {
  // dL/dt + int kappa^2 ds - (xdot_N - xdot_0)/2 along the run, sampled centrally
  ScenarioSpec spec;
  spec.n = n;
  flow::FlowState st{build_curve(spec), 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.horizon = 0.2;
  std::vector<double> ts, Ls, x0s, xNs, k2s;
  auto rec = [&](const flow::FlowState& s) {
    FrameSamples f = compute_frames(s.curve);
    ts.push_back(s.t);
    Ls.push_back(length(s.curve));
    x0s.push_back(s.curve.p(0, 0));
    xNs.push_back(s.curve.p(0, s.curve.n() - 1));
    double k2 = 0;
    for (int i = 0; i < s.curve.n(); ++i) k2 += f.kappa(i) * f.kappa(i) * f.ds(i);
    k2s.push_back(k2);
  };
  flow::run(st, pol, stops, rec, 1);
  double worst = 0;
  int m = (int)ts.size();
  for (int i = 10; i + 10 < m; i += 25) {
    double dt2 = ts[i + 1] - ts[i - 1];
    double dL = (Ls[i + 1] - Ls[i - 1]) / dt2;
    double xd0 = (x0s[i + 1] - x0s[i - 1]) / dt2;
    double xdN = (xNs[i + 1] - xNs[i - 1]) / dt2;
    double resid = dL + k2s[i] - 0.5 * (xdN - xd0);
    worst = std::max(worst, std::fabs(resid) / k2s[i]);
  }
  printf("length_law n=%d cfl=%.2f: worst rel resid=%.3e (k2 scale)\n", n, cfl, worst);
}

static void bubble(int n, double cfl) {
  ScenarioSpec spec;
  spec.n = n;
  spec.family = ScenarioSpec::Family::double_bubble;
  flow::FlowState st{build_curve(spec), 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.gap_min = 0.2;
  double kworst = 0;
  auto rec = [&](const flow::FlowState& s) {
    kworst = std::max(kworst, compute_frames(s.curve).kappa.cwiseAbs().maxCoeff());
  };
  flow::RunResult rr = flow::run(st, pol, stops, rec, 5);
  printf("bubble n=%d: halt=%s steps=%ld t=%.6f gap=%.6f maxk=%.4f\n", n,
         flow::halt_name(rr.reason), rr.steps, rr.t_final, flow::junction_gap(st.curve), kworst);
}

static void angle_drift(int n, double cfl) {
  ScenarioSpec spec;
  spec.n = n;
  flow::FlowState st{build_curve(spec), 0, 0, 0, spec.bc_angle()};
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stops;
  stops.horizon = 0.3;
  double worst_ang = 0, worst_res = 0, worst_y = 0;
  auto rec = [&](const flow::FlowState& s) {
    CompatibilityReport rep = validate(s.curve, s.bc_angle);
    worst_ang = std::max(worst_ang, rep.tangent_angle_error);
    worst_res = std::max(worst_res,
                         std::max(std::fabs(rep.second_order_residual[0]),
                                  std::fabs(rep.second_order_residual[1])));
    worst_y = std::max(worst_y, rep.endpoint_position_error);
  };
  flow::run(st, pol, stops, rec, 1);
  printf("angles n=%d cfl=%.2f: worst angle=%.3e 2nd-order=%.3e y=%.3e\n", n, cfl, worst_ang,
         worst_res, worst_y);
}

int main(int argc, char** argv) {
  std::string what = argc > 1 ? argv[1] : "all";
  if (what == "slope" || what == "all") {
    area_slope(200, 0.4, flow::Scheme::semi_implicit);
    area_slope(400, 0.4, flow::Scheme::semi_implicit);
    area_slope(800, 0.4, flow::Scheme::semi_implicit);
    area_slope(400, 0.1, flow::Scheme::semi_implicit);
    area_slope(200, 0.4, flow::Scheme::explicit_euler);
    area_slope(400, 0.4, flow::Scheme::explicit_euler);
  }
  if (what == "extinct" || what == "all") {
    extinction(200, 0.4);
    extinction(400, 0.4);
  }
  if (what == "selfsim" || what == "all") {
    selfsim(400, 0.4);
    selfsim(200, 0.4);
  }
  if (what == "law" || what == "all") {
    length_law(200, 0.4);
    length_law(400, 0.4);
    length_law(400, 0.2);
    length_law(800, 0.2);
  }
  if (what == "bubble" || what == "all") bubble(400, 0.4);
  if (what == "angles" || what == "all") {
    angle_drift(200, 0.4);
    angle_drift(400, 0.4);
    angle_drift(800, 0.4);
    angle_drift(400, 0.1);
  }
  return 0;
}

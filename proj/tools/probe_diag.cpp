// scratch measurements for the diagnostics layer; not installed
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lensflow/diagnostics.hpp"
#include "lensflow/flow.hpp"
#include "lensflow/initial_data.hpp"
#include "lensflow/graph_flow.hpp"
#include "lensflow/shrinker.hpp"
#include "lensflow/singularity.hpp"

using namespace lensflow;

struct Series {
  std::vector<diag::DiagnosticsRecord> recs;
  std::vector<PlanarCurve> curves;
  flow::RunResult rr;
  double h0 = 0, dt0 = 0;
};

static Series run_series(ScenarioSpec spec, double cfl, double horizon, double lmin,
                         int every, bool keep_curves = false, double gap_min = 0) {
  PlanarCurve c = build_curve(spec);
  flow::FlowState st;
  st.curve = c;
  st.bc_angle = spec.bc_angle();
  flow::StepPolicy pol;
  pol.cfl = cfl;
  flow::StopRules stop;
  stop.horizon = horizon;
  stop.l_min = lmin;
  stop.gap_min = gap_min;
  diag::SampleOptions so;
  so.bc_angle = spec.bc_angle();
  Series out;
  out.h0 = length(c) / (spec.n - 1);
  out.dt0 = cfl * out.h0;
  out.rr = flow::run(
      st, pol, stop,
      [&](const flow::FlowState& s) {
        out.recs.push_back(diag::sample(s.curve, s.t, so));
        if (keep_curves) out.curves.push_back(s.curve);
      },
      every);
  return out;
}

static void intk(int n) {
  ScenarioSpec spec;
  spec.n = n;
  Series se = run_series(spec, 0.4, 0.3, 0, 10);
  double want = -2 * M_PI / 3;
  int distinct = 0;
  for (const auto& r : se.recs)
    if (r.int_kappa != se.recs[0].int_kappa) ++distinct;
  std::printf("intk lens n=%d: first=%a want=%a diff=%.3e distinct=%d samples=%zu\n", n,
              se.recs[0].int_kappa, want, se.recs[0].int_kappa - want, distinct,
              se.recs.size());

  ScenarioSpec bub;
  bub.family = ScenarioSpec::Family::double_bubble;
  bub.n = n;
  Series sb = run_series(bub, 0.4, 0.1, 0, 10);
  double wantb = -4 * M_PI / 3;
  int db = 0;
  for (const auto& r : sb.recs)
    if (r.int_kappa != sb.recs[0].int_kappa) ++db;
  std::printf("intk bubble n=%d: first=%a want=%a diff=%.3e distinct=%d\n", n,
              sb.recs[0].int_kappa, wantb, sb.recs[0].int_kappa - wantb, db);
}

static void shrinkarea() {
  for (int nodes : {801, 1601}) {
    shrinker::ShrinkerProfile pr = shrinker::solve(nodes);
    double a = enclosed_area(pr.curve);
    std::printf("shrinker area nodes=%d: %.12f  vs 2pi/3=%.12f diff=%.3e  vs 4pi/3 diff=%.3e\n",
                nodes, a, 2 * M_PI / 3, a - 2 * M_PI / 3, a - 4 * M_PI / 3);
    diag::DiagnosticsRecord r = diag::sample(pr.curve, 0);
    std::printf("  sample: maxabs=%.4f min=%.4f max=%.4f len=%.6f gap=%.6f\n", r.max_abs_kappa,
                r.min_kappa, r.max_kappa, r.length, r.junction_gap);
  }
}

static void absk(const char* name, ScenarioSpec spec, double cfl, int every, double gap_min = 0) {
  Series se = run_series(spec, cfl, INFINITY, 1e-3, every, false, gap_min);
  diag::MonotoneReport rep =
      diag::certify_monotone(se.recs, &diag::DiagnosticsRecord::int_abs_kappa, -1, 1e9);
  std::printf(
      "absk %s n=%d cfl=%.2f every=%d: worst=%.4e at t=%.4f  dt0=%.4e h0^2=%.4e pairs=%d "
      "halt=%s\n",
      name, spec.n, cfl, every, rep.worst, rep.worst_t, se.dt0, se.h0 * se.h0, rep.checked,
      flow::halt_name(se.rr.reason));
}

static void perturb() {
  for (double amp : {0.10, 0.15, 0.20, 0.25, -0.10, -0.15, -0.20, -0.25, -0.30}) {
    ScenarioSpec spec;
    spec.family = ScenarioSpec::Family::perturbed_lens;
    spec.n = 400;
    spec.bump_amp = amp;
    PlanarCurve c = build_curve(spec);
    CompatibilityReport rep = validate(c, spec.bc_angle());
    diag::DiagnosticsRecord r = diag::sample(c, 0);
    std::printf("perturb amp=%.2f: embedded=%d maxk=%.3f mink=%.3f g0=%.3f\n", amp,
                rep.embedded, r.max_kappa, r.min_kappa, embed_ratio(c).g);
  }
}

static void huisk() {
  // shrinker: T = 1/2 by construction, centred at the origin
  shrinker::ShrinkerProfile pr = shrinker::solve(801);
  flow::FlowState st;
  st.curve = pr.curve;
  st.bc_angle = M_PI / 3;
  flow::StepPolicy pol;
  pol.cfl = 0.4;
  flow::StopRules stop;
  stop.horizon = 0.45;
  std::vector<double> hs, ts;
  flow::run(
      st, pol, stop,
      [&](const flow::FlowState& s) {
        double sc = 1.0 / std::sqrt(2 * (0.5 - s.t));
        hs.push_back(diag::huisken_functional(scaled(s.curve, sc)));
        ts.push_back(s.t);
      },
      10);
  double worst = -1e30, wt = 0;
  for (size_t i = 1; i < hs.size(); ++i)
    if (hs[i] - hs[i - 1] > worst) worst = hs[i] - hs[i - 1], wt = ts[i];
  std::printf("huisk shrinker: first=%.8f last=%.8f worst_inc=%.3e at t=%.4f samples=%zu\n",
              hs.front(), hs.back(), worst, wt, hs.size());
}

static void huisk_lens(ScenarioSpec spec, double cfl) {
  // pass 1: halt time and area give the extinction estimate
  Series first = run_series(spec, cfl, INFINITY, 1e-3, 10, false);
  double t_halt = first.rr.t_final;
  double T = t_halt + 3 * first.recs.back().area / (4 * M_PI);
  // pass 2: rescale about the junction midpoint of the last frame
  Series snd = run_series(spec, cfl, INFINITY, 1e-3, 10, true);
  const PlanarCurve& last = snd.curves.back();
  Vector2d p(0.5 * (last.p(0, 0) + last.p(0, last.n() - 1)), 0.0);
  double worst = -1e30, wt = 0;
  std::vector<double> hs;
  for (size_t i = 0; i < snd.curves.size(); ++i) {
    double t = snd.recs[i].t;
    if (t >= T) break;
    double sc = 1.0 / std::sqrt(2 * (T - t));
    hs.push_back(diag::huisken_functional(scaled(translated(snd.curves[i], -p), sc)));
    if (hs.size() > 1 && hs.back() - hs[hs.size() - 2] > worst)
      worst = hs.back() - hs[hs.size() - 2], wt = t;
  }
  std::printf("huisk %s n=%d: T=%.6f t_halt=%.6f first=%.6f last=%.6f worst_inc=%.3e at t=%.4f\n",
              spec.family == ScenarioSpec::Family::perturbed_lens ? "perturbed" : "lens", spec.n,
              T, t_halt, hs.front(), hs.back(), worst, wt);
}

static void huisk0() {
  for (int n : {400, 1600, 6400}) {
    ScenarioSpec spec;
    spec.n = n;
    PlanarCurve c = build_curve(spec);
    double T = 3 * enclosed_area(c) / (4 * M_PI);
    double v = diag::huisken_functional(scaled(c, 1.0 / std::sqrt(2 * T)));
    std::printf("huisk0 lens n=%d: T=%.8f val=%.8f\n", n, T, v);
  }
  for (int nodes : {801, 3201}) {
    shrinker::ShrinkerProfile pr = shrinker::solve(nodes);
    std::printf("huisk0 profile nodes=%d: val=%.8f\n", nodes,
                diag::huisken_functional(pr.curve));
  }
}


static Series run_lens(ScenarioSpec spec, double cfl, int every, bool keep) {
  return run_series(spec, cfl, INFINITY, 1e-3, every, keep);
}

static void huiskwin() {
  // worst rescaled-monotonicity increment when the endgame sliver is excluded
  for (int pert : {0, 1}) {
    ScenarioSpec spec;
    if (pert) {
      spec.family = ScenarioSpec::Family::perturbed_lens;
      spec.bump_amp = -0.10;
    }
    spec.n = 400;
    Series se = run_lens(spec, 0.4, 10, true);
    double T = se.rr.t_final + 3 * se.recs.back().area / (4 * M_PI);
    const PlanarCurve& last = se.curves.back();
    Vector2d p(0.5 * (last.p(0, 0) + last.p(0, last.n() - 1)), 0.0);
    std::vector<double> hs, ts;
    for (size_t i = 0; i < se.curves.size(); ++i) {
      double t = se.recs[i].t;
      if (t >= T) break;
      hs.push_back(diag::huisken_functional(
          scaled(translated(se.curves[i], -p), 1.0 / std::sqrt(2 * (T - t)))));
      ts.push_back(t);
    }
    for (double frac : {1e-2, 3e-2}) {
      double worst = -1e30, wt = 0;
      int used = 0;
      for (size_t i = 1; i < hs.size(); ++i) {
        if (T - ts[i] < frac * T) break;
        ++used;
        if (hs[i] - hs[i - 1] > worst) worst = hs[i] - hs[i - 1], wt = ts[i];
      }
      std::printf("huiskwin %s frac=%.0e: worst=%.4e at t=%.4f pairs=%d (of %zu) T=%.6f\n",
                  pert ? "perturbed" : "lens", frac, worst, wt, used, hs.size(), T);
    }
  }
}

static void bubint() {
  for (double gm : {0.2, 0.3, 0.5}) {
    for (int n : {400, 800}) {
      ScenarioSpec bub;
      bub.family = ScenarioSpec::Family::double_bubble;
      bub.n = n;
      Series se = run_series(bub, 0.4, INFINITY, 1e-3, 10, false, gm);
      double k0 = se.recs.front().max_abs_kappa, krun = 0;
      for (const auto& r : se.recs) krun = std::max(krun, r.max_abs_kappa);
      std::printf(
          "bubint gap_min=%.1f n=%d: k0=%.4f krun=%.4f ratio=%.3f halt=%s t=%.4f gap=%.4f\n",
          gm, n, k0, krun, krun / k0, flow::halt_name(se.rr.reason), se.rr.t_final,
          se.recs.back().junction_gap);
    }
  }
}

static std::pair<std::vector<diag::DiagnosticsRecord>, sing::FrameSeries> graph_series(
    int segments, int every, graph::GraphRunResult* out_rr = nullptr) {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  graph::GraphState s = graph::make_state(d, segments);
  graph::GraphPolicy pol;
  std::vector<diag::DiagnosticsRecord> recs;
  sing::FrameSeries frames;
  graph::GraphRunResult rr = graph::run(
      s, pol,
      [&](const graph::GraphState& g) {
        PlanarCurve c = graph::to_curve(g);
        recs.push_back(diag::sample(c, g.t));
        frames.push_back({g.t, std::move(c)});
      },
      every);
  if (out_rr) *out_rr = rr;
  return {std::move(recs), std::move(frames)};
}

static void gclass() {
  graph::GraphRunResult rr;
  auto [recs, frames] = graph_series(800, 50, &rr);
  sing::SingularityReport rep = sing::classify(recs, {}, graph::halt_name(rr.reason));
  std::printf("gclass M=800: verdict=%s halt=%s T_area=%.6f t_halt=%.6f\n",
              sing::verdict_name(rep.verdict), rep.halt.c_str(), rep.T.T_area, rr.t_final);
  std::printf("  drift=%.4f growth=%.4f kratio=%.4f k0=%.4f samples=%zu\n", rep.tail_drift,
              rep.tail_growth, rep.kappa_ratio, recs.front().max_abs_kappa, recs.size());
  for (const auto& nstr : rep.notes) std::printf("  note: %s\n", nstr.c_str());
  std::printf("  rsup first=%.4f last=%.4f max=%.4f\n", rep.rescaled_sup.front(),
              rep.rescaled_sup.back(),
              *std::max_element(rep.rescaled_sup.begin(), rep.rescaled_sup.end()));
}

static void trans() {
  {
    PlanarCurve c;
    int n = 600;
    c.p.resize(2, n);
    for (int i = 0; i < n; ++i) {
      double x = -1.2 + 2.4 * i / (n - 1);
      c.p.col(i) = Vector2d(x, -std::log(std::cos(x)));
    }
    sing::TranslatorFit f = sing::translator_residual(c);
    std::printf("trans reaper n=%d: resid=%.3e V=(%.6f, %.6f)\n", n, f.residual, f.velocity(0),
                f.velocity(1));
  }
  for (double alpha : {2 * M_PI / 3, M_PI / 2}) {
    int n = 400;
    PlanarCurve c;
    c.p.resize(2, n);
    for (int i = 0; i < n; ++i) {
      double th = -alpha + 2 * alpha * i / (n - 1);
      c.p.col(i) = Vector2d(std::sin(th), std::cos(th));
    }
    double s = std::sin(alpha), co = std::cos(alpha);
    double closed = 1 - 2 * s * s / (alpha * (alpha + s * co));
    sing::TranslatorFit f = sing::translator_residual(c);
    std::printf("trans arc alpha=%.4f: resid=%.6f closed_form=%.6f diff=%.2e\n", alpha,
                f.residual, closed, f.residual - closed);
  }
  {
    PlanarCurve line;
    line.p.resize(2, 50);
    for (int i = 0; i < 50; ++i) line.p.col(i) = Vector2d(i * 0.1, 0.3);
    sing::TranslatorFit f = sing::translator_residual(line);
    std::printf("trans line: flat=%d resid=%.3f\n", f.flat, f.residual);
  }
  {
    ScenarioSpec bub;
    bub.family = ScenarioSpec::Family::double_bubble;
    bub.n = 400;
    sing::TranslatorFit f = sing::translator_residual(build_curve(bub));
    std::printf("trans bubble datum: resid=%.6f\n", f.residual);
  }
}

static void sdist() {
  shrinker::ShrinkerProfile prof = shrinker::solve(401);
  for (int pert : {0, 1}) {
    ScenarioSpec spec;
    if (pert) {
      spec.family = ScenarioSpec::Family::perturbed_lens;
      spec.bump_amp = -0.10;
    }
    spec.n = 400;
    Series se = run_lens(spec, 0.4, 10, true);
    double T = se.rr.t_final + 3 * se.recs.back().area / (4 * M_PI);
    const PlanarCurve& last = se.curves.back();
    Vector2d p(0.5 * (last.p(0, 0) + last.p(0, last.n() - 1)), 0.0);
    std::vector<double> ds;
    std::vector<double> ts;
    size_t final_idx = 0;
    for (size_t i = 0; i < se.curves.size(); ++i) {
      double t = se.recs[i].t;
      if (T - t < 1e-2 * T) break;
      PlanarCurve r = scaled(translated(se.curves[i], -p), 1.0 / std::sqrt(2 * (T - t)));
      ds.push_back(sing::shrinker_distance(r, prof.curve).value);
      ts.push_back(t);
      final_idx = i;
    }
    std::printf("sdist %s: first=%.4f mid=%.4f final=%.4f (t=%.4f idx=%zu of %zu) T=%.6f\n",
                pert ? "perturbed" : "lens", ds.front(), ds[ds.size() / 2], ds.back(),
                ts.back(), final_idx, se.curves.size(), T);
    int rises = 0;
    for (size_t i = ds.size() / 2; i + 1 < ds.size(); ++i)
      if (ds[i + 1] > ds[i] + 1e-12) ++rises;
    std::printf("  second-half rises=%d of %zu\n", rises, ds.size() - ds.size() / 2 - 1);
  }
}


static void lclass() {
  for (int pert : {0, 1}) {
    ScenarioSpec spec;
    if (pert) {
      spec.family = ScenarioSpec::Family::perturbed_lens;
      spec.bump_amp = -0.10;
    }
    spec.n = 400;
    Series se = run_lens(spec, 0.4, 10, true);
    sing::FrameSeries frames;
    for (size_t i = 0; i < se.curves.size(); ++i)
      frames.push_back({se.recs[i].t, se.curves[i]});
    sing::SingularityReport rep =
        sing::classify(se.recs, frames, flow::halt_name(se.rr.reason));
    std::printf("lclass %s: verdict=%s drift=%.4f growth=%.4f kratio=%.2f T=%.6f\n",
                pert ? "perturbed" : "lens", sing::verdict_name(rep.verdict), rep.tail_drift,
                rep.tail_growth, rep.kappa_ratio, rep.T.T_area);
    for (const auto& nstr : rep.notes) std::printf("  note: %s\n", nstr.c_str());
    // rescaled_sup tail behaviour with the endgame sliver excluded
    double T = rep.T.T_area;
    std::vector<double> tail;
    for (size_t i = 0; i < rep.t.size(); ++i)
      if (rep.t[i] >= T / 2 && T - rep.t[i] >= 1e-2 * T) tail.push_back(rep.rescaled_sup[i]);
    std::vector<double> whole = rep.rescaled_sup;
    auto stats = [](std::vector<double> v, const char* tag) {
      std::vector<double> w = v;
      std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
      double med = w[w.size() / 2];
      double mx = *std::max_element(v.begin(), v.end());
      std::printf("  %s: n=%zu med=%.4f max=%.4f ratio=%.3f\n", tag, v.size(), med, mx,
                  mx / med);
    };
    stats(tail, "tail(windowed)");
    stats(whole, "whole");
    size_t convex_at = 0;
    for (size_t i = 0; i < se.recs.size(); ++i)
      if (se.recs[i].max_kappa < 0) { convex_at = i; break; }
    bool stays = true;
    for (size_t i = convex_at; i < se.recs.size(); ++i)
      if (se.recs[i].max_kappa >= 0) stays = false;
    std::printf("  maxk: t0=%.3f convex from t=%.4f (idx %zu of %zu) stays=%d t_halt=%.4f\n",
                se.recs[0].max_kappa, se.recs[convex_at].t, convex_at, se.recs.size(), stays,
                se.rr.t_final);
    // embeddedness floor over the run
    double gmin = 1e30, g0 = 0;
    diag::SampleOptions so;
    so.with_embed = true;
    for (size_t i = 0; i < se.curves.size(); ++i) {
      double g = diag::sample(se.curves[i], se.recs[i].t, so).g_embed.value();
      if (i == 0) g0 = g;
      gmin = std::min(gmin, g);
    }
    std::printf("  g0=%.4f gmin=%.4f bound=%.4f ok=%d\n", g0, gmin,
                std::min(g0, 4 * std::sqrt(3.0)) - 0.05 * g0,
                gmin >= std::min(g0, 4 * std::sqrt(3.0)) - 0.05 * g0);
  }
}


static void gtrace() {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::perturbed_lens;
  spec.bump_amp = -0.10;
  spec.n = 400;
  Series se = run_lens(spec, 0.4, 10, true);
  for (size_t i = 0; i < se.curves.size(); i += 2) {
    EmbedRatio er = embed_ratio(se.curves[i]);
    std::printf("gtrace t=%.4f g=%.4f q1=%.4f q2=%.4f wi=%d wj=%d mir=%d\n", se.recs[i].t,
                er.g, er.q1, er.q2, er.wi, er.wj, er.wj_mirrored);
  }
}

static void ham() {
  graph::GraphRunResult rr;
  auto [recs, frames] = graph_series(2400, 50, &rr);
  std::printf("ham: frames=%zu halt=%s t_halt=%.6f\n", frames.size(),
              graph::halt_name(rr.reason), rr.t_final);
  std::vector<sing::BlowupFrame> picks = sing::hamilton_rescale(frames, rr.t_final);
  std::printf("ham picks=%zu\n", picks.size());
  double prev_mu = 0;
  int bad_mu = 0;
  for (const auto& bf : picks) {
    if (bf.scale < prev_mu) ++bad_mu;
    prev_mu = bf.scale;
  }
  size_t show = picks.size() > 8 ? picks.size() - 8 : 0;
  for (size_t i = show; i < picks.size(); ++i) {
    const auto& bf = picks[i];
    sing::TranslatorFit f = sing::translator_residual(bf.curve);
    FrameSamples fs = compute_frames(bf.curve);
    double mk = 0;
    for (int j = 1; j + 1 < bf.curve.n(); ++j) mk = std::max(mk, std::abs(fs.kappa(j)));
    std::printf(
        "  rung=%ld mu=%.3f src_t=%.6f nodes=%d resid=%.4f V=(%.3f,%.3f) maxk=%.6f\n",
        bf.rung, bf.scale, bf.source_t, bf.curve.n(), f.residual, f.velocity(0), f.velocity(1),
        mk);
  }
  std::printf("ham mu_violations=%d\n", bad_mu);
}


static void ham2() {
  // pass 1 for the halt time, pass 2 keeps a dense frame tail
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  graph::GraphState s0 = graph::make_state(d, 2400);
  graph::GraphPolicy pol;
  graph::GraphRunResult r1 = graph::run(s0, pol);
  double cutoff = r1.t_final - 2.5e-5;
  graph::GraphState s = graph::make_state(d, 2400);
  sing::FrameSeries frames;
  long kept_dense = 0;
  graph::GraphRunResult rr = graph::run(
      s, pol,
      [&](const graph::GraphState& g) {
        bool coarse = g.step_count % 50 == 0;
        bool dense = g.t > cutoff;
        if (coarse || dense) {
          if (!frames.empty() && !(g.t > frames.back().t)) return;
          frames.push_back({g.t, graph::to_curve(g)});
          if (dense && !coarse) ++kept_dense;
        }
      },
      1);
  std::printf("ham2: frames=%zu dense=%ld halt=%s t_halt=%.6f\n", frames.size(), kept_dense,
              graph::halt_name(rr.reason), rr.t_final);
  std::vector<sing::BlowupFrame> picks = sing::hamilton_rescale(frames, rr.t_final);
  std::printf("ham2 picks=%zu\n", picks.size());
  double prev_mu = 0;
  int bad_mu = 0;
  for (const auto& bf : picks) {
    if (bf.scale < prev_mu) ++bad_mu;
    prev_mu = bf.scale;
  }
  size_t show = picks.size() > 10 ? picks.size() - 10 : 0;
  for (size_t i = show; i < picks.size(); ++i) {
    const auto& bf = picks[i];
    sing::TranslatorFit f = sing::translator_residual(bf.curve);
    FrameSamples fs = compute_frames(bf.curve);
    double mk = 0;
    for (int j = 1; j + 1 < bf.curve.n(); ++j) mk = std::max(mk, std::abs(fs.kappa(j)));
    std::printf(
        "  rung=%ld mu=%.3f src_t=%.8f nodes=%d resid=%.4f V=(%.3f,%.3f) maxk=%.6f\n",
        bf.rung, bf.scale, bf.source_t, bf.curve.n(), f.residual, f.velocity(0), f.velocity(1),
        mk);
  }
  std::printf("ham2 mu_violations=%d\n", bad_mu);
}


static void race() {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::graph_example1;
  GraphDatum d = build_graph(spec);
  graph::GraphState s = graph::make_state(d, 2400);
  graph::GraphPolicy pol;
  std::vector<double> ts, ks, meds;
  graph::GraphRunResult rr = graph::run(
      s, pol,
      [&](const graph::GraphState& g) {
        PlanarCurve c = graph::to_curve(g);
        FrameSamples fr = compute_frames(c);
        double k = 0;
        for (int i = 1; i + 1 < c.n(); ++i) k = std::max(k, std::abs(fr.kappa(i)));
        std::vector<double> seg(c.n() - 1);
        for (int i = 0; i + 1 < c.n(); ++i) seg[i] = (c.p.col(i + 1) - c.p.col(i)).norm();
        std::nth_element(seg.begin(), seg.begin() + seg.size() / 2, seg.end());
        ts.push_back(g.t);
        ks.push_back(k);
        meds.push_back(seg[seg.size() / 2]);
      },
      50);
  double T = rr.t_final, tcap = T - 1.0 / (1L << 19);
  std::printf("race: halt t=%.6f tcap_deepest=%.8f\n", T, tcap);
  double krec = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ks[i] > krec) {
      bool usable = ks[i] * meds[i] <= 0.35;
      double L = ks[i] * ks[i] * (tcap - ts[i]);
      if (ks[i] > krec * 1.25 || i + 1 == ts.size() || !usable)
        std::printf("  t=%.8f k=%.2f k*med=%.3f usable=%d L(tcap)=%.3f\n", ts[i], ks[i],
                    ks[i] * meds[i], usable, L);
      krec = ks[i];
    }
  }
}


static void ham3(double x1, double x2, double vr, int M) {
  GraphDatum d = build_lobed_graph(0.05, 0.30, vr, x1, x2);
  graph::GraphState s0 = graph::make_state(d, M);
  graph::GraphPolicy pol;
  graph::GraphRunResult r1 = graph::run(s0, pol);
  std::printf("ham3 x1=%.2f x2=%.2f vr=%.3f M=%d: halt=%s t=%.6f steps=%ld\n", x1, x2, vr, M,
              graph::halt_name(r1.reason), r1.t_final, r1.steps);
  if (r1.reason != graph::GraphHalt::vplus_exhausted) return;
  double cutoff = r1.t_final - 2.5e-5;
  graph::GraphState s = graph::make_state(d, M);
  sing::FrameSeries frames;
  graph::run(
      s, pol,
      [&](const graph::GraphState& g) {
        if (g.step_count % 50 == 0 || g.t > cutoff) {
          if (!frames.empty() && !(g.t > frames.back().t)) return;
          frames.push_back({g.t, graph::to_curve(g)});
        }
      },
      1);
  std::vector<sing::BlowupFrame> picks = sing::hamilton_rescale(frames, r1.t_final);
  // tail meta dump: usable-line values at the deepest rung
  {
    double T = r1.t_final;
    double w = 1.0 / double(1L << 19);
    std::printf("  tail frames (u<3e-5): u  k  k*med  L(deepest)\n");
    for (const auto& fr : frames) {
      double u = T - fr.t;
      if (u >= 3e-5 || u <= 0) continue;
      auto kk = diag::compute_frames(fr.curve);
      double k = 0;
      for (int i = 1; i + 1 < fr.curve.n(); ++i) k = std::max(k, std::abs(kk.kappa[i]));
      std::vector<double> seg(kk.ds.begin(), kk.ds.end());
      std::nth_element(seg.begin(), seg.begin() + seg.size() / 2, seg.end());
      double med = seg[seg.size() / 2];
      double L = k * k * (u - w);
      std::printf("    %.4e %9.2f %7.3f %9.3f %s\n", u, k, k * med, L,
                  k * med <= 0.35 ? "usable" : "-");
    }
  }
  size_t show = picks.size() > 6 ? picks.size() - 6 : 0;
  std::printf("  picks=%zu\n", picks.size());
  for (size_t i = show; i < picks.size(); ++i) {
    const auto& bf = picks[i];
    sing::TranslatorFit f = sing::translator_residual(bf.curve);
    std::printf("  rung=%ld mu=%.3f src_t=%.8f nodes=%d resid=%.4f V=(%.3f,%.3f) c=(%.3f,%.3f)\n",
                bf.rung, bf.scale, bf.source_t, bf.curve.n(), f.residual, f.velocity(0),
                f.velocity(1), bf.center(0), bf.center(1));
  }
}

int main(int argc, char** argv) {
  std::string what = argc > 1 ? argv[1] : "all";
  if (what == "intk" || what == "all") intk(400);
  if (what == "shrinkarea" || what == "all") shrinkarea();
  if (what == "absk" || what == "all") {
    ScenarioSpec lens;
    for (int n : {200, 400, 800}) {
      lens.n = n;
      absk("lens", lens, 0.4, 10);
    }
    lens.n = 400;
    absk("lens", lens, 0.1, 10);
    ScenarioSpec pert;
    pert.family = ScenarioSpec::Family::perturbed_lens;
    pert.n = 400;
    pert.bump_amp = -0.10;
    absk("perturbed", pert, 0.4, 10);
    ScenarioSpec bub;
    bub.family = ScenarioSpec::Family::double_bubble;
    bub.n = 400;
    absk("bubble", bub, 0.4, 10);
  }
  if (what == "absk2" || what == "all") {
    ScenarioSpec bub;
    bub.family = ScenarioSpec::Family::double_bubble;
    for (int n : {200, 400, 800}) {
      bub.n = n;
      absk("bubble-gap", bub, 0.4, 10, 0.3);
    }
    ScenarioSpec pert;
    pert.family = ScenarioSpec::Family::perturbed_lens;
    pert.bump_amp = -0.10;
    pert.n = 800;
    absk("perturbed", pert, 0.4, 10);
  }
  if (what == "perturb" || what == "all") perturb();
  if (what == "huiskwin") huiskwin();
  if (what == "bubint") bubint();
  if (what == "gclass") gclass();
  if (what == "trans") trans();
  if (what == "sdist") sdist();
  if (what == "ham") ham();
  if (what == "lclass") lclass();
  if (what == "gtrace") gtrace();
  if (what == "ham2") ham2();
  if (what == "race") race();
  if (what == "ham3") {
    double x1 = argc > 2 ? std::atof(argv[2]) : 0.28;
    double x2 = argc > 3 ? std::atof(argv[3]) : 0.78;
    double vr = argc > 4 ? std::atof(argv[4]) : 0.05;
    int M = argc > 5 ? std::atoi(argv[5]) : 2400;
    ham3(x1, x2, vr, M);
  }
  if (what == "huisk0" || what == "all") huisk0();
  if (what == "huisk" || what == "all") {
    huisk();
    ScenarioSpec lens;
    lens.n = 400;
    huisk_lens(lens, 0.4);
    ScenarioSpec pert;
    pert.family = ScenarioSpec::Family::perturbed_lens;
    pert.n = 400;
    pert.bump_amp = -0.10;
    huisk_lens(pert, 0.4);
  }
  return 0;
}

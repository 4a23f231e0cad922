#include "lensflow/singularity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lensflow/shrinker.hpp"

namespace lensflow::sing {

TEstimate estimate_T(const std::vector<diag::DiagnosticsRecord>& series) {
  if (series.size() < 10) throw std::invalid_argument("estimate_T: need at least 10 samples");
  TEstimate est;
  // loose enough for ALE-scheme wobble, tight enough to reject a wrong-signed series
  const double tol = 1e-6 * std::max(1.0, series.front().area);
  for (size_t i = 1; i < series.size(); ++i)
    if (series[i].area - series[i - 1].area > tol) {
      est.area_monotone = false;
      break;
    }
  est.T_area = series.back().t + 3 * series.back().area / (4 * M_PI);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : series) {
    if (!(r.max_abs_kappa > 0)) continue;
    double y = 1 / (r.max_abs_kappa * r.max_abs_kappa);
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
    ++m;
  }
  if (m >= 2) {
    double det = m * sxx - sx * sx;
    if (det > 0) {
      double slope = (m * sxy - sx * sy) / det;
      double icpt = (sy * sxx - sx * sxy) / det;
      if (slope < 0) est.T_fit = -icpt / slope;
    }
  }
  est.fit_gap = std::abs(est.T_fit - est.T_area) / std::max(std::abs(est.T_area), 1e-300);
  return est;
}

Vector2d default_blowup_center(const FrameSeries& frames) {
  if (frames.empty()) throw std::invalid_argument("default_blowup_center: no frames");
  const PlanarCurve& c = frames.back().curve;
  return 0.5 * (c.p.col(0) + c.p.col(c.n() - 1));
}

std::vector<BlowupFrame> rescale_typeI(const FrameSeries& frames, const Vector2d& p,
                                       double T_est) {
  std::vector<BlowupFrame> out;
  out.reserve(frames.size());
  for (const StoredFrame& f : frames) {
    if (!(f.t < T_est)) throw std::invalid_argument("rescale_typeI: frame at or past T_est");
    BlowupFrame bf;
    bf.mode = BlowupMode::typeI;
    bf.scale = 1 / std::sqrt(2 * (T_est - f.t));
    bf.center = p;
    bf.source_t = f.t;
    bf.curve = scaled(translated(f.curve, -p), bf.scale);
    out.push_back(std::move(bf));
  }
  return out;
}

namespace {

struct FrameMeta {
  double t = 0, k = 0, med = 0;
  int node = -1;
};

FrameMeta frame_meta(const StoredFrame& f) {
  FrameSamples fr = compute_frames(f.curve);
  const int n = f.curve.n();
  FrameMeta m;
  m.t = f.t;
  for (int i = 1; i + 1 < n; ++i)
    if (std::abs(fr.kappa(i)) > m.k) {
      m.k = std::abs(fr.kappa(i));
      m.node = i;
    }
  std::vector<double> seg(n - 1);
  for (int i = 0; i + 1 < n; ++i) seg[i] = (f.curve.p.col(i + 1) - f.curve.p.col(i)).norm();
  std::nth_element(seg.begin(), seg.begin() + seg.size() / 2, seg.end());
  m.med = seg[seg.size() / 2];
  return m;
}

// upper envelope of y = k^2 x - k^2 t over the usable record-curvature frames;
// slopes arrive increasing and queries increase, so one pass serves the ladder
struct Line {
  double m = 0, b = 0;
  int idx = -1;
  double at(double x) const { return m * x + b; }
};

double cross_x(const Line& a, const Line& b) { return (a.b - b.b) / (b.m - a.m); }

BlowupFrame hamilton_frame(const StoredFrame& f, const FrameMeta& m, long rung, double window) {
  FrameSamples fr = compute_frames(f.curve);
  const int n = f.curve.n();
  const double s0 = fr.s(m.node), half = window / m.k;
  int i0 = m.node, i1 = m.node;
  while (i0 > 0 && s0 - fr.s(i0 - 1) <= half) --i0;
  while (i1 + 1 < n && fr.s(i1 + 1) - s0 <= half) ++i1;
  BlowupFrame bf;
  bf.mode = BlowupMode::hamilton;
  bf.scale = m.k;
  bf.center = f.curve.p.col(m.node);
  bf.source_t = f.t;
  bf.rung = rung;
  bf.curve.p.resize(2, i1 - i0 + 1);
  for (int i = i0; i <= i1; ++i) bf.curve.p.col(i - i0) = m.k * (f.curve.p.col(i) - bf.center);
  return bf;
}

double median_of(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

void put(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void put_series(std::string& out, const char* key, const std::vector<double>& v) {
  out += key;
  out += " = ";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    put(out, v[i]);
  }
  out.push_back('\n');
}

}  // namespace

std::vector<BlowupFrame> hamilton_rescale(const FrameSeries& frames, double T_est,
                                          const HamiltonConfig& cfg) {
  for (size_t i = 1; i < frames.size(); ++i)
    if (!(frames[i].t > frames[i - 1].t))
      throw std::invalid_argument("hamilton_rescale: frames must be strictly time-ordered");
  std::vector<FrameMeta> metas(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) metas[i] = frame_meta(frames[i]);

  std::vector<BlowupFrame> out;
  std::vector<Line> hull;
  double k_record = 0;
  size_t fi = 0, qi = 0;
  int last_pick = -1;
  for (long n = 1; n <= cfg.ladder; ++n) {
    const double tcap = T_est - 1.0 / n;
    while (fi < frames.size() && metas[fi].t <= tcap) {
      const FrameMeta& m = metas[fi];
      if (m.k > k_record && m.node >= 0 && m.k * m.med <= cfg.saturation) {
        k_record = m.k;
        Line ln{m.k * m.k, -m.k * m.k * m.t, static_cast<int>(fi)};
        while (hull.size() >= 2 &&
               cross_x(hull[hull.size() - 2], ln) <= cross_x(hull[hull.size() - 2], hull.back()))
          hull.pop_back();
        hull.push_back(ln);
      }
      ++fi;
    }
    if (hull.empty()) continue;
    qi = std::min(qi, hull.size() - 1);
    while (qi + 1 < hull.size() && hull[qi + 1].at(tcap) >= hull[qi].at(tcap)) ++qi;
    const Line& best = hull[qi];
    if (!(best.at(tcap) > 0)) continue;
    if (best.idx == last_pick) continue;
    out.push_back(hamilton_frame(frames[best.idx], metas[best.idx], n, cfg.window));
    last_pick = best.idx;
  }
  return out;
}

TranslatorFit translator_residual(const PlanarCurve& c) {
  FrameSamples fr = compute_frames(c);
  const int n = c.n();
  TranslatorFit fit;
  double ekk = 0;
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  Vector2d b = Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    const double w = fr.ds(i);
    ekk += w * fr.kappa(i) * fr.kappa(i);
    M += w * fr.nu.col(i) * fr.nu.col(i).transpose();
    b += w * fr.kappa(i) * fr.nu.col(i);
  }
  if (!(ekk > 0)) {
    fit.flat = true;
    return fit;
  }
  fit.velocity = M.ldlt().solve(b);
  fit.residual = std::max(0.0, 1 - b.dot(fit.velocity) / ekk);
  return fit;
}

ShrinkerDistance shrinker_distance(const PlanarCurve& frame, const PlanarCurve& profile) {
  auto recentred = [](const PlanarCurve& c) {
    double mid = 0.5 * (c.p(0, 0) + c.p(0, c.n() - 1));
    return translated(c, Vector2d(-mid, 0));
  };
  PlanarCurve f = recentred(frame);
  PlanarCurve p = recentred(profile);
  ShrinkerDistance d;
  d.hausdorff = hausdorff_distance(f, p);
  const int m = 401;
  FrameSamples ff = compute_frames(resample_uniform(f, m));
  FrameSamples fp = compute_frames(resample_uniform(p, m));
  for (int i = 0; i < m; ++i) {
    double a = std::atan2(ff.tau(1, i), ff.tau(0, i)) - std::atan2(fp.tau(1, i), fp.tau(0, i));
    a = std::abs(std::remainder(a, 2 * M_PI));
    d.angle_gap = std::max(d.angle_gap, a);
    if (i > 0 && i + 1 < m)
      d.kappa_gap = std::max(d.kappa_gap, std::abs(ff.kappa(i) - fp.kappa(i)));
  }
  d.value = d.hausdorff + d.angle_gap;
  return d;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::TypeI: return "TypeI";
    case Verdict::TypeII: return "TypeII";
    case Verdict::JunctionCollision: return "JunctionCollision";
    case Verdict::Extinction: return "Extinction";
    case Verdict::Unresolved: return "Unresolved";
  }
  return "Unresolved";
}

SingularityReport classify(const std::vector<diag::DiagnosticsRecord>& series,
                           const FrameSeries& frames, const std::string& halt,
                           const ClassifyConfig& cfg) {
  SingularityReport rep;
  rep.halt = halt;
  if (static_cast<int>(series.size()) < cfg.min_samples) {
    rep.notes.push_back("insufficient samples");
    return rep;
  }
  rep.T = estimate_T(series);
  const double T = rep.T.T_area;
  for (const auto& r : series) {
    rep.t.push_back(r.t);
    rep.rescaled_sup.push_back(T > r.t ? std::sqrt(2 * (T - r.t)) * r.max_abs_kappa : 0);
    rep.junction_gap.push_back(r.junction_gap);
  }
  double k0 = series.front().max_abs_kappa, krun = 0;
  for (const auto& r : series) krun = std::max(krun, r.max_abs_kappa);
  rep.kappa_ratio = k0 > 0 ? krun / k0 : std::numeric_limits<double>::infinity();
  if (!rep.T.area_monotone) {
    rep.notes.push_back("area not monotone");
    return rep;
  }
  if (halt != "length_min" && halt != "horizon" && T > series.back().t * 1.05)
    rep.notes.push_back("halt before extinction");

  if (!frames.empty() && frames.back().t < T) {
    shrinker::ShrinkerProfile prof = shrinker::solve(401);
    Vector2d p = default_blowup_center(frames);
    for (const StoredFrame& f : frames) {
      double sc = 1 / std::sqrt(2 * (T - f.t));
      rep.shrinker_dist.push_back(
          shrinker_distance(scaled(translated(f.curve, -p), sc), prof.curve).value);
    }
  }

  if (halt == "junction_gap" && rep.kappa_ratio <= cfg.kappa_bound_factor) {
    rep.verdict = Verdict::JunctionCollision;
    return rep;
  }

  const double floor_gap = std::max(T - series.back().t, cfg.tail_floor_frac * T);
  std::vector<double> tail;
  for (size_t i = 0; i < series.size(); ++i) {
    double d = T - series[i].t;
    if (d >= floor_gap && d <= cfg.decade * floor_gap) tail.push_back(rep.rescaled_sup[i]);
  }
  if (static_cast<int>(tail.size()) < cfg.min_tail_samples) {
    rep.notes.push_back("insufficient tail samples");
    return rep;
  }
  const double mx = *std::max_element(tail.begin(), tail.end());
  const double mn = *std::min_element(tail.begin(), tail.end());
  rep.tail_drift = mx > 0 ? (mx - mn) / mx : 0;
  auto med3 = [&](size_t a) {
    std::vector<double> w(tail.begin() + a, tail.begin() + a + 3);
    return median_of(w);
  };
  const double start = tail.size() >= 3 ? med3(0) : tail.front();
  const double end = tail.size() >= 3 ? med3(tail.size() - 3) : tail.back();
  rep.tail_growth = start > 0 ? end / start : std::numeric_limits<double>::infinity();

  if (rep.tail_drift < cfg.drift_tol)
    rep.verdict = Verdict::TypeI;
  else if (rep.tail_growth > cfg.growth_factor)
    rep.verdict = Verdict::TypeII;
  else if (halt == "length_min" && mx <= cfg.bounded_factor * median_of(tail))
    rep.verdict = Verdict::Extinction;
  else
    rep.notes.push_back("tail neither flat nor growing");
  return rep;
}

std::string report_text(const SingularityReport& rep) {
  std::string out;
  out += "verdict = ";
  out += verdict_name(rep.verdict);
  out.push_back('\n');
  out += "halt = " + rep.halt + "\n";
  out += "T_area = ";
  put(out, rep.T.T_area);
  out.push_back('\n');
  out += "T_fit = ";
  put(out, rep.T.T_fit);
  out.push_back('\n');
  out += "fit_gap = ";
  put(out, rep.T.fit_gap);
  out.push_back('\n');
  out += std::string("area_monotone = ") + (rep.T.area_monotone ? "yes" : "no") + "\n";
  out += "tail_drift = ";
  put(out, rep.tail_drift);
  out.push_back('\n');
  out += "tail_growth = ";
  put(out, rep.tail_growth);
  out.push_back('\n');
  out += "kappa_ratio = ";
  put(out, rep.kappa_ratio);
  out.push_back('\n');
  out += "samples = " + std::to_string(rep.t.size()) + "\n";
  for (const std::string& n : rep.notes) out += "note = " + n + "\n";
  put_series(out, "t", rep.t);
  put_series(out, "rescaled_sup", rep.rescaled_sup);
  put_series(out, "junction_gap", rep.junction_gap);
  if (!rep.shrinker_dist.empty()) put_series(out, "shrinker_dist", rep.shrinker_dist);
  if (!rep.translator_resid.empty()) put_series(out, "translator_resid", rep.translator_resid);
  return out;
}

}  // namespace lensflow::sing

#include "lensflow/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lensflow::diag {

DiagnosticsRecord sample(const PlanarCurve& c, double t, const SampleOptions& opt) {
  const int n = c.n();
  if (n < 3) throw std::invalid_argument("sample: need at least 3 nodes");
  FrameSamples fr = compute_frames(c);
  DiagnosticsRecord r;
  r.t = t;
  r.length = fr.s(n - 1);
  r.area = enclosed_area(c);
  const Vector2d ts(std::cos(opt.bc_angle), std::sin(opt.bc_angle));
  const Vector2d te(std::cos(opt.bc_angle), -std::sin(opt.bc_angle));
  r.int_kappa = turning_integral(c, ts, te);
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += std::abs(fr.kappa(i)) * fr.ds(i);
  r.int_abs_kappa = acc;
  r.min_kappa = fr.kappa(1);
  r.max_kappa = fr.kappa(1);
  for (int i = 2; i + 1 < n; ++i) {
    r.min_kappa = std::min(r.min_kappa, fr.kappa(i));
    r.max_kappa = std::max(r.max_kappa, fr.kappa(i));
  }
  r.max_abs_kappa = std::max(std::abs(r.min_kappa), std::abs(r.max_kappa));
  r.junction_gap = c.p(0, n - 1) - c.p(0, 0);
  if (opt.with_embed) r.g_embed = embed_ratio(c).g;
  if (opt.with_huisken) r.huisken = huisken_functional(c);
  return r;
}

double huisken_functional(const PlanarCurve& c) {
  double acc = 0;
  double wprev = std::exp(-0.5 * c.p.col(0).squaredNorm());
  for (int i = 0; i + 1 < c.n(); ++i) {
    double wnext = std::exp(-0.5 * c.p.col(i + 1).squaredNorm());
    acc += 0.5 * (wprev + wnext) * (c.p.col(i + 1) - c.p.col(i)).norm();
    wprev = wnext;
  }
  return acc;
}

MonotoneReport certify_monotone(const std::vector<DiagnosticsRecord>& series,
                                const FieldAccessor& field, int direction, double tol) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("certify_monotone: direction must be +1 or -1");
  MonotoneReport rep;
  rep.worst = -std::numeric_limits<double>::infinity();
  bool have_prev = false;
  double prev = 0;
  for (const DiagnosticsRecord& r : series) {
    std::optional<double> v = field(r);
    if (!v) continue;
    if (have_prev) {
      double viol = direction > 0 ? prev - *v : *v - prev;
      if (viol > rep.worst) {
        rep.worst = viol;
        rep.worst_t = r.t;
      }
      ++rep.checked;
    }
    prev = *v;
    have_prev = true;
  }
  if (rep.checked == 0)
    throw std::invalid_argument("certify_monotone: need two samples with the field present");
  rep.ok = rep.worst <= tol;
  return rep;
}

MonotoneReport certify_monotone(const std::vector<DiagnosticsRecord>& series,
                                double DiagnosticsRecord::*field, int direction, double tol) {
  return certify_monotone(
      series,
      [field](const DiagnosticsRecord& r) { return std::optional<double>(r.*field); },
      direction, tol);
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void put(std::string& out, const std::optional<double>& v) {
  if (v) put(out, *v);
}

}  // namespace

std::string csv_header() {
  return "t,length,area,int_kappa,int_abs_kappa,max_abs_kappa,min_kappa,max_kappa,"
         "junction_gap,g_embed,huisken,rescaled_sup";
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  put(out, r.t);
  out.push_back(',');
  put(out, r.length);
  out.push_back(',');
  put(out, r.area);
  out.push_back(',');
  put(out, r.int_kappa);
  out.push_back(',');
  put(out, r.int_abs_kappa);
  out.push_back(',');
  put(out, r.max_abs_kappa);
  out.push_back(',');
  put(out, r.min_kappa);
  out.push_back(',');
  put(out, r.max_kappa);
  out.push_back(',');
  put(out, r.junction_gap);
  out.push_back(',');
  put(out, r.g_embed);
  out.push_back(',');
  put(out, r.huisken);
  out.push_back(',');
  put(out, r.rescaled_sup);
  return out;
}

}  // namespace lensflow::diag

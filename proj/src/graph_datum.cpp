#include "lensflow/graph_datum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace lensflow {

namespace {

const double kSq3 = std::sqrt(3.0);

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

double arc_dx(double m0, double m1, double R) {
  double s = sign(m1 - m0);
  return s * R * (m1 / std::hypot(1.0, m1) - m0 / std::hypot(1.0, m0));
}

double arc_dy(double m0, double m1, double R) {
  double s = sign(m1 - m0);
  return -s * R * (1 / std::hypot(1.0, m1) - 1 / std::hypot(1.0, m0));
}

double polyval(const std::array<double, 6>& c, int deg, double x) {
  double v = 0;
  for (int j = deg; j >= 0; --j) v = v * x + c[j];
  return v;
}
double q_of(const std::array<double, 6>& c, double x) { return polyval(c, 5, x); }
double qp_of(const std::array<double, 6>& c, double x) {
  double v = 0;
  for (int j = 5; j >= 1; --j) v = v * x + j * c[j];
  return v;
}
double qpp_of(const std::array<double, 6>& c, double x) {
  double v = 0;
  for (int j = 5; j >= 2; --j) v = v * x + j * (j - 1) * c[j];
  return v;
}

struct WalkState {
  double x, y, m;
};

struct ProgStep {
  bool line;
  double a, b;  // line: slope, span; arc: curvature, target slope
};

std::vector<GraphPiece> assemble(double x0, double y0, double m0,
                                 const std::vector<ProgStep>& prog, WalkState& end) {
  double x = x0, y = y0, m = m0;
  std::vector<GraphPiece> pieces;
  for (const auto& st : prog) {
    if (st.line) {
      GraphPiece p;
      p.x0 = x;
      p.x1 = x + st.b;
      p.xa = x;
      p.y0 = y;
      p.m = st.a;
      pieces.push_back(p);
      x += st.b;
      y += st.a * st.b;
      m = st.a;
    } else {
      double k = st.a, m1 = st.b;
      if (std::abs(m1 - m) < 1e-14) continue;
      double R = 1.0 / k;
      double sig = sign(m1 - m);
      GraphPiece p;
      p.arc = true;
      p.cx = x - sig * R * m / std::hypot(1.0, m);
      p.cy = y + sig * R / std::hypot(1.0, m);
      p.R = R;
      p.sig = sig;
      p.x0 = x;
      p.x1 = x + arc_dx(m, m1, R);
      pieces.push_back(p);
      x = p.x1;
      y += arc_dy(m, m1, R);
      m = m1;
    }
  }
  end = {x, y, m};
  return pieces;
}

// quintic on [-d,d] matching value/slope/second derivative at both ends
std::array<double, 6> hermite_coef(double d, double qL, double qLp, double qLpp, double qR,
                                   double qRp, double qRpp) {
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> b;
  b << qL, qLp, qLpp, qR, qRp, qRpp;
  for (int j = 0; j < 6; ++j) {
    A(0, j) = std::pow(-d, j);
    A(1, j) = j >= 1 ? j * std::pow(-d, j - 1) : 0.0;
    A(2, j) = j >= 2 ? j * (j - 1) * std::pow(-d, j - 2) : 0.0;
    A(3, j) = std::pow(d, j);
    A(4, j) = j >= 1 ? j * std::pow(d, j - 1) : 0.0;
    A(5, j) = j >= 2 ? j * (j - 1) * std::pow(d, j - 2) : 0.0;
  }
  Eigen::Matrix<double, 6, 1> c = A.fullPivLu().solve(b);
  std::array<double, 6> out;
  for (int j = 0; j < 6; ++j) out[j] = c(j);
  return out;
}

// (q, q', q'') of a piece at rotated abscissa xi in the frame at (xj, yj, th)
void rotated_state(const GraphPiece& p, double xj, double yj, double th, double xi,
                   double& q, double& qp, double& qpp) {
  if (!p.arc) {
    q = qp = qpp = 0;
    return;
  }
  double ct = std::cos(th), st = std::sin(th);
  double cxi = ct * (p.cx - xj) + st * (p.cy - yj);
  double cq = -st * (p.cx - xj) + ct * (p.cy - yj);
  if (std::abs(cxi) > 1e-9)
    throw std::runtime_error("blend frame: arc center off the normal axis");
  double sg = sign(cq);
  double root = std::sqrt(p.R * p.R - xi * xi);
  q = cq - sg * root;
  qp = sg * xi / root;
  qpp = sg * p.R * p.R / (root * root * root);
}

double piece_ext(const GraphPiece& p) {
  if (!p.arc) return (p.x1 - p.x0) * std::hypot(1.0, p.m);
  double f, fp0, fpp, fp1;
  p.eval(p.x0, f, fp0, fpp);
  p.eval(p.x1, f, fp1, fpp);
  double da = std::abs(std::atan(fp1) - std::atan(fp0));
  return p.R * std::sin(std::min(da, 1.2));
}

std::vector<GraphBlend> build_blends(const std::vector<GraphPiece>& pieces,
                                     double cap = 0.01) {
  std::vector<GraphBlend> blends;
  for (size_t i = 0; i + 1 < pieces.size(); ++i) {
    const GraphPiece& pL = pieces[i];
    const GraphPiece& pR = pieces[i + 1];
    double xj = pL.x1;
    double fL, fpL, fppL, fR, fpR, fppR;
    pL.eval(xj, fL, fpL, fppL);
    pR.eval(xj, fR, fpR, fppR);
    if (std::abs(fL - fR) > 1e-9 || std::abs(fpL - fpR) > 1e-9)
      throw std::runtime_error("skeleton join is not C1");
    if (std::abs(fppL - fppR) < 1e-9 * (1 + std::abs(fppL))) continue;
    double th = std::atan(fpL);
    double d = std::min({0.35 * piece_ext(pL), 0.35 * piece_ext(pR), cap});
    std::array<double, 6> coef{};
    for (int halving = 0; halving < 8; ++halving) {
      double qL, qLp, qLpp, qR2, qRp, qRpp;
      rotated_state(pL, xj, fL, th, -d, qL, qLp, qLpp);
      rotated_state(pR, xj, fL, th, +d, qR2, qRp, qRpp);
      coef = hermite_coef(d, qL, qLp, qLpp, qR2, qRp, qRpp);
      double worst = 1e300;
      for (int g = 0; g <= 40; ++g) {
        double xi = -d + 2 * d * g / 40;
        worst = std::min(worst, std::cos(th) - qp_of(coef, xi) * std::sin(th));
      }
      if (worst > 0.02) break;  // blend stays graph-monotone in x
      d *= 0.5;
    }
    GraphBlend b;
    b.xj = xj;
    b.yj = fL;
    b.th = th;
    b.delta = d;
    b.ct = std::cos(th);
    b.st = std::sin(th);
    b.coef = coef;
    double qlo = q_of(coef, -d), qhi = q_of(coef, d);
    b.xlo = xj - d * b.ct - qlo * b.st;
    b.xhi = xj + d * b.ct - qhi * b.st;
    blends.push_back(b);
  }
  return blends;
}

struct LobeParams {
  double s1 = 3.4, s_preL = 1.2, s_preR = 3.0, d0 = 0.015;
  double k_x = 3.0, k_e = 3.0, k_capL = 10.5, k_capR = 10.5, k_b = 10.5;
  double ss_lo = 0.3, ss_hi = 45.0;
};

std::optional<std::vector<ProgStep>> arch_prog(double W, double ss, double sa, double sb,
                                               double k_e, double k_cap, double k_x,
                                               double s_pre, double d0) {
  double dx2 = arc_dx(sa, ss, 1 / k_e), dy2 = arc_dy(sa, ss, 1 / k_e);
  double dx4 = arc_dx(ss, -s_pre, 1 / k_cap), dy4 = arc_dy(ss, -s_pre, 1 / k_cap);
  double dx6 = arc_dx(-s_pre, -sb, 1 / k_x), dy6 = arc_dy(-s_pre, -sb, 1 / k_x);
  Eigen::Matrix2d A;
  A << 1, 1, ss, -s_pre;
  Eigen::Vector2d rhs(W - d0 - dx2 - dx4 - dx6, -(sa * d0 + dy2 + dy4 + dy6));
  Eigen::Vector2d L = A.fullPivLu().solve(rhs);
  if (L(0) < 1e-4 || L(1) < 1e-4) return std::nullopt;
  return std::vector<ProgStep>{{true, sa, d0},     {false, k_e, ss},  {true, ss, L(0)},
                               {false, k_cap, -s_pre}, {true, -s_pre, L(1)}, {false, k_x, -sb}};
}

std::optional<std::vector<ProgStep>> ucap_prog(double W, double ss, double s1, double k_x,
                                               double k_b) {
  double dx1 = arc_dx(-s1, -ss, 1 / k_x);
  double dxb = arc_dx(-ss, ss, 1 / k_b);
  double L3 = (W - dx1 * 2 - dxb) / 2;
  if (L3 < 1e-4) return std::nullopt;
  return std::vector<ProgStep>{
      {false, k_x, -ss}, {true, -ss, L3}, {false, k_b, ss}, {true, ss, L3}, {false, k_x, s1}};
}

std::optional<std::vector<ProgStep>> mirror_arch_prog(double W, double ss, double sa,
                                                      double sb, double k_e, double k_cap,
                                                      double k_x, double s_pre, double d0) {
  double dx1 = arc_dx(sa, s_pre, 1 / k_x), dy1 = arc_dy(sa, s_pre, 1 / k_x);
  double dx3 = arc_dx(s_pre, -ss, 1 / k_cap), dy3 = arc_dy(s_pre, -ss, 1 / k_cap);
  double dx5 = arc_dx(-ss, -sb, 1 / k_e), dy5 = arc_dy(-ss, -sb, 1 / k_e);
  Eigen::Matrix2d A;
  A << 1, 1, -ss, s_pre;
  Eigen::Vector2d rhs(W - d0 - dx1 - dx3 - dx5, -(-sb * d0 + dy1 + dy3 + dy5));
  Eigen::Vector2d L = A.fullPivLu().solve(rhs);
  if (L(0) < 1e-4 || L(1) < 1e-4) return std::nullopt;
  return std::vector<ProgStep>{{false, k_x, s_pre}, {true, s_pre, L(1)}, {false, k_cap, -ss},
                               {true, -ss, L(0)},   {false, k_e, -sb},   {true, -sb, d0}};
}

struct Lobe {
  double ss;
  std::vector<GraphPiece> pieces;
  std::vector<GraphBlend> blends;
};

double lobe_area(const std::vector<GraphPiece>& pieces, const std::vector<GraphBlend>& blends) {
  double tot = 0;
  for (const auto& p : pieces) tot += p.area(p.x0, p.x1);
  for (const auto& b : blends) {
    double skel = 0;
    for (const auto& p : pieces) {
      double lo = std::max(p.x0, b.xlo), hi = std::min(p.x1, b.xhi);
      if (hi > lo) skel += p.area(lo, hi);
    }
    tot += b.area() - skel;
  }
  return tot;
}

Lobe make_lobe(char kind, double x_lo, double x_hi, double target, const LobeParams& pp) {
  const double W = x_hi - x_lo;
  auto curve_of = [&](double ss) -> std::optional<Lobe> {
    std::optional<std::vector<ProgStep>> prog;
    double m0;
    if (kind == 'L') {
      prog = arch_prog(W, ss, kSq3, pp.s1, pp.k_e, pp.k_capL, pp.k_x, pp.s_preL, pp.d0);
      m0 = kSq3;
    } else if (kind == 'M') {
      prog = ucap_prog(W, ss, pp.s1, pp.k_x, pp.k_b);
      m0 = -pp.s1;
    } else {
      prog = mirror_arch_prog(W, ss, pp.s1, kSq3, pp.k_e, pp.k_capR, pp.k_x, pp.s_preR,
                              pp.d0);
      m0 = pp.s1;
    }
    if (!prog) return std::nullopt;
    WalkState end{};
    auto pieces = assemble(x_lo, 0.0, m0, *prog, end);
    if (std::abs(end.x - x_hi) > 1e-9 || std::abs(end.y) > 1e-9) return std::nullopt;
    Lobe lb;
    lb.ss = ss;
    lb.pieces = std::move(pieces);
    lb.blends = build_blends(lb.pieces);
    return lb;
  };
  auto g = [&](double ss) -> std::optional<double> {
    auto c = curve_of(ss);
    if (!c) return std::nullopt;
    return lobe_area(c->pieces, c->blends) - target;
  };

  double br_lo = 0, br_hi = 0;
  bool found = false;
  double prev_s = 0, prev_v = 0;
  bool have_prev = false;
  for (int i = 0; i < 160; ++i) {
    double s = pp.ss_lo + (pp.ss_hi - pp.ss_lo) * i / 159.0;
    auto v = g(s);
    if (!v) continue;  // pair the next feasible sample with the last one
    if (have_prev && prev_v * (*v) <= 0) {
      br_lo = prev_s;
      br_hi = s;
      found = true;
      break;
    }
    prev_s = s;
    prev_v = *v;
    have_prev = true;
  }
  if (!found)
    throw std::runtime_error(std::string("lobe '") + kind +
                             "': no side slope reaches the area target");

  double flo = *g(br_lo);
  for (int it = 0; it < 100 && br_hi - br_lo > 1e-13; ++it) {
    double mid = (br_lo + br_hi) / 2;
    auto fm = g(mid);
    if (!fm) throw std::runtime_error("lobe bisection hit an infeasible slope");
    if ((*fm > 0) == (flo > 0)) {
      br_lo = mid;
      flo = *fm;
    } else {
      br_hi = mid;
    }
  }
  auto out = curve_of((br_lo + br_hi) / 2);
  if (!out) throw std::runtime_error("lobe bisection landed infeasible");
  return *out;
}

}  // namespace

void GraphPiece::eval(double x, double& f, double& fp, double& fpp) const {
  if (!arc) {
    f = y0 + m * (x - xa);
    fp = m;
    fpp = 0;
    return;
  }
  double u = x - cx;
  double root = std::sqrt(std::max(R * R - u * u, 1e-30));
  f = cy - sig * root;
  fp = sig * u / root;
  fpp = sig * R * R / (root * root * root);
}

double GraphPiece::area(double a, double b) const {
  if (!arc) return y0 * (b - a) + m * ((b - xa) * (b - xa) - (a - xa) * (a - xa)) / 2;
  auto F = [&](double x) {
    double u = std::clamp(x - cx, -R, R);
    return cy * x -
           sig * (u * std::sqrt(std::max(R * R - u * u, 0.0)) + R * R * std::asin(u / R)) / 2;
  };
  return F(b) - F(a);
}

double GraphBlend::xi_of(double x) const {
  double xi = std::abs(ct) > 1e-3 ? std::clamp((x - xj) / ct, -delta, delta) : 0.0;
  for (int it = 0; it < 60; ++it) {
    double g = xj + xi * ct - q_of(coef, xi) * st - x;
    double gp = ct - qp_of(coef, xi) * st;
    double step = g / gp;
    xi = std::clamp(xi - step, -delta, delta);
    if (std::abs(step) < 1e-15) break;
  }
  return xi;
}

void GraphBlend::eval(double x, double& f, double& fp, double& fpp) const {
  double xi = xi_of(x);
  double q = q_of(coef, xi), qp = qp_of(coef, xi), qpp = qpp_of(coef, xi);
  double dxdxi = ct - qp * st;
  f = yj + xi * st + q * ct;
  fp = (st + qp * ct) / dxdxi;
  fpp = qpp / (dxdxi * dxdxi * dxdxi);
}

double GraphBlend::area() const {
  static const double gn[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double tot = 0;
  for (int i = 0; i < 8; ++i) {
    double xi = gn[i] * delta;
    double q = q_of(coef, xi), qp = qp_of(coef, xi);
    double y = yj + xi * st + q * ct;
    tot += gw[i] * y * (ct - qp * st);
  }
  return tot * delta;
}

void GraphDatum::eval(double x, double& f, double& fp, double& fpp) const {
  for (const auto& b : blends)
    if (x >= b.xlo && x <= b.xhi) {
      b.eval(x, f, fp, fpp);
      return;
    }
  for (size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    double hi = i + 1 == pieces.size() ? p.x1 + 1e-9 : p.x1;
    if (x >= p.x0 - 1e-9 && x <= hi) {
      p.eval(x, f, fp, fpp);
      return;
    }
  }
  throw std::runtime_error("graph eval outside the assembled span");
}

double GraphDatum::f(double x) const {
  double v, fp, fpp;
  eval(x, v, fp, fpp);
  return v;
}

double GraphDatum::area() const { return lobe_area(pieces, blends); }

GraphDatum build_lobed_graph(double eps, double c, double vr, double x1, double x2) {
  if (!(0 < x1 && x1 < x2 && x2 < 1))
    throw std::runtime_error("graph datum needs 0 < x1 < x2 < 1");
  LobeParams pp;
  Lobe L = make_lobe('L', 0.0, x1, eps, pp);
  Lobe M = make_lobe('M', x1, x2, -c, pp);
  Lobe R = make_lobe('R', x2, 1.0, vr, pp);

  // crossings must already be C2: both sides enter with the shared k_x arc
  auto check = [](const Lobe& a, const Lobe& b, double xj) {
    double f1, fp1, fpp1, f2, fp2, fpp2;
    a.pieces.back().eval(xj, f1, fp1, fpp1);
    b.pieces.front().eval(xj, f2, fp2, fpp2);
    if (std::abs(fp1 - fp2) > 1e-9 || std::abs(fpp1 - fpp2) > 1e-7 * (1 + std::abs(fpp1)))
      throw std::runtime_error("lobe crossing is not C2");
  };
  check(L, M, x1);
  check(M, R, x2);

  GraphDatum d;
  d.x1 = x1;
  d.x2 = x2;
  d.ss_l = L.ss;
  d.ss_m = M.ss;
  d.ss_r = R.ss;
  for (const Lobe* lb : {&L, &M, &R}) {
    d.pieces.insert(d.pieces.end(), lb->pieces.begin(), lb->pieces.end());
    d.blends.insert(d.blends.end(), lb->blends.begin(), lb->blends.end());
  }
  return d;
}

}  // namespace lensflow

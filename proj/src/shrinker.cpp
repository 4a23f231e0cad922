#include "lensflow/shrinker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lensflow::shrinker {

namespace {

using Eigen::Vector3d;

Vector3d rhs(const Vector3d& u) {
  double st = std::sin(u(2)), ct = std::cos(u(2));
  return {ct, st, u(0) * st - u(1) * ct};
}

struct Rk45Step {
  Vector3d y5;
  double err;
};

Rk45Step rk45(const Vector3d& u, double h) {
  Vector3d k1 = rhs(u);
  Vector3d k2 = rhs(u + h * (1.0 / 4) * k1);
  Vector3d k3 = rhs(u + h * (3.0 / 32 * k1 + 9.0 / 32 * k2));
  Vector3d k4 = rhs(u + h * (1932.0 / 2197 * k1 - 7200.0 / 2197 * k2 + 7296.0 / 2197 * k3));
  Vector3d k5 =
      rhs(u + h * (439.0 / 216 * k1 - 8.0 * k2 + 3680.0 / 513 * k3 - 845.0 / 4104 * k4));
  Vector3d k6 = rhs(u + h * (-8.0 / 27 * k1 + 2.0 * k2 - 3544.0 / 2565 * k3 +
                             1859.0 / 4104 * k4 - 11.0 / 40 * k5));
  Vector3d y4 =
      u + h * (25.0 / 216 * k1 + 1408.0 / 2565 * k3 + 2197.0 / 4104 * k4 - 1.0 / 5 * k5);
  Vector3d y5 = u + h * (16.0 / 135 * k1 + 6656.0 / 12825 * k3 + 28561.0 / 56430 * k4 -
                         9.0 / 50 * k5 + 2.0 / 55 * k6);
  return {y5, (y5 - y4).norm()};
}

constexpr double kTargetAngle = -M_PI / 3;

}  // namespace

ShootResult shoot(double y0, double rk_tol, double h_max, double s_budget) {
  if (y0 <= 0) throw std::runtime_error("shoot: apex height must be positive");
  ShootResult out;
  std::vector<double> ss{0.0}, th{0.0};
  std::vector<Eigen::Vector2d> ps{{0.0, y0}};
  Vector3d u(0.0, y0, 0.0);
  double s = 0, h = h_max;
  while (s < s_budget) {
    h = std::min(h, h_max);
    Rk45Step st = rk45(u, h);
    double scale = rk_tol * std::max(1.0, u.norm());
    if (st.err > scale && h > 1e-12) {
      h *= std::max(0.2, 0.9 * std::pow(scale / st.err, 0.2));
      continue;
    }
    if (st.y5(1) < 0) {
      // crossing inside this step, bisect the substep length
      double lo = 0, hi = h;
      Vector3d uc = st.y5;
      for (int it = 0; it < 100; ++it) {
        double mid = (lo + hi) / 2;
        Vector3d um = rk45(u, mid).y5;
        if (um(1) > 0)
          lo = mid;
        else {
          hi = mid;
          uc = um;
        }
        if (std::abs(uc(1)) < 1e-15) break;
      }
      s += hi;
      ss.push_back(s);
      ps.push_back({uc(0), uc(1)});
      th.push_back(uc(2));
      out.crossed = true;
      out.angle_residual = uc(2) - kTargetAngle;
      break;
    }
    u = st.y5;
    s += h;
    ss.push_back(s);
    ps.push_back({u(0), u(1)});
    th.push_back(u(2));
    if (st.err > 0) h *= std::min(5.0, 0.9 * std::pow(scale / st.err, 0.2));
  }
  if (!out.crossed) out.angle_residual = std::numeric_limits<double>::infinity();
  int n = static_cast<int>(ss.size());
  out.s.resize(n);
  out.pts.resize(2, n);
  out.theta.resize(n);
  for (int i = 0; i < n; ++i) {
    out.s(i) = ss[i];
    out.pts.col(i) = ps[i];
    out.theta(i) = th[i];
  }
  return out;
}

void sample_half(const ShootResult& half, double s, double& x, double& y, double& theta) {
  const int n = static_cast<int>(half.s.size());
  s = std::clamp(s, 0.0, half.s(n - 1));
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (half.s(mid) <= s ? lo : hi) = mid;
  }
  double h = half.s(hi) - half.s(lo);
  double t = (s - half.s(lo)) / h;
  auto hermite = [&](double a, double b, double da, double db) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a + (t3 - 2 * t2 + t) * h * da +
           (-2 * t3 + 3 * t2) * b + (t3 - t2) * h * db;
  };
  double st0 = std::sin(half.theta(lo)), ct0 = std::cos(half.theta(lo));
  double st1 = std::sin(half.theta(hi)), ct1 = std::cos(half.theta(hi));
  double k0 = half.pts(0, lo) * st0 - half.pts(1, lo) * ct0;
  double k1 = half.pts(0, hi) * st1 - half.pts(1, hi) * ct1;
  x = hermite(half.pts(0, lo), half.pts(0, hi), ct0, ct1);
  y = hermite(half.pts(1, lo), half.pts(1, hi), st0, st1);
  theta = hermite(half.theta(lo), half.theta(hi), k0, k1);
}

ShrinkerProfile solve(int nodes, double rk_tol) {
  double prev_y0 = 0, prev_res = 0;
  double lo = 0, hi = 0;
  bool bracket = false;
  for (double y0 = 0.1; y0 <= 2.0 + 1e-12; y0 += 0.01) {
    double res = shoot(y0, rk_tol).angle_residual;
    if (std::isfinite(res) && std::isfinite(prev_res) && prev_y0 > 0 &&
        ((res < 0) != (prev_res < 0))) {
      lo = prev_y0;
      hi = y0;
      bracket = true;
      break;
    }
    prev_y0 = y0;
    prev_res = res;
  }
  if (!bracket) throw std::runtime_error("shrinker solve: no bracket in the scan range");

  double flo = shoot(lo, rk_tol).angle_residual;
  double root = (lo + hi) / 2, froot = 1;
  for (int it = 0; it < 200; ++it) {
    root = (lo + hi) / 2;
    froot = shoot(root, rk_tol).angle_residual;
    if (std::abs(froot) < 1e-10 || hi - lo < 1e-15) break;
    if ((froot < 0) == (flo < 0)) {
      lo = root;
      flo = froot;
    } else {
      hi = root;
    }
  }

  ShrinkerProfile prof;
  prof.half = shoot(root, rk_tol);
  prof.y0 = root;
  const int m = static_cast<int>(prof.half.s.size());
  prof.half_width = prof.half.pts(0, m - 1);
  prof.half_arclength = prof.half.s(m - 1);

  // sample the dense ODE output at uniform arclength; resampling the polyline
  // instead would put nodes on chords and pollute the discrete curvature
  if (nodes % 2 == 0) ++nodes;
  const int k = nodes / 2;
  prof.curve.p.resize(2, nodes);
  for (int j = 0; j <= k; ++j) {
    double x, y, th;
    sample_half(prof.half, prof.half_arclength * j / k, x, y, th);
    prof.curve.p.col(k + j) = Vector2d(x, y);
    prof.curve.p.col(k - j) = Vector2d(-x, y);
  }
  prof.curve.p(1, 0) = 0;
  prof.curve.p(1, nodes - 1) = 0;

  auto f = compute_frames(prof.curve);
  double worst = 0;
  for (int i = 1; i + 1 < nodes; ++i)
    worst = std::max(worst, std::abs(f.kappa(i) + prof.curve.p.col(i).dot(f.nu.col(i))));
  prof.residual = worst;
  prof.total_turning = 2 * prof.half.theta(m - 1);
  return prof;
}

}  // namespace lensflow::shrinker

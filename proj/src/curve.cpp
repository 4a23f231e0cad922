#include "lensflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lensflow {

namespace {
double cross(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }
double orient(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
  return cross(b - a, c - a);
}
bool on_segment(const Vector2d& a, const Vector2d& b, const Vector2d& q) {
  return std::min(a.x(), b.x()) <= q.x() && q.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= q.y() && q.y() <= std::max(a.y(), b.y());
}
}  // namespace

bool segments_intersect(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                        const Vector2d& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
      o4 != 0)
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

FrameSamples compute_frames(const PlanarCurve& c) {
  const int n = c.n();
  if (n < 2) throw std::runtime_error("compute_frames: need at least 2 nodes");
  FrameSamples f;
  const int m = n - 1;  // segments
  Matrix2Xd u(2, m);
  VectorXd h(m);
  for (int i = 0; i < m; ++i) {
    Vector2d e = c.p.col(i + 1) - c.p.col(i);
    h(i) = e.norm();
    if (h(i) == 0.0)
      throw std::runtime_error("compute_frames: degenerate segment at node " + std::to_string(i));
    u.col(i) = e / h(i);
  }

  f.ds.resize(n);
  f.ds(0) = h(0) / 2;
  f.ds(n - 1) = h(m - 1) / 2;
  for (int i = 1; i < n - 1; ++i) f.ds(i) = (h(i - 1) + h(i)) / 2;

  f.s.resize(n);
  f.s(0) = 0;
  for (int i = 0; i < m; ++i) f.s(i + 1) = f.s(i) + h(i);

  f.tau.resize(2, n);
  f.tau.col(0) = u.col(0);
  f.tau.col(n - 1) = u.col(m - 1);
  for (int i = 1; i < n - 1; ++i) {
    Vector2d mid = u.col(i - 1) + u.col(i);
    double nm = mid.norm();
    f.tau.col(i) = nm > 0 ? Vector2d(mid / nm) : Vector2d(-u.col(i - 1).y(), u.col(i - 1).x());
  }
  f.nu.resize(2, n);
  f.nu.row(0) = -f.tau.row(1);
  f.nu.row(1) = f.tau.row(0);

  f.kappa.resize(n);
  f.lambda.resize(n);
  for (int i = 1; i < n - 1; ++i) {
    double turn = std::atan2(cross(u.col(i - 1), u.col(i)), u.col(i - 1).dot(u.col(i)));
    f.kappa(i) = turn / f.ds(i);
    Vector2d D = c.p.col(i + 1) - 2 * c.p.col(i) + c.p.col(i - 1);
    f.lambda(i) = D.dot(f.tau.col(i)) / (f.ds(i) * f.ds(i));
  }
  if (n >= 3) {
    // one-sided second differences; the normalizer is the Taylor coefficient
    // of the nu-component for spacings (h0, h1), equal to h^2 on uniform meshes
    Vector2d D0 = c.p.col(2) - 2 * c.p.col(1) + c.p.col(0);
    double n0 = h(0) * h(1) + (h(1) * h(1) - h(0) * h(0)) / 2;
    f.kappa(0) = D0.dot(f.nu.col(0)) / n0;
    f.lambda(0) = D0.dot(f.tau.col(0)) / (h(0) * h(1));
    Vector2d D1 = c.p.col(n - 3) - 2 * c.p.col(n - 2) + c.p.col(n - 1);
    double n1 = h(m - 1) * h(m - 2) + (h(m - 2) * h(m - 2) - h(m - 1) * h(m - 1)) / 2;
    f.kappa(n - 1) = D1.dot(f.nu.col(n - 1)) / n1;
    f.lambda(n - 1) = D1.dot(f.tau.col(n - 1)) / (h(m - 1) * h(m - 2));
  } else {
    f.kappa.setZero();
    f.lambda.setZero();
  }
  return f;
}

double length(const PlanarCurve& c) {
  double L = 0;
  for (int i = 0; i + 1 < c.n(); ++i) L += (c.p.col(i + 1) - c.p.col(i)).norm();
  return L;
}

double enclosed_area_signed(const PlanarCurve& c) {
  const int n = c.n();
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(c.p(0, i)));
  if (std::abs(c.p(1, 0)) > 1e-8 * scale || std::abs(c.p(1, n - 1)) > 1e-8 * scale)
    throw std::runtime_error("enclosed_area: endpoints off the axis");
  // curve, then the reflected curve traversed backwards
  double sh = 0;
  auto at = [&](int k) -> Vector2d {
    if (k < n) return c.p.col(k);
    int j = 2 * n - 2 - k;  // k in [n, 2n-3] -> mirrored node j in [1, n-2]
    return {c.p(0, j), -c.p(1, j)};
  };
  const int total = 2 * n - 2;
  for (int k = 0; k < total; ++k) sh += cross(at(k), at((k + 1) % total));
  return -sh / 2;
}

double enclosed_area(const PlanarCurve& c) { return std::abs(enclosed_area_signed(c)); }

double turning_integral(const PlanarCurve& c) {
  const int n = c.n();
  double tot = 0;
  Vector2d prev = c.p.col(1) - c.p.col(0);
  for (int i = 1; i + 1 < n; ++i) {
    Vector2d cur = c.p.col(i + 1) - c.p.col(i);
    tot += std::atan2(cross(prev, cur), prev.dot(cur));
    prev = cur;
  }
  return tot;
}

double turning_integral(const PlanarCurve& c, const Vector2d& tan_start,
                        const Vector2d& tan_end) {
  const double base =
      std::atan2(tan_end.y(), tan_end.x()) - std::atan2(tan_start.y(), tan_start.x());
  Vector2d u0 = c.p.col(1) - c.p.col(0);
  Vector2d u1 = c.p.col(c.n() - 1) - c.p.col(c.n() - 2);
  double raw = turning_integral(c) + std::atan2(cross(tan_start, u0), tan_start.dot(u0)) +
               std::atan2(cross(u1, tan_end), u1.dot(tan_end));
  const double twopi = 2 * M_PI;
  double w = std::round((raw - base) / twopi);
  return base + twopi * w;
}

PlanarCurve resample_uniform(const PlanarCurve& c, int nodes) {
  const int n = c.n();
  VectorXd s(n);
  s(0) = 0;
  for (int i = 0; i + 1 < n; ++i) s(i + 1) = s(i) + (c.p.col(i + 1) - c.p.col(i)).norm();
  const double L = s(n - 1);
  PlanarCurve out;
  out.p.resize(2, nodes);
  out.p.col(0) = c.p.col(0);
  out.p.col(nodes - 1) = c.p.col(n - 1);
  int seg = 0;
  for (int k = 1; k < nodes - 1; ++k) {
    double target = L * k / (nodes - 1);
    while (seg + 2 < n && s(seg + 1) < target) ++seg;
    double w = (target - s(seg)) / (s(seg + 1) - s(seg));
    out.p.col(k) = (1 - w) * c.p.col(seg) + w * c.p.col(seg + 1);
  }
  return out;
}

PlanarCurve scaled(const PlanarCurve& c, double factor) {
  PlanarCurve out = c;
  out.p *= factor;
  return out;
}

PlanarCurve translated(const PlanarCurve& c, const Vector2d& off) {
  PlanarCurve out = c;
  out.p.colwise() += off;
  return out;
}

namespace {

double point_segment_dist(const Vector2d& q, const Vector2d& a, const Vector2d& b) {
  Vector2d d = b - a;
  double len2 = d.squaredNorm();
  double w = len2 > 0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (q - (a + w * d)).norm();
}

double nodes_to_polyline(const PlanarCurve& a, const PlanarCurve& b) {
  double worst = 0;
  for (int i = 0; i < a.n(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < b.n(); ++j)
      best = std::min(best, point_segment_dist(a.p.col(i), b.p.col(j), b.p.col(j + 1)));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const PlanarCurve& a, const PlanarCurve& b) {
  return std::max(nodes_to_polyline(a, b), nodes_to_polyline(b, a));
}

namespace {

// shoelace of the loop (p_i .. p_j, chord back to p_i)
double lobe_area(const Matrix2Xd& p, int i, int j) {
  double sh = 0;
  for (int k = i; k < j; ++k) sh += cross(p.col(k), p.col(k + 1));
  sh += cross(p.col(j), p.col(i));
  return std::abs(sh) / 2;
}

struct NetworkPoly {
  // closed boundary: curve nodes 0..N, then mirrored nodes N-1..1
  Matrix2Xd q;
  int n;  // curve node count
  int total;
  explicit NetworkPoly(const PlanarCurve& c) : n(c.n()), total(2 * c.n() - 2) {
    q.resize(2, total);
    for (int i = 0; i < n; ++i) q.col(i) = c.p.col(i);
    for (int j = 1; j < n - 1; ++j) q.col(2 * n - 2 - j) = Vector2d(c.p(0, j), -c.p(1, j));
  }
  double area() const {
    double sh = 0;
    for (int k = 0; k < total; ++k) sh += cross(q.col(k), q.col((k + 1) % total));
    return std::abs(sh) / 2;
  }
  // area of the loop (cyclic walk a -> b, chord back to a)
  double side_area(int a, int b) const {
    double sh = 0;
    for (int k = a; k != b; k = (k + 1) % total) sh += cross(q.col(k), q.col((k + 1) % total));
    sh += cross(q.col(b), q.col(a));
    return std::abs(sh) / 2;
  }
};

}  // namespace

static EmbedRatio embed_scan(const PlanarCurve& c, bool prune) {
  EmbedRatio r;
  const int n = c.n();
  const Matrix2Xd& p = c.p;

  // self-intersection of the curve itself, non-adjacent segment pairs
  for (int i = 0; i + 1 < n; ++i)
    for (int j = i + 2; j + 1 < n; ++j) {
      if (segments_intersect(p.col(i), p.col(i + 1), p.col(j), p.col(j + 1))) {
        r.self_intersecting = true;
        r.wi = i;
        r.wj = j;
        r.g = r.q1 = r.q2 = 0;
        return r;
      }
    }
  // the network self-touches if the curve reaches the axis between junctions
  for (int i = 1; i + 1 < n; ++i)
    if (p(1, i) <= 0) {
      r.self_intersecting = true;
      r.wi = r.wj = i;
      r.g = r.q1 = r.q2 = 0;
      return r;
    }

  NetworkPoly net(c);
  const double area_total = net.area();
  double q1 = std::numeric_limits<double>::infinity();
  double q2 = std::numeric_limits<double>::infinity();
  int wi1 = -1, wj1 = -1, wi2 = -1, wj2 = -1;

  for (int i = 0; i + 2 < n; ++i)
    for (int j = i + 2; j < n; ++j) {
      const double ch2 = (p.col(j) - p.col(i)).squaredNorm();
      if (prune && ch2 >= q1 * area_total) continue;  // lobe area <= area_total
      bool blocked = false;
      for (int k = i; k < j && !blocked; ++k) {
        if (k == i || k == j - 1) continue;  // share a chord endpoint
        blocked = segments_intersect(p.col(i), p.col(j), p.col(k), p.col(k + 1));
      }
      if (blocked) continue;
      const double A = lobe_area(p, i, j);
      if (A < 1e-300) continue;
      const double ratio = ch2 / A;
      if (ratio < q1) {
        q1 = ratio;
        wi1 = i;
        wj1 = j;
      }
    }

  // curve node i against mirrored node j (cyclic index 2n-2-j, junctions map to
  // themselves)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int b = (j == 0) ? 0 : (j == n - 1 ? n - 1 : 2 * n - 2 - j);
      if (b == i) continue;
      const Vector2d pm(p(0, j), -p(1, j));
      const double ch2 = (pm - p.col(i)).squaredNorm();
      if (ch2 < 1e-300) continue;
      if (prune && ch2 >= q2 * area_total) continue;
      bool blocked = false;
      const int total = net.total;
      const int ia = (i - 1 + total) % total, ib = (b - 1 + total) % total;
      for (int k = 0; k < total && !blocked; ++k) {
        if (k == i || k == ia || k == b || k == ib) continue;  // incident to an endpoint
        blocked =
            segments_intersect(p.col(i), pm, net.q.col(k), net.q.col((k + 1) % total));
      }
      if (blocked) continue;
      const double A = std::min(net.side_area(i, b), net.side_area(b, i));
      if (A < 1e-300) continue;
      const double ratio = ch2 / A;
      if (ratio < q2) {
        q2 = ratio;
        wi2 = i;
        wj2 = j;
      }
    }

  r.q1 = q1;
  r.q2 = q2;
  if (q1 <= q2) {
    r.g = q1;
    r.wi = wi1;
    r.wj = wj1;
    r.wj_mirrored = false;
  } else {
    r.g = q2;
    r.wi = wi2;
    r.wj = wj2;
    r.wj_mirrored = true;
  }
  return r;
}

EmbedRatio embed_ratio(const PlanarCurve& c) { return embed_scan(c, true); }
EmbedRatio embed_ratio_bruteforce(const PlanarCurve& c) { return embed_scan(c, false); }

}  // namespace lensflow

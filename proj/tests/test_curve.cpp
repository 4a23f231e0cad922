#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lensflow/curve.hpp"

using namespace lensflow;

namespace {

PlanarCurve circle_ccw(int n, double r = 1.0) {
  PlanarCurve c;
  c.p.resize(2, n);
  for (int k = 0; k < n; ++k) {
    double th = 2 * M_PI * k / (n - 1);
    c.p.col(k) = Vector2d(r * std::cos(th), r * std::sin(th));
  }
  return c;
}

PlanarCurve semicircle(int n, double r = 1.0, double grade = 1.0) {
  // upper half, left to right
  PlanarCurve c;
  c.p.resize(2, n);
  for (int k = 0; k < n; ++k) {
    double u = std::pow(double(k) / (n - 1), grade);
    double th = M_PI * (1 - u);
    c.p.col(k) = Vector2d(r * std::cos(th), r * std::sin(th));
  }
  return c;
}

// deterministic rng for the fixture curves
struct SplitMix64 {
  uint64_t s;
  explicit SplitMix64(uint64_t seed) : s(seed) {}
  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

PlanarCurve random_graph_curve(SplitMix64& rng, int n) {
  // positive graph over [0,1] with endpoints pinned to the axis
  double a1 = 0.8 * rng.uniform() - 0.4;
  double a2 = 0.6 * rng.uniform() - 0.3;
  double a3 = 0.4 * rng.uniform() - 0.2;
  double amp = 0.2 + 1.3 * rng.uniform();
  PlanarCurve c;
  c.p.resize(2, n);
  for (int k = 0; k < n; ++k) {
    double x = double(k) / (n - 1);
    double bump = 1 + a1 * std::sin(2 * M_PI * x) + a2 * std::sin(3 * M_PI * x) +
                  a3 * std::cos(5 * M_PI * x);
    c.p.col(k) = Vector2d(x, amp * x * (1 - x) * bump);
  }
  c.p(1, 0) = 0;
  c.p(1, n - 1) = 0;
  return c;
}

double max_interior_kappa_error(int n, double expect) {
  auto f = compute_frames(circle_ccw(n));
  double worst = 0;
  for (int i = 1; i + 1 < n; ++i) worst = std::max(worst, std::abs(f.kappa(i) - expect));
  return worst;
}

}  // namespace

TEST_CASE("frames: circle, segment, semicircle") {
  auto f = compute_frames(circle_ccw(200));
  for (int i = 1; i < 199; ++i) {
    CHECK(f.kappa(i) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(f.tau.col(i).norm() - 1) < 1e-14);
    CHECK(f.nu(0, i) == -f.tau(1, i));
    CHECK(f.nu(1, i) == f.tau(0, i));
  }

  PlanarCurve seg;
  seg.p.resize(2, 50);
  for (int k = 0; k < 50; ++k) seg.p.col(k) = Vector2d(k / 49.0, 0.0);
  auto fs = compute_frames(seg);
  for (int i = 0; i < 50; ++i) {
    CHECK(fs.kappa(i) == 0.0);
    CHECK(std::abs(fs.lambda(i)) < 1e-11);  // spacing 1/49 is not representable
  }
  CHECK(fs.ds.sum() == doctest::Approx(1.0).epsilon(1e-14));

  auto fh = compute_frames(semicircle(200));
  for (int i = 1; i < 199; ++i) CHECK(fh.kappa(i) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("frames: degenerate segment rejected") {
  PlanarCurve c;
  c.p.resize(2, 3);
  c.p.col(0) = Vector2d(0, 0);
  c.p.col(1) = Vector2d(0, 0);
  c.p.col(2) = Vector2d(1, 0);
  CHECK_THROWS(compute_frames(c));
}

TEST_CASE("length") {
  PlanarCurve a;
  a.p.resize(2, 2);
  a.p.col(0) = Vector2d(0, 0);
  a.p.col(1) = Vector2d(3, 0);
  CHECK(length(a) == 3.0);

  CHECK(length(semicircle(1000)) == doctest::Approx(M_PI).epsilon(1e-5));

  PlanarCurve w;
  w.p.resize(2, 3);
  w.p.col(0) = Vector2d(0, 0);
  w.p.col(1) = Vector2d(1, 1);
  w.p.col(2) = Vector2d(2, 0);
  CHECK(length(w) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("enclosed area: disk, flat segment, scaling") {
  auto half = semicircle(1000);
  CHECK(enclosed_area(half) == doctest::Approx(M_PI).epsilon(1e-5));
  // left-to-right above the axis carries positive sign
  CHECK(enclosed_area_signed(half) > 0);

  PlanarCurve flat;
  flat.p.resize(2, 10);
  for (int k = 0; k < 10; ++k) flat.p.col(k) = Vector2d(k / 9.0, 0.0);
  CHECK(enclosed_area(flat) == 0.0);

  double a1 = enclosed_area(half);
  double a2 = enclosed_area(scaled(half, 2.0));
  CHECK(a2 == doctest::Approx(4 * a1).epsilon(1e-14));
  CHECK(length(scaled(half, 2.0)) == doctest::Approx(2 * length(half)).epsilon(1e-14));

  PlanarCurve off = translated(half, Vector2d(0, 0.5));
  CHECK_THROWS(enclosed_area(off));
}

TEST_CASE("turning integral") {
  PlanarCurve seg;
  seg.p.resize(2, 5);
  for (int k = 0; k < 5; ++k) seg.p.col(k) = Vector2d(k, 0.0);
  CHECK(turning_integral(seg) == 0.0);

  // lens-type end tangents: same constant for every curve carrying them
  Vector2d t0(0.5, std::sqrt(3.0) / 2), t1(0.5, -std::sqrt(3.0) / 2);
  auto lensish = [&](double width) {
    PlanarCurve c;
    int n = 60;
    c.p.resize(2, n);
    for (int k = 0; k < n; ++k) {
      double x = width * k / (n - 1);
      c.p.col(k) = Vector2d(x, x * (width - x));
    }
    return c;
  };
  double v1 = turning_integral(lensish(1.0), t0, t1);
  double v2 = turning_integral(lensish(2.5), t0, t1);
  CHECK(v1 == v2);
  CHECK(v1 == doctest::Approx(-2 * M_PI / 3).epsilon(1e-15));

  // steeper family: total turn is a full -4*pi/3
  Vector2d s0(-0.5, std::sqrt(3.0) / 2), s1(-0.5, -std::sqrt(3.0) / 2);
  auto arc = [&](int n) {
    PlanarCurve c;
    c.p.resize(2, n);
    for (int k = 0; k < n; ++k) {
      double th = 5 * M_PI / 6 - 4 * M_PI / 3 * k / (n - 1);
      c.p.col(k) = Vector2d(std::cos(th), 0.5 + std::sin(th));
    }
    return c;
  };
  double v3 = turning_integral(arc(80), s0, s1);
  CHECK(v3 == doctest::Approx(-4 * M_PI / 3).epsilon(1e-15));
  CHECK(v3 == turning_integral(arc(123), s0, s1));
}

TEST_CASE("curvature converges at second order") {
  double e1 = max_interior_kappa_error(100, 1.0);
  double e2 = max_interior_kappa_error(200, 1.0);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("turning-angle kappa tracks the projected second difference") {
  auto diff_at = [](int n) {
    auto c = semicircle(n, 1.0, 1.15);  // graded mesh so the forms differ at O(h)
    auto f = compute_frames(c);
    double worst = 0;
    for (int i = 1; i + 1 < n; ++i) {
      Vector2d D = c.p.col(i + 1) - 2 * c.p.col(i) + c.p.col(i - 1);
      double alt = D.dot(f.nu.col(i)) / (f.ds(i) * f.ds(i));
      worst = std::max(worst, std::abs(alt - f.kappa(i)));
    }
    return worst;
  };
  double d1 = diff_at(100), d2 = diff_at(200);
  CHECK(d1 < 0.1);
  CHECK(d1 / d2 >= 1.5);  // first-order gap between the two forms
}

TEST_CASE("embed ratio: invariances and failure mode") {
  SplitMix64 rng(1417 * 2654435761ull);
  auto c = random_graph_curve(rng, 80);
  auto base = embed_ratio(c);
  CHECK(base.g > 0);
  CHECK(base.g == doctest::Approx(std::min(base.q1, base.q2)).epsilon(1e-15));

  auto s = embed_ratio(scaled(c, 2.0));
  CHECK(s.g == doctest::Approx(base.g).epsilon(1e-14));
  CHECK(s.wi == base.wi);
  CHECK(s.wj == base.wj);

  auto t = embed_ratio(translated(c, Vector2d(3.75, 0)));
  CHECK(t.g == doctest::Approx(base.g).epsilon(1e-12));

  PlanarCurve cross;
  cross.p.resize(2, 5);
  cross.p.col(0) = Vector2d(0, 0);
  cross.p.col(1) = Vector2d(1, 1);
  cross.p.col(2) = Vector2d(0, 1.2);
  cross.p.col(3) = Vector2d(0.8, 0.2);
  cross.p.col(4) = Vector2d(1.5, 0);
  auto bad = embed_ratio(cross);
  CHECK(bad.self_intersecting);
  CHECK(bad.g == 0.0);
}

TEST_CASE("embed ratio matches the unpruned scan on random curves") {
  SplitMix64 rng(20260816ull);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 40 + int(rng.next() % 161);  // up to 200 nodes
    auto c = random_graph_curve(rng, n);
    auto fast = embed_ratio(c);
    auto slow = embed_ratio_bruteforce(c);
    REQUIRE(!fast.self_intersecting);
    CHECK(std::abs(fast.q1 - slow.q1) <= 1e-12 * std::max(1.0, std::abs(slow.q1)));
    CHECK(std::abs(fast.q2 - slow.q2) <= 1e-12 * std::max(1.0, std::abs(slow.q2)));
    CHECK(std::abs(fast.g - slow.g) <= 1e-12 * std::max(1.0, std::abs(slow.g)));
    CHECK(fast.wi == slow.wi);
    CHECK(fast.wj == slow.wj);
    CHECK(fast.wj_mirrored == slow.wj_mirrored);
  }
}

TEST_CASE("resample to uniform arclength") {
  auto c = semicircle(200, 1.0, 1.3);
  auto r = resample_uniform(c, 200);
  CHECK(r.p.col(0) == c.p.col(0));
  CHECK(r.p.col(199) == c.p.col(199));
  double lo = 1e300, hi = 0;
  for (int i = 0; i + 1 < 200; ++i) {
    double h = (r.p.col(i + 1) - r.p.col(i)).norm();
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  // chord lengths differ at O(h * theta^2) where targets straddle source kinks
  CHECK(hi / lo < 1 + 1e-4);
  CHECK(std::abs(length(r) - length(c)) < std::pow(length(c) / 199, 2));

  // no kinks: chords are exactly the arclength spacing
  PlanarCurve line;
  line.p.resize(2, 40);
  for (int k = 0; k < 40; ++k) {
    double u = std::pow(k / 39.0, 2.0);
    line.p.col(k) = Vector2d(2 * u, u);
  }
  auto rl = resample_uniform(line, 64);
  double lo2 = 1e300, hi2 = 0;
  for (int i = 0; i + 1 < 64; ++i) {
    double h = (rl.p.col(i + 1) - rl.p.col(i)).norm();
    lo2 = std::min(lo2, h);
    hi2 = std::max(hi2, h);
  }
  CHECK(hi2 / lo2 < 1 + 1e-12);
}

TEST_CASE("segment intersection predicate") {
  Vector2d a(0, 0), b(2, 2), c(0, 2), d(2, 0);
  CHECK(segments_intersect(a, b, c, d));
  CHECK(!segments_intersect(a, b, Vector2d(3, 0), Vector2d(3, 5)));
  // collinear overlap and endpoint touch both count as contact
  CHECK(segments_intersect(a, Vector2d(1, 1), Vector2d(0.5, 0.5), Vector2d(3, 3)));
  CHECK(segments_intersect(a, b, b, Vector2d(5, 2)));
}

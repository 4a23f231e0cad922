#pragma once
#include <array>
#include <vector>

namespace lensflow {

// piecewise graph skeleton: lines and circular arcs with closed-form
// value/slope/second derivative and exact areas
struct GraphPiece {
  bool arc = false;
  double x0 = 0, x1 = 0;
  // line
  double xa = 0, y0 = 0, m = 0;
  // arc
  double cx = 0, cy = 0, R = 0, sig = 0;

  void eval(double x, double& f, double& fp, double& fpp) const;
  double area(double a, double b) const;  // integral of f over [a,b] within [x0,x1]
};

// quintic correction in the tangent-rotated frame at a join, making it C2
struct GraphBlend {
  double xj = 0, yj = 0, th = 0, delta = 0;
  double ct = 1, st = 0;
  std::array<double, 6> coef{};  // ascending powers of xi
  double xlo = 0, xhi = 0;

  double xi_of(double x) const;
  void eval(double x, double& f, double& fp, double& fpp) const;
  double area() const;  // integral of y dx across the window
};

class GraphDatum {
 public:
  std::vector<GraphPiece> pieces;
  std::vector<GraphBlend> blends;
  double x1 = 0, x2 = 0;          // axis crossings separating the three lobes
  double ss_l = 0, ss_m = 0, ss_r = 0;  // dialed side slopes per lobe

  void eval(double x, double& f, double& fp, double& fpp) const;
  double f(double x) const;
  double area() const;  // exact integral over the full span
};

// three-lobe graph over [0,1]: integral +eps on (0,x1), -c on (x1,x2), +vr on
// (x2,1), slope +sqrt(3) at 0 and -sqrt(3) at 1, straight at both endpoints so
// the junction compatibility holds exactly
GraphDatum build_lobed_graph(double eps, double c, double vr, double x1, double x2);

}  // namespace lensflow

#pragma once
#include <Eigen/Dense>
#include <string>

namespace lensflow {

using Eigen::Matrix2Xd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// open polyline, one column per node; network curves have y=0 at both ends
struct PlanarCurve {
  Matrix2Xd p;
  int n() const { return static_cast<int>(p.cols()); }
};

// per-node frames; endpoint kappa/lambda come from one-sided stencils
struct FrameSamples {
  Matrix2Xd tau, nu;     // unit tangent, left normal (+pi/2 rotation)
  VectorXd kappa;        // turning angle / dual arclength at interior nodes
  VectorXd lambda;       // <second difference, tau>/ds^2
  VectorXd ds;           // dual weights, half segments at the ends
  VectorXd s;            // cumulative arclength
};

FrameSamples compute_frames(const PlanarCurve& c);
double length(const PlanarCurve& c);

// area between the curve and its mirror image across the x-axis.
// signed version is positive for a curve running left to right above the axis;
// enclosed_area returns its absolute value.
double enclosed_area_signed(const PlanarCurve& c);
double enclosed_area(const PlanarCurve& c);

// sum of the signed exterior angles between consecutive segments
double turning_integral(const PlanarCurve& c);
// winding-corrected angle difference of the prescribed end tangents; for an
// enforced boundary condition this is the same double at every sample
double turning_integral(const PlanarCurve& c, const Vector2d& tan_start,
                        const Vector2d& tan_end);

struct EmbedRatio {
  double q1 = 0, q2 = 0, g = 0;
  int wi = -1, wj = -1;     // witness chord node pair
  bool wj_mirrored = false; // witness second node lies on the reflected curve
  bool self_intersecting = false;
};

// discrete version of the embeddedness functional min(Q1,Q2):
// q1 scans curve-curve chords against the lobe they cut off, q2 scans
// curve-to-mirror chords against the smaller of the two network parts
EmbedRatio embed_ratio(const PlanarCurve& c);

// same scan with no shortcuts, used as the cross-check oracle
EmbedRatio embed_ratio_bruteforce(const PlanarCurve& c);

// nodes resampled to uniform arclength, endpoints kept
PlanarCurve resample_uniform(const PlanarCurve& c, int nodes);

// proper crossing or endpoint touch of two closed segments
bool segments_intersect(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                        const Vector2d& d);

PlanarCurve scaled(const PlanarCurve& c, double factor);
PlanarCurve translated(const PlanarCurve& c, const Vector2d& off);

// symmetric Hausdorff distance between the two polylines (nodes of one
// against segments of the other, both ways)
double hausdorff_distance(const PlanarCurve& a, const PlanarCurve& b);

}  // namespace lensflow

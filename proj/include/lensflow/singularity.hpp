#pragma once
#include <limits>
#include <string>
#include <vector>

#include "lensflow/curve.hpp"
#include "lensflow/diagnostics.hpp"

namespace lensflow::sing {

struct StoredFrame {
  double t = 0;
  PlanarCurve curve;
};
using FrameSeries = std::vector<StoredFrame>;

enum class BlowupMode { typeI, hamilton };

struct BlowupFrame {
  PlanarCurve curve;
  BlowupMode mode = BlowupMode::typeI;
  double scale = 1;  // 1/sqrt(2(T_est - t)) for typeI, mu_n for hamilton
  Vector2d center{0, 0};
  double source_t = 0;
  long rung = 0;  // hamilton: first ladder index that chose this pick
};

struct TEstimate {
  double T_area = std::numeric_limits<double>::quiet_NaN();
  double T_fit = std::numeric_limits<double>::quiet_NaN();  // zero crossing of 1/max|kappa|^2
  bool area_monotone = true;
  double fit_gap = std::numeric_limits<double>::quiet_NaN();
};

// singular time from the exact area drain law, with the curvature fit kept as
// a disagreement alarm; needs at least 10 samples
TEstimate estimate_T(const std::vector<diag::DiagnosticsRecord>& series);

// midpoint of the junction segment of the last frame
Vector2d default_blowup_center(const FrameSeries& frames);

// frames (curve - p) / sqrt(2 (T_est - t)); every frame time must lie below T_est
std::vector<BlowupFrame> rescale_typeI(const FrameSeries& frames, const Vector2d& p,
                                       double T_est);

struct HamiltonConfig {
  long ladder = 1L << 19;    // rungs n = 1..ladder, time caps T_est - 1/n
  double window = 3.0;       // rescaled-arclength half-width kept around the pick
  double saturation = 0.35;  // frames with max|kappa| * median(ds) above this are skipped
};

// curvature-normalized frames mu_n (gamma - gamma(pick)) where the pick
// maximizes max|kappa(t)| sqrt(T_est - 1/n - t); one frame per distinct pick,
// rungs with an empty eligible window are skipped
std::vector<BlowupFrame> hamilton_rescale(const FrameSeries& frames, double T_est,
                                          const HamiltonConfig& cfg = {});

struct TranslatorFit {
  double residual = 0;  // min_V int (kappa - <V,nu>)^2 ds / int kappa^2 ds
  Vector2d velocity{0, 0};
  bool flat = false;  // int kappa^2 ds vanishes
};
TranslatorFit translator_residual(const PlanarCurve& c);

struct ShrinkerDistance {
  double hausdorff = 0;
  double angle_gap = 0;  // max tangent-angle discrepancy at matched arclength fractions
  double kappa_gap = 0;  // reported, not gated: the noisiest field
  double value = 0;      // hausdorff + angle_gap
};

// both curves recentred horizontally about their junction midpoints first
ShrinkerDistance shrinker_distance(const PlanarCurve& frame, const PlanarCurve& profile);

enum class Verdict { TypeI, TypeII, JunctionCollision, Extinction, Unresolved };
const char* verdict_name(Verdict v);

struct ClassifyConfig {
  double drift_tol = 0.20;     // type-I: relative spread of rescaled sup over the tail
  double growth_factor = 3.0;  // type-II: end/start ratio over the tail
  double decade = 10.0;        // tail spans [floor, decade*floor] in T_est - t
  // the floor keeps the tail window above the last-sample sliver, where the
  // rescale factor amplifies discretization error of the halt time itself
  double tail_floor_frac = 1e-2;
  double kappa_bound_factor = 3.0;  // collision: max|kappa| stays within this factor
  double bounded_factor = 2.0;      // bounded tail: max <= this factor times the median
  double gap_min = 0;               // collision gate, copied from the run's stop rules
  int min_samples = 10;
  int min_tail_samples = 5;
};

struct SingularityReport {
  Verdict verdict = Verdict::Unresolved;
  TEstimate T;
  std::string halt;
  double tail_drift = 0;
  double tail_growth = 0;
  double kappa_ratio = 0;  // max over the run relative to the first sample
  std::vector<std::string> notes;
  // evidence series
  std::vector<double> t, rescaled_sup, junction_gap;
  std::vector<double> shrinker_dist;     // per rescaled frame, extinction-bound runs
  std::vector<double> translator_resid;  // per hamilton frame, filled by the caller
};

SingularityReport classify(const std::vector<diag::DiagnosticsRecord>& series,
                           const FrameSeries& frames, const std::string& halt,
                           const ClassifyConfig& cfg = {});

std::string report_text(const SingularityReport& rep);

}  // namespace lensflow::sing

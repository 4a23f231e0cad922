#pragma once
#include <functional>
#include <limits>

#include "lensflow/curve.hpp"

namespace lensflow::flow {

enum class Scheme { explicit_euler, semi_implicit };

struct StepPolicy {
  Scheme scheme = Scheme::semi_implicit;
  double cfl = 0.4;                 // in (0, 1]
  double dt_cap = std::numeric_limits<double>::infinity();
  bool curvature_adaptive = true;   // dt <= cfl / max kappa^2
  int regrid_every = 10;            // 0 disables
  double angle_tol = 1e-8;
};

struct StopRules {
  double horizon = std::numeric_limits<double>::infinity();
  double l_min = 0.0;
  double kappa_max = 1e4;
  double gap_min = 0.0;
  long max_steps = std::numeric_limits<long>::max();
};

enum class Halt {
  none,
  horizon,
  length_min,
  curvature_max,
  junction_gap,
  singular_dt,   // dt underflow, the step refused to advance
  tangled,       // segment collapse survived a regrid retry
  step_limit,
};

const char* halt_name(Halt h);

struct FlowState {
  PlanarCurve curve;
  double t = 0.0;
  long step_count = 0;
  double last_dt = 0.0;
  double bc_angle = 0.0;
};

struct RunResult {
  Halt reason = Halt::none;
  double t_final = 0.0;
  long steps = 0;
};

// One update of the full system: interior nodes by the chosen scheme with the
// parameter metric frozen at step start, node 0 and node N slaved to y = 0 and
// the fixed tangent ray. Returns Halt::none on success; singular_dt / tangled
// signal that the state was left unchanged (except a possible regrid).
Halt step(FlowState& s, const StepPolicy& p,
          double dt_ceiling = std::numeric_limits<double>::infinity());

// Iterate step until a stop fires. on_sample (if given) sees the state before
// the first step, after every sample_every-th step, and at the final time.
RunResult run(FlowState& s, const StepPolicy& p, const StopRules& stops,
              const std::function<void(const FlowState&)>& on_sample = {},
              int sample_every = 1);

// Uniform-arclength resampling by linear interpolation; endpoints unchanged.
PlanarCurve regrid(const PlanarCurve& c);

double junction_gap(const PlanarCurve& c);

// Test seam: advance interior nodes only, both endpoints pinned, no boundary
// rows. A uniformly spaced straight segment is an exact fixed point.
PlanarCurve step_pinned(const PlanarCurve& c, double dt, Scheme scheme);

}  // namespace lensflow::flow

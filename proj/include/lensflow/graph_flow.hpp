#pragma once
#include <Eigen/Dense>
#include <functional>

#include "lensflow/curve.hpp"
#include "lensflow/graph_datum.hpp"

namespace lensflow::graph {

// f on the uniform reference mesh xi_j = j/M, mapped to x = a + xi (b - a)
struct GraphState {
  double a = 0, b = 1;
  Eigen::VectorXd f;
  double t = 0;
  long step_count = 0;
  double last_dt = 0;
};

struct LobeTrack {
  bool valid = false;  // sign pattern (+, -, +) located
  double x1 = 0, x2 = 0;
  double v_plus = 0, v_minus = 0;  // v_minus stored positive
};

enum class GraphHalt { none, vplus_exhausted, right_pinch, slope_breach, timeout };
const char* halt_name(GraphHalt h);

struct GraphPolicy {
  double cfl = 0.4;
  double horizon = 0.2;
  double slope_factor = 1.5;  // breach threshold relative to the initial max slope
};

struct GraphRunResult {
  GraphHalt reason = GraphHalt::none;
  double t_final = 0;
  long steps = 0;
};

// sample the datum on M+1 nodes; endpoint values pinned to zero and the
// adjacent nodes adjusted so the one-sided slopes read exactly +-sqrt(3)
GraphState make_state(const GraphDatum& d, int segments);

PlanarCurve to_curve(const GraphState& s);

// one ALE step of f_t = f_xx/(1+f_x^2) with junction-driven endpoint motion
// a' = -f_xx(a)/(4 sqrt(3)), b' = +f_xx(b)/(4 sqrt(3))
void gstep(GraphState& s, double cfl);

// validation mode: endpoints held, plain Dirichlet rows, no mesh motion
void gstep_pinned(GraphState& s, double cfl);

LobeTrack track_lobes(const GraphState& s);

// iterate gstep with the halt rules checked every step; on_sample (if given)
// sees the initial state, every sample_every-th step, and the final state
GraphRunResult run(GraphState& s, const GraphPolicy& pol,
                   const std::function<void(const GraphState&)>& on_sample = {},
                   int sample_every = 1);

}  // namespace lensflow::graph

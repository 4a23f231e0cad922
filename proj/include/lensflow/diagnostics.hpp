#pragma once
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lensflow/curve.hpp"

namespace lensflow::diag {

// one sample row; optional fields stay empty unless the run asks for them
struct DiagnosticsRecord {
  double t = 0;
  double length = 0;
  double area = 0;
  double int_kappa = 0;      // prescribed-tangent turning integral
  double int_abs_kappa = 0;  // node quadrature of |kappa|
  double max_abs_kappa = 0;
  double min_kappa = 0;
  double max_kappa = 0;
  double junction_gap = 0;  // x_N - x_0
  std::optional<double> g_embed;
  std::optional<double> huisken;
  std::optional<double> rescaled_sup;
};

struct SampleOptions {
  double bc_angle = M_PI / 3;
  bool with_embed = false;    // O(N^2), sampled sparsely by the caller
  bool with_huisken = false;  // only meaningful on rescaled frames
};

// all curve-derived fields of one record; the curvature extrema scan interior
// nodes because the one-sided end stencils echo the junction constraint
// rather than measure arc curvature
DiagnosticsRecord sample(const PlanarCurve& c, double t, const SampleOptions& opt = {});

// Gaussian-weighted length, trapezoid on the nodes; the curve must already be
// translated and rescaled about the blow-up point
double huisken_functional(const PlanarCurve& c);

struct MonotoneReport {
  bool ok = true;
  double worst = 0;    // largest signed increment against the trend
  double worst_t = 0;  // t of the sample ending that increment
  int checked = 0;     // consecutive present pairs examined
};

using FieldAccessor = std::function<std::optional<double>(const DiagnosticsRecord&)>;

// direction +1 nondecreasing, -1 nonincreasing; records where the field is
// empty are skipped, consecutive present samples must not violate the trend
// by more than tol
MonotoneReport certify_monotone(const std::vector<DiagnosticsRecord>& series,
                                const FieldAccessor& field, int direction, double tol);
MonotoneReport certify_monotone(const std::vector<DiagnosticsRecord>& series,
                                double DiagnosticsRecord::*field, int direction, double tol);

// fixed series.csv schema; shortest round-trip decimals, empty cells for
// missing optionals
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);

}  // namespace lensflow::diag

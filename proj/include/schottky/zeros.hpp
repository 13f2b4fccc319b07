#pragma once

#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "schottky/zeta.hpp"

namespace schottky {

struct RectRegion {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
};

struct DiskRegion {
  Complex center;
  double radius = 0.0;
};

using Region = std::variant<RectRegion, DiskRegion>;

bool contains(const Region& region, Complex s);
/// Scales the region about its center by (1 + fraction).
Region dilate(const Region& region, double fraction);

struct ContourOptions {
  int nodes = 256;                // initial boundary nodes, doubled until stable
  int max_nodes = 8192;
  double integer_tolerance = 1e-3;
  double boundary_ratio = 1e-10;  // min |f| / max |f| on the boundary below which a zero is suspected
  bool allow_dilation = true;     // retry once on a 1% dilated region before failing
};

struct ZeroCount {
  int count = 0;
  Complex raw;                  // (1/2 pi i) times the contour integral
  double integer_distance = 0.0;
  int nodes = 0;                // nodes used by the accepted quadrature
  Region region;                // the region actually integrated over (dilated on retry)
  bool dilated = false;
  double boundary_min = 0.0;    // min |f| over the boundary samples
  double boundary_max = 0.0;
};

/// Argument principle on the log-derivative: trapezoid rule on circles, Gauss-Legendre panels on
/// rectangle edges. Throws BoundaryZeroSuspected, NonIntegerWinding.
ZeroCount count_zeros(const ZetaEvaluator& f, const Region& region, const ContourOptions& options = {});

struct ArgumentOptions {
  int initial_nodes = 64;
  double max_phase_step = 0.7;    // radians between accepted neighbours
  double max_log_modulus_step = 0.7;
  int max_bisections = 24;
  double boundary_ratio = 1e-10;
  bool allow_dilation = true;
  /// f(conj s) = conj f(s) and the region is symmetric about the real axis: only the upper
  /// half of the boundary is traversed.
  bool conjugate_symmetric = false;
  /// Repeat with doubled initial nodes until two consecutive windings agree (at most
  /// max_doublings times). Guards against a phase turning a whole multiple of 2 pi between samples.
  bool confirm_by_doubling = true;
  int max_doublings = 6;
};

/// Argument principle by continuous phase tracking of f along the boundary, with adaptive
/// bisection of any step whose phase or modulus jump is large. Uses values only.
ZeroCount count_zeros_by_argument(const ValueEvaluator& f, const Region& region, const ArgumentOptions& options = {});

struct LocatedZero {
  Complex s;
  int multiplicity = 1;
  double residual = 0.0;  // |f| at the last Newton iterate relative to max |f| on the region boundary
};

struct ZeroReport {
  Region region;
  int winding = 0;
  std::vector<LocatedZero> zeros;
};

struct LocateOptions {
  double tol = 1e-10;
  int max_depth = 30;
  int newton_iterations = 60;
  ContourOptions contour;  // whole-region winding (log-derivative quadrature)
  ArgumentOptions cells;   // sub-cell windings (phase tracking)
  int cell_nodes = 16;     // initial phase-tracking nodes on sub-cells
  /// Take the whole-region winding from phase tracking alone, skipping the quadrature
  /// (for large matrices where the log-derivative is expensive).
  bool winding_by_argument = false;
};

/// Whole-region winding by count_zeros, confirmed by phase tracking; then recursive
/// quadrisection until each cell winds at most once (or a small square certifies a multiple
/// zero), then Newton s <- s - m / (f'/f). Throws MaxDepthExceeded, NewtonDiverged.
ZeroReport locate_zeros(const AnalyticFunction& f, const Region& region, const LocateOptions& options = {});

nlohmann::json region_to_json(const Region& region);
Region region_from_json(const nlohmann::json& j);
nlohmann::json zero_report_to_json(const ZeroReport& report);

/// (1/2 pi) int log|f(b + R e^{i theta})| d theta - log|f(b)| by the trapezoid rule.
double jensen_boundary_term(const ValueEvaluator& f, Complex center, double radius, int nodes = 1024);
/// sum over located zeros of multiplicity * log(R / |z - b|).
double jensen_zero_term(const ZeroReport& report, Complex center, double radius);

}  // namespace schottky

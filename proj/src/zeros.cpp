#include "schottky/zeros.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"

namespace schottky {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

bool is_empty(const RectRegion& r) { return !(r.re_max > r.re_min) || !(r.im_max > r.im_min); }

struct Segment {
  Complex a, b;
};

std::vector<Segment> rect_edges(const RectRegion& r) {
  const Complex c00(r.re_min, r.im_min), c10(r.re_max, r.im_min), c11(r.re_max, r.im_max), c01(r.re_min, r.im_max);
  return {{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}};
}

struct QuadratureSum {
  Complex raw;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
};

ZetaValue safe_eval(const ZetaEvaluator& f, Complex s) {
  try {
    return f(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) return {0.0, Complex(std::nan(""), 0.0)};
    throw;
  }
}

void record(QuadratureSum& q, const ZetaValue& v) {
  const double m = std::abs(v.value);
  q.min_abs = std::min(q.min_abs, m);
  q.max_abs = std::max(q.max_abs, m);
}

QuadratureSum integrate_disk(const ZetaEvaluator& f, const DiskRegion& d, int n) {
  QuadratureSum q;
  for (int j = 0; j < n; ++j) {
    const Complex offset = d.radius * std::exp(kI * (2.0 * kPi * j / n));
    const ZetaValue v = safe_eval(f, d.center + offset);
    record(q, v);
    q.raw += offset * v.log_derivative;
  }
  q.raw /= static_cast<double>(n);
  return q;
}

QuadratureSum integrate_rect(const ZetaEvaluator& f, const RectRegion& r, int n) {
  constexpr int kPanelOrder = 16;
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> out;
    gauss_legendre(kPanelOrder, out.first, out.second);
    return out;
  }();
  const auto edges = rect_edges(r);
  const double perimeter = 2.0 * ((r.re_max - r.re_min) + (r.im_max - r.im_min));
  const int total_panels = std::max(4, n / kPanelOrder);
  QuadratureSum q;
  Complex integral = 0.0;
  for (const auto& e : edges) {
    const double length = std::abs(e.b - e.a);
    const int panels = std::max(1, static_cast<int>(std::lround(total_panels * length / perimeter)));
    const Complex step = (e.b - e.a) / static_cast<double>(panels);
    for (int p = 0; p < panels; ++p) {
      const Complex start = e.a + static_cast<double>(p) * step;
      for (int k = 0; k < kPanelOrder; ++k) {
        const Complex z = start + 0.5 * (1.0 + rule.first[static_cast<std::size_t>(k)]) * step;
        const ZetaValue v = safe_eval(f, z);
        record(q, v);
        integral += 0.5 * rule.second[static_cast<std::size_t>(k)] * step * v.log_derivative;
      }
    }
  }
  q.raw = integral / (2.0 * kPi * kI);
  return q;
}

QuadratureSum integrate(const ZetaEvaluator& f, const Region& region, int n) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return integrate_disk(f, *d, n);
  return integrate_rect(f, std::get<RectRegion>(region), n);
}

bool boundary_suspect(const QuadratureSum& q, double ratio) {
  return !(q.min_abs >= ratio * q.max_abs) || !std::isfinite(q.raw.real()) || !std::isfinite(q.raw.imag());
}

ZeroCount empty_count(const Region& region) {
  ZeroCount out;
  out.region = region;
  return out;
}

double integer_distance(Complex raw) { return std::hypot(raw.real() - std::round(raw.real()), raw.imag()); }

}  // namespace

bool contains(const Region& region, Complex s) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return std::abs(s - d->center) <= d->radius;
  const auto& r = std::get<RectRegion>(region);
  return s.real() >= r.re_min && s.real() <= r.re_max && s.imag() >= r.im_min && s.imag() <= r.im_max;
}

Region dilate(const Region& region, double fraction) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return DiskRegion{d->center, d->radius * (1.0 + fraction)};
  const auto& r = std::get<RectRegion>(region);
  const double hw = 0.5 * (r.re_max - r.re_min) * fraction;
  const double hh = 0.5 * (r.im_max - r.im_min) * fraction;
  return RectRegion{r.re_min - hw, r.re_max + hw, r.im_min - hh, r.im_max + hh};
}

ZeroCount count_zeros(const ZetaEvaluator& f, const Region& region, const ContourOptions& options) {
  if (const auto* r = std::get_if<RectRegion>(&region); r && is_empty(*r)) return empty_count(region);
  if (const auto* d = std::get_if<DiskRegion>(&region); d && !(d->radius > 0.0)) return empty_count(region);
  if (options.nodes < 8) fail(ErrorCode::InvalidArgument, "contour needs at least 8 nodes");

  Region current = region;
  bool dilated = false;
  int n = options.nodes;
  QuadratureSum previous = integrate(f, current, n);
  if (boundary_suspect(previous, options.boundary_ratio)) {
    if (!options.allow_dilation) fail(ErrorCode::BoundaryZeroSuspected, "zero suspected on the contour");
    current = dilate(region, 0.01);
    dilated = true;
    previous = integrate(f, current, n);
    if (boundary_suspect(previous, options.boundary_ratio)) {
      fail(ErrorCode::BoundaryZeroSuspected, "zero suspected on the contour after 1% dilation");
    }
  }
  while (true) {
    const int doubled = 2 * n;
    const QuadratureSum next = integrate(f, current, doubled);
    if (boundary_suspect(next, options.boundary_ratio)) {
      fail(ErrorCode::BoundaryZeroSuspected, "zero suspected on the contour");
    }
    const double dist = integer_distance(next.raw);
    if (std::abs(next.raw - previous.raw) <= options.integer_tolerance && dist <= options.integer_tolerance) {
      ZeroCount out;
      out.count = static_cast<int>(std::lround(next.raw.real()));
      out.raw = next.raw;
      out.integer_distance = dist;
      out.nodes = doubled;
      out.region = current;
      out.dilated = dilated;
      out.boundary_min = std::min(previous.min_abs, next.min_abs);
      out.boundary_max = std::max(previous.max_abs, next.max_abs);
      return out;
    }
    if (doubled >= options.max_nodes) {
      // A zero on (or extremely close to) the contour stalls convergence; a zero exactly on a
      // smooth edge contributes one half.
      if (options.allow_dilation && !dilated) {
        current = dilate(region, 0.01);
        dilated = true;
        n = options.nodes;
        previous = integrate(f, current, n);
        continue;
      }
      if (std::abs(dist - 0.5) < 0.05) {
        fail(ErrorCode::BoundaryZeroSuspected, "winding stalls near a half-integer: " + std::to_string(next.raw.real()));
      }
      fail(ErrorCode::NonIntegerWinding, "winding number did not settle: " + std::to_string(next.raw.real()) + " + " +
                                             std::to_string(next.raw.imag()) + "i");
    }
    previous = next;
    n = doubled;
  }
}

// ---------------------------------------------------------------------------
// Phase tracking

namespace {

// A piece of a closed contour: z(t) for t in [0, 1].
struct PathPiece {
  std::function<Complex(double)> z;
  double length = 0.0;
};

PathPiece line(Complex a, Complex b) {
  return {[a, b](double t) { return a + (b - a) * t; }, std::abs(b - a)};
}

PathPiece arc(Complex center, double radius, double from, double to) {
  return {[=](double t) { return center + radius * std::exp(kI * (from + (to - from) * t)); },
          radius * std::abs(to - from)};
}

struct PhaseTracker {
  const ValueEvaluator& f;
  const ArgumentOptions& options;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  double min_dip = std::numeric_limits<double>::infinity();  // smallest |f(mid)| / max(|f(a)|, |f(b)|) seen
  int evaluations = 0;

  Complex eval(Complex z) {
    const Complex v = f(z);
    ++evaluations;
    const double m = std::abs(v);
    min_abs = std::min(min_abs, m);
    max_abs = std::max(max_abs, m);
    if (m == 0.0 || !std::isfinite(m)) fail(ErrorCode::BoundaryZeroSuspected, "zero hit on the contour");
    return v;
  }

  bool small(Complex fa, Complex fb) const {
    const Complex ratio = fb / fa;
    return std::abs(std::arg(ratio)) <= options.max_phase_step &&
           std::abs(std::log(std::abs(ratio))) <= options.max_log_modulus_step;
  }

  double accumulate(const PathPiece& piece, double ta, Complex fa, double tb, Complex fb, int depth) {
    const double tm = 0.5 * (ta + tb);
    const Complex fm = eval(piece.z(tm));
    min_dip = std::min(min_dip, std::abs(fm) / std::max(std::abs(fa), std::abs(fb)));
    // A step is accepted only when both halves are small too and add up to the whole; this
    // catches a full turn of the phase hiding between two samples.
    const double whole = std::arg(fb / fa);
    const double left = std::arg(fm / fa);
    const double right = std::arg(fb / fm);
    if (small(fa, fb) && small(fa, fm) && small(fm, fb) && std::abs(left + right - whole) < 1e-9) return whole;
    if (depth >= options.max_bisections) fail(ErrorCode::BoundaryZeroSuspected, "phase does not resolve on the contour");
    return accumulate(piece, ta, fa, tm, fm, depth + 1) + accumulate(piece, tm, fm, tb, fb, depth + 1);
  }

  // Total change of arg f along consecutive pieces (each piece starts where the last ended).
  double track(const std::vector<PathPiece>& path) {
    double total_length = 0.0;
    for (const auto& p : path) total_length += p.length;
    double phase = 0.0;
    Complex f_prev = eval(path.front().z(0.0));
    for (const auto& p : path) {
      const int pieces = std::max(2, static_cast<int>(std::ceil(options.initial_nodes * p.length / total_length)));
      double t_prev = 0.0;
      for (int k = 1; k <= pieces; ++k) {
        const double t = static_cast<double>(k) / pieces;
        const Complex fz = eval(p.z(t));
        phase += accumulate(p, t_prev, f_prev, t, fz, 0);
        t_prev = t;
        f_prev = fz;
      }
    }
    return phase;
  }
};

// Full boundary, or the upper half from the right real point to the left one.
std::vector<PathPiece> boundary_path(const Region& region, bool upper_half) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) {
    return {arc(d->center, d->radius, 0.0, upper_half ? kPi : 2.0 * kPi)};
  }
  const auto& r = std::get<RectRegion>(region);
  if (upper_half) {
    const Complex right_axis(r.re_max, 0.0), right_top(r.re_max, r.im_max), left_top(r.re_min, r.im_max),
        left_axis(r.re_min, 0.0);
    return {line(right_axis, right_top), line(right_top, left_top), line(left_top, left_axis)};
  }
  std::vector<PathPiece> out;
  for (const auto& e : rect_edges(r)) out.push_back(line(e.a, e.b));
  return out;
}

bool symmetric_about_real_axis(const Region& region) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return std::abs(d->center.imag()) <= 1e-12 * (1.0 + d->radius);
  const auto& r = std::get<RectRegion>(region);
  return std::abs(r.im_min + r.im_max) <= 1e-12 * (1.0 + std::abs(r.im_max));
}

bool region_is_empty(const Region& region) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) return !(d->radius > 0.0);
  return is_empty(std::get<RectRegion>(region));
}

}  // namespace

ZeroCount count_zeros_by_argument(const ValueEvaluator& f, const Region& region, const ArgumentOptions& options) {
  if (region_is_empty(region)) return empty_count(region);
  if (options.conjugate_symmetric && !symmetric_about_real_axis(region)) {
    fail(ErrorCode::InvalidArgument, "conjugate-symmetric counting needs a region symmetric about the real axis");
  }
  auto track_once = [&](const Region& r, int nodes) {
    ArgumentOptions o = options;
    o.initial_nodes = nodes;
    PhaseTracker tracker{f, o};
    const double winding = options.conjugate_symmetric ? 2.0 * tracker.track(boundary_path(r, true)) / (2.0 * kPi)
                                                       : tracker.track(boundary_path(r, false)) / (2.0 * kPi);
    ZeroCount out;
    out.count = static_cast<int>(std::lround(winding));
    out.raw = winding;
    out.integer_distance = std::abs(winding - out.count);
    out.nodes = tracker.evaluations;
    out.region = r;
    out.boundary_min = tracker.min_abs;
    out.boundary_max = tracker.max_abs;
    return std::pair{out, tracker.min_dip};
  };
  auto attempt = [&](const Region& r) {
    auto result = track_once(r, options.initial_nodes);
    if (!options.confirm_by_doubling) return result;
    int nodes = options.initial_nodes;
    for (int k = 0; k < options.max_doublings; ++k) {
      nodes *= 2;
      auto finer = track_once(r, nodes);
      finer.first.nodes += result.first.nodes;
      finer.second = std::min(finer.second, result.second);
      const bool agree = finer.first.count == result.first.count;
      result = finer;
      if (agree) return result;
    }
    fail(ErrorCode::NonIntegerWinding, "phase-tracked winding does not settle under node doubling");
  };
  // Growth alone can spread |f| over many orders of magnitude along a contour, so only a local
  // dip between neighbouring samples counts as a zero near the contour.
  auto suspicious = [&](const std::pair<ZeroCount, double>& c) { return c.second < options.boundary_ratio; };

  try {
    const auto first = attempt(region);
    if (!suspicious(first)) return first.first;
    if (!options.allow_dilation) fail(ErrorCode::BoundaryZeroSuspected, "zero suspected on the contour");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BoundaryZeroSuspected || !options.allow_dilation) throw;
  }
  const auto second = attempt(dilate(region, 0.01));
  if (suspicious(second)) fail(ErrorCode::BoundaryZeroSuspected, "zero suspected on the contour after 1% dilation");
  ZeroCount out = second.first;
  out.dilated = true;
  return out;
}

// ---------------------------------------------------------------------------
// Localization

namespace {

bool meets(const RectRegion& cell, const DiskRegion& disk) {
  const double x = std::clamp(disk.center.real(), cell.re_min, cell.re_max);
  const double y = std::clamp(disk.center.imag(), cell.im_min, cell.im_max);
  return std::abs(Complex(x, y) - disk.center) <= disk.radius;
}

class Locator {
 public:
  Locator(const AnalyticFunction& f, const LocateOptions& options, double scale, double root_size,
          std::optional<DiskRegion> focus = std::nullopt)
      : f_(f), options_(options), scale_(scale), root_size_(root_size), focus_(focus) {}

  std::vector<LocatedZero> zeros;

  void process(const RectRegion& cell, int count, int depth) {
    if (count == 0) return;
    const Complex center(0.5 * (cell.re_min + cell.re_max), 0.5 * (cell.im_min + cell.im_max));
    const double size = std::max(cell.re_max - cell.re_min, cell.im_max - cell.im_min);
    if (focus_ && !meets(cell, *focus_)) return;
    // Newton for a multiple zero only pays off once the cell is small.
    if (count > 1 && size > root_size_ / 64.0) {
      if (depth >= options_.max_depth) fail(ErrorCode::MaxDepthExceeded, "subdivision depth exceeded");
      split(cell, count, depth);
      return;
    }
    if (auto z = newton(center, count, cell, size)) {
      if (count == 1 || confirms_multiple(z->s, count, size)) {
        zeros.push_back(*z);
        return;
      }
    }
    if (depth >= options_.max_depth) {
      if (count == 1) fail(ErrorCode::NewtonDiverged, "Newton iteration failed in a single-zero cell");
      fail(ErrorCode::MaxDepthExceeded, "subdivision depth exceeded");
    }
    split(cell, count, depth);
  }

 private:
  std::optional<LocatedZero> newton(Complex start, int multiplicity, const RectRegion& cell, double size) {
    Complex s = start;
    const double slack = 1e-9 * size;
    for (int iter = 0; iter < options_.newton_iterations; ++iter) {
      ZetaValue v;
      try {
        v = f_.with_log_derivative(s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        return finish(s, multiplicity, 0.0, cell, slack);
      }
      if (!std::isfinite(v.log_derivative.real()) || v.log_derivative == Complex(0.0)) return std::nullopt;
      const Complex step = static_cast<double>(multiplicity) / v.log_derivative;
      const Complex next = s - step;
      if (std::abs(next - start) > 2.0 * size) return std::nullopt;
      if (std::abs(step) < options_.tol) return finish(next, multiplicity, std::abs(v.value), cell, slack);
      s = next;
    }
    return std::nullopt;
  }

  std::optional<LocatedZero> finish(Complex s, int multiplicity, double value, const RectRegion& cell, double slack) {
    if (s.real() < cell.re_min - slack || s.real() > cell.re_max + slack || s.imag() < cell.im_min - slack ||
        s.imag() > cell.im_max + slack) {
      return std::nullopt;
    }
    return LocatedZero{s, multiplicity, value / scale_};
  }

  bool confirms_multiple(Complex z, int count, double size) {
    const double h = 1e-3 * size;
    try {
      return count_cell({z.real() - h, z.real() + h, z.imag() - h, z.imag() + h}, options_.cell_nodes) == count;
    } catch (const Error&) {
      return false;
    }
  }

  int count_cell(const RectRegion& cell, int nodes) {
    ArgumentOptions o = options_.cells;
    o.initial_nodes = nodes;
    o.allow_dilation = false;
    o.conjugate_symmetric = false;
    o.confirm_by_doubling = false;
    return count_zeros_by_argument(f_.value, cell, o).count;
  }

  // Quadrisection whose child counts add up to the parent's. Fast phase rotation can alias
  // at coarse sampling, in the parent as well as in the children, so an inconsistent split
  // is retried with more nodes and the parent is recounted at the same resolution.
  void split(const RectRegion& cell, int count, int depth) {
    static constexpr double kOffsets[] = {0.5, 0.4631, 0.5417, 0.4213, 0.5873};
    for (int nodes = options_.cell_nodes; nodes <= 16 * options_.cell_nodes; nodes *= 4) {
      if (nodes > options_.cell_nodes) {
        try {
          count = count_cell(cell, nodes);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BoundaryZeroSuspected && e.code() != ErrorCode::NonIntegerWinding) throw;
        }
      }
      for (const double fx : kOffsets) {
        const double fy = 1.0 - fx;
        const double xm = cell.re_min + fx * (cell.re_max - cell.re_min);
        const double ym = cell.im_min + fy * (cell.im_max - cell.im_min);
        const RectRegion children[4] = {{cell.re_min, xm, cell.im_min, ym},
                                        {xm, cell.re_max, cell.im_min, ym},
                                        {cell.re_min, xm, ym, cell.im_max},
                                        {xm, cell.re_max, ym, cell.im_max}};
        int counts[4];
        int sum = 0;
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
          try {
            counts[i] = count_cell(children[i], nodes);
            sum += counts[i];
          } catch (const Error& e) {
            if (e.code() != ErrorCode::BoundaryZeroSuspected && e.code() != ErrorCode::NonIntegerWinding) throw;
            ok = false;
          }
        }
        if (!ok || sum != count) continue;
        for (int i = 0; i < 4; ++i) process(children[i], counts[i], depth + 1);
        return;
      }
    }
    fail(ErrorCode::MaxDepthExceeded, "could not split a cell consistently");
  }

  const AnalyticFunction& f_;
  const LocateOptions& options_;
  double scale_;
  double root_size_;
  std::optional<DiskRegion> focus_;
};

}  // namespace

namespace {

// Winding of the whole region: log-derivative quadrature confirmed by phase tracking, or
// phase tracking alone.
ZeroCount whole_winding(const AnalyticFunction& f, const Region& region, const LocateOptions& options) {
  ArgumentOptions phase = options.cells;
  phase.conjugate_symmetric = false;
  if (options.winding_by_argument) {
    phase.allow_dilation = options.contour.allow_dilation;
    return count_zeros_by_argument(f.value, region, phase);
  }
  const ZeroCount top = count_zeros(f.with_log_derivative, region, options.contour);
  phase.allow_dilation = false;
  if (count_zeros_by_argument(f.value, top.region, phase).count != top.count) {
    fail(ErrorCode::NonIntegerWinding, "phase tracking disagrees with the log-derivative winding");
  }
  return top;
}

}  // namespace

ZeroReport locate_zeros(const AnalyticFunction& f, const Region& region, const LocateOptions& options) {
  ZeroReport report;
  report.region = region;
  if (region_is_empty(region)) return report;
  const ZeroCount top = whole_winding(f, region, options);
  report.region = top.region;
  report.winding = top.count;
  if (top.count == 0) return report;

  if (const auto* disk = std::get_if<DiskRegion>(&top.region)) {
    const double h = 1.05 * disk->radius;
    const RectRegion box{disk->center.real() - h, disk->center.real() + h, disk->center.imag() - h,
                         disk->center.imag() + h};
    const ZeroCount box_count = whole_winding(f, box, options);
    const RectRegion& cell = std::get<RectRegion>(box_count.region);
    Locator locator(f, options, std::max(box_count.boundary_max, 1e-300),
                    std::max(cell.re_max - cell.re_min, cell.im_max - cell.im_min), *disk);
    locator.process(cell, box_count.count, 0);
    ZeroReport inner;
    inner.zeros = std::move(locator.zeros);
    int total = 0;
    for (const auto& z : inner.zeros) {
      if (std::abs(z.s - disk->center) <= disk->radius) {
        report.zeros.push_back(z);
        total += z.multiplicity;
      }
    }
    if (total != report.winding) {
      fail(ErrorCode::BoundaryZeroSuspected, "zeros found in the bounding box do not match the disk winding");
    }
    return report;
  }

  const RectRegion& rect = std::get<RectRegion>(top.region);
  Locator locator(f, options, std::max(top.boundary_max, 1e-300),
                  std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min));
  locator.process(rect, top.count, 0);
  report.zeros = std::move(locator.zeros);
  std::sort(report.zeros.begin(), report.zeros.end(), [](const LocatedZero& a, const LocatedZero& b) {
    return a.s.real() != b.s.real() ? a.s.real() < b.s.real() : a.s.imag() < b.s.imag();
  });
  return report;
}

// ---------------------------------------------------------------------------
// Serialization and Jensen terms

nlohmann::json region_to_json(const Region& region) {
  if (const auto* d = std::get_if<DiskRegion>(&region)) {
    return {{"type", "disk"}, {"center", {d->center.real(), d->center.imag()}}, {"radius", d->radius}};
  }
  const auto& r = std::get<RectRegion>(region);
  return {{"type", "rect"}, {"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max}};
}

Region region_from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "disk") {
      const auto c = j.at("center").get<std::vector<double>>();
      if (c.size() != 2) fail(ErrorCode::InvalidArgument, "disk center must be [re, im]");
      return DiskRegion{Complex(c[0], c[1]), j.at("radius").get<double>()};
    }
    if (type == "rect") {
      return RectRegion{j.at("re_min").get<double>(), j.at("re_max").get<double>(), j.at("im_min").get<double>(),
                        j.at("im_max").get<double>()};
    }
    fail(ErrorCode::InvalidArgument, "unknown region type " + type);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed region JSON: ") + e.what());
  }
}

nlohmann::json zero_report_to_json(const ZeroReport& report) {
  nlohmann::json zeros = nlohmann::json::array();
  for (const auto& z : report.zeros) {
    zeros.push_back({{"re", z.s.real()}, {"im", z.s.imag()}, {"multiplicity", z.multiplicity}, {"residual", z.residual}});
  }
  return {{"region", region_to_json(report.region)}, {"winding", report.winding}, {"zeros", zeros}};
}

double jensen_boundary_term(const ValueEvaluator& f, Complex center, double radius, int nodes) {
  double mean = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const Complex v = f(center + radius * std::exp(kI * (2.0 * kPi * j / nodes)));
    if (v == Complex(0.0)) fail(ErrorCode::BoundaryZeroSuspected, "zero on the Jensen circle");
    mean += std::log(std::abs(v));
  }
  const Complex at_center = f(center);
  if (at_center == Complex(0.0)) fail(ErrorCode::InvalidArgument, "Jensen center is a zero");
  return mean / nodes - std::log(std::abs(at_center));
}

double jensen_zero_term(const ZeroReport& report, Complex center, double radius) {
  double total = 0.0;
  for (const auto& z : report.zeros) total += z.multiplicity * std::log(radius / std::abs(z.s - center));
  return total;
}

}  // namespace schottky

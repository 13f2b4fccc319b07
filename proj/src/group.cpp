#include "schottky/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"

namespace schottky {

Mat2 Mat2::inverse() const {
  const double det_value = det();
  return {d / det_value, -b / det_value, -c / det_value, a / det_value};
}

double projective_distance(const Mat2& x, const Mat2& y) {
  auto max_abs = [](double p, double q, double r, double s) {
    return std::max({std::abs(p), std::abs(q), std::abs(r), std::abs(s)});
  };
  const double plus = max_abs(x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d);
  const double minus = max_abs(x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d);
  return std::min(plus, minus);
}

MobiusJet mobius_jet(const Mat2& m, Complex z) {
  const Complex denom = m.c * z + m.d;
  if (std::abs(denom) < 1e-14) {
    std::ostringstream os;
    os << "z = " << z << " is the pole of the map";
    fail(ErrorCode::PoleEvaluation, os.str());
  }
  const Complex inv = 1.0 / denom;
  MobiusJet jet;
  jet.value = (m.a * z + m.b) * inv;
  jet.first = m.det() * inv * inv;
  jet.log_second = -2.0 * m.c * inv;
  jet.log_third = 6.0 * m.c * m.c * inv * inv;
  return jet;
}

namespace {

int partner_index(int index, int r) { return (index + r) % (2 * r); }

void check_disk_layout(const std::vector<double>& centers, const std::vector<double>& radii) {
  if (centers.size() != radii.size()) {
    fail(ErrorCode::InvalidGroup, "centers and radii differ in length");
  }
  if (centers.size() < 4 || centers.size() % 2 != 0) {
    fail(ErrorCode::InvalidGroup, "need 2r disks with r >= 2, got " + std::to_string(centers.size()));
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
      fail(ErrorCode::DegenerateRadius, "radius of disk " + std::to_string(i + 1) + " is not positive");
    }
    if (!std::isfinite(centers[i])) {
      fail(ErrorCode::InvalidGroup, "center of disk " + std::to_string(i + 1) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (std::abs(centers[i] - centers[j]) <= radii[i] + radii[j]) {
        std::ostringstream os;
        os << "closed disks " << i + 1 << " and " << j + 1 << " intersect";
        fail(ErrorCode::DisjointnessViolation, os.str());
      }
    }
  }
}

}  // namespace

SchottkyData build_from_disks(const std::vector<double>& centers, const std::vector<double>& radii) {
  check_disk_layout(centers, radii);
  SchottkyData data;
  data.r = static_cast<int>(centers.size() / 2);
  data.centers = centers;
  data.radii = radii;
  data.generators.resize(centers.size());
  for (int i = 0; i < 2 * data.r; ++i) {
    const int j = partner_index(i, data.r);
    const double ca = centers[i], cb = centers[j];
    const double rr = radii[i] * radii[j];
    const double scale = 1.0 / std::sqrt(rr);
    data.generators[i] = {scale * ca, scale * (-ca * cb - rr), scale, -scale * cb};
  }
  return data;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

ValidationReport validate(const SchottkyData& data) {
  ValidationReport report;
  const int size = 2 * data.r;
  const bool shape_ok = data.r >= 2 && static_cast<int>(data.centers.size()) == size &&
                        static_cast<int>(data.radii.size()) == size &&
                        static_cast<int>(data.generators.size()) == size;
  report.checks.push_back({"shape", shape_ok, 0.0, "r >= 2 and 2r disks/generators"});
  if (!shape_ok) return report;

  double min_radius = *std::min_element(data.radii.begin(), data.radii.end());
  report.checks.push_back({"positive_radii", min_radius > 0.0, std::max(0.0, -min_radius), ""});

  double overlap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      overlap = std::max(overlap, data.radii[i] + data.radii[j] - std::abs(data.centers[i] - data.centers[j]));
    }
  }
  report.checks.push_back({"disjoint_disks", overlap < 0.0, std::max(0.0, overlap), ""});

  double det_residual = 0.0;
  for (const auto& g : data.generators) det_residual = std::max(det_residual, std::abs(g.det() - 1.0));
  report.checks.push_back({"unit_determinant", det_residual <= 1e-12, det_residual, ""});

  double inverse_residual = 0.0;
  for (int i = 0; i < size; ++i) {
    const Mat2 product = data.generators[partner_index(i, data.r)] * data.generators[i];
    inverse_residual = std::max(inverse_residual, projective_distance(product, Mat2::identity()));
  }
  report.checks.push_back({"inverse_pairing", inverse_residual <= 1e-10, inverse_residual, ""});

  // Boundary of D_abar must land on the boundary of D_a; a far point must land inside D_a.
  double boundary_residual = 0.0;
  double exterior_excess = -std::numeric_limits<double>::infinity();
  double extent = 0.0;
  for (int i = 0; i < size; ++i) extent = std::max(extent, std::abs(data.centers[i]) + data.radii[i]);
  const Complex outside(0.0, extent + 1.0);
  for (int i = 0; i < size && min_radius > 0.0; ++i) {
    const int j = partner_index(i, data.r);
    for (int k = 0; k < 16; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / 16.0;
      const Complex z = data.centers[j] + data.radii[j] * std::polar(1.0, theta);
      const Mat2& g = data.generators[i];
      const Complex denom = g.c * z + g.d;
      if (std::abs(denom) < 1e-14) {
        boundary_residual = std::max(boundary_residual, 1.0);
        continue;
      }
      const Complex w = g.apply(z);
      boundary_residual = std::max(boundary_residual, std::abs(std::abs(w - data.centers[i]) - data.radii[i]));
    }
    const Mat2& g = data.generators[i];
    if (std::abs(g.c * outside + g.d) < 1e-14) {
      exterior_excess = std::max(exterior_excess, 1.0);
    } else {
      const double dist = std::abs(g.apply(outside) - data.centers[i]);
      exterior_excess = std::max(exterior_excess, dist - data.radii[i]);
    }
  }
  report.checks.push_back({"boundary_pairing", boundary_residual <= 1e-8, boundary_residual, "16 samples per circle"});
  report.checks.push_back({"exterior_to_disk", exterior_excess < 0.0, std::max(0.0, exterior_excess), ""});
  return report;
}

SchottkyData group_from_json(const nlohmann::json& j) {
  try {
    const auto centers = j.at("centers").get<std::vector<double>>();
    const auto radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("r") && j.at("r").get<int>() * 2 != static_cast<int>(centers.size())) {
      fail(ErrorCode::InvalidGroup, "field r does not match the number of disks");
    }
    if (!j.contains("generators") || j.at("generators").is_null()) {
      return build_from_disks(centers, radii);
    }
    SchottkyData data;
    data.r = static_cast<int>(centers.size() / 2);
    data.centers = centers;
    data.radii = radii;
    for (const auto& m : j.at("generators")) {
      const auto rows = m.get<std::vector<std::vector<double>>>();
      if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
        fail(ErrorCode::InvalidGroup, "generator is not a 2x2 matrix");
      }
      data.generators.push_back({rows[0][0], rows[0][1], rows[1][0], rows[1][1]});
    }
    return data;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidGroup, std::string("malformed group JSON: ") + e.what());
  }
}

nlohmann::json group_to_json(const SchottkyData& data) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : data.generators) gens.push_back({{g.a, g.b}, {g.c, g.d}});
  return {{"r", data.r}, {"centers", data.centers}, {"radii", data.radii}, {"generators", gens}};
}

SchottkyData load_group(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open group file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidGroup, std::string("cannot parse ") + path + ": " + e.what());
  }
  return group_from_json(j);
}

SchottkyData reference_group() { return build_from_disks({-3.0, -1.0, 1.0, 3.0}, {0.5, 0.5, 0.5, 0.5}); }

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorCode::DegenerateRadius: return "DegenerateRadius";
    case ErrorCode::LetterOutOfRange: return "LetterOutOfRange";
    case ErrorCode::TauNonPositive: return "TauNonPositive";
    case ErrorCode::MismatchedTerminalLetter: return "MismatchedTerminalLetter";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::ExhaustiveTooLarge: return "ExhaustiveTooLarge";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::OutsideDisk: return "OutsideDisk";
    case ErrorCode::ConvergenceRegionViolated: return "ConvergenceRegionViolated";
    case ErrorCode::InvalidGroup: return "InvalidGroup";
    case ErrorCode::Io: return "Io";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::BranchCutHit: return "BranchCutHit";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::BoundaryZeroSuspected: return "BoundaryZeroSuspected";
    case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
    case ErrorCode::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PerronViolation: return "PerronViolation";
    case ErrorCode::NoSignChange: return "NoSignChange";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PoleEvaluation:
    case ErrorCode::DepthExceeded:
    case ErrorCode::BranchCutHit:
    case ErrorCode::DegreeTooSmall:
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::SingularMatrix:
    case ErrorCode::BoundaryZeroSuspected:
    case ErrorCode::NonIntegerWinding:
    case ErrorCode::MaxDepthExceeded:
    case ErrorCode::NewtonDiverged:
    case ErrorCode::PerronViolation:
    case ErrorCode::NoSignChange:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Validation;
  }
}

}  // namespace schottky

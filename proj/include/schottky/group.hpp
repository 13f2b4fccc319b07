#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace schottky {

using Complex = std::complex<double>;

/// Real 2x2 matrix acting on the Riemann sphere by Moebius transformations.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  /// Exact inverse (not the adjugate): det * inverse() == adjugate.
  Mat2 inverse() const;
  Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
};

/// Max-abs distance between x and +y or -y, whichever is smaller (PSL(2,R) equality).
double projective_distance(const Mat2& x, const Mat2& y);

/// Value and derivative data of a Moebius map at a point.
struct MobiusJet {
  Complex value;
  Complex first;       // g'(z)
  Complex log_second;  // g''(z) / g'(z)
  Complex log_third;   // g'''(z) / g'(z)
};

/// Throws PoleEvaluation when |cz + d| < 1e-14.
MobiusJet mobius_jet(const Mat2& m, Complex z);

/// Disks D_a (real centers), their pairing and SL(2,R) generators.
///
/// Letters are 1-based, a in {1..2r}; the partner of a is a + r mod 2r.
/// Vectors are indexed by a - 1.
struct SchottkyData {
  int r = 0;
  std::vector<double> centers;
  std::vector<double> radii;
  std::vector<Mat2> generators;

  int alphabet_size() const { return 2 * r; }
  double center(int letter) const { return centers[letter - 1]; }
  double radius(int letter) const { return radii[letter - 1]; }
  const Mat2& generator(int letter) const { return generators[letter - 1]; }
};

/// gamma_a = (r_a r_abar)^{-1/2} [[c_a, -c_a c_abar - r_a r_abar], [1, -c_abar]].
///
/// Throws DegenerateRadius, DisjointnessViolation, InvalidGroup (r < 2 or odd count).
SchottkyData build_from_disks(const std::vector<double>& centers, const std::vector<double>& radii);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  /// Names of the failing checks, comma separated.
  std::string failures() const;
};

ValidationReport validate(const SchottkyData& data);

/// Parses {"r":..,"centers":[..],"radii":[..],"generators":[[[a,b],[c,d]],..]}.
/// Generators are optional; when absent the disk builder is applied.
SchottkyData group_from_json(const nlohmann::json& j);
nlohmann::json group_to_json(const SchottkyData& data);
SchottkyData load_group(const std::string& path);

/// r = 2, centers (-3, -1, 1, 3), radii 0.5.
SchottkyData reference_group();

}  // namespace schottky

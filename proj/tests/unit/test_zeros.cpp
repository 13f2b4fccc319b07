#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/zeros.hpp"

using namespace schottky;

namespace {

constexpr double kDelta = 0.310383063228502;

/// Polynomial with prescribed roots (repeated for multiplicity) as an analytic function.
AnalyticFunction polynomial(std::vector<Complex> roots) {
  auto value = [roots](Complex s) {
    Complex v = 1.0;
    for (const Complex r : roots) v *= s - r;
    return v;
  };
  auto both = [roots, value](Complex s) {
    Complex d = 0.0;
    for (const Complex r : roots) d += 1.0 / (s - r);
    return ZetaValue{value(s), d};
  };
  return {value, both};
}

int roots_inside(const std::vector<Complex>& roots, const Region& region) {
  int count = 0;
  for (const Complex r : roots) count += contains(region, r);
  return count;
}

AssembleOptions degree(int M) {
  AssembleOptions o;
  o.M = M;
  return o;
}

}  // namespace

TEST_CASE("argument principle on polynomials") {
  const std::vector<Complex> roots{{0.3, 0.2}, {-0.4, 0.1}, {-0.4, 0.1}, {1.5, -0.7}, {0.1, -0.35}};
  const AnalyticFunction f = polynomial(roots);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double x0 = u(rng), y0 = u(rng);
    const RectRegion rect{x0 - 0.6, x0 + 0.6 + 0.3 * std::abs(u(rng)), y0 - 0.5, y0 + 0.5};
    const DiskRegion disk{Complex(x0, y0), 0.4 + 0.5 * std::abs(u(rng))};
    for (const Region& region : {Region(rect), Region(disk)}) {
      const ZeroCount c = count_zeros(f.with_log_derivative, region);
      const ZeroCount p = count_zeros_by_argument(f.value, region);
      const int expected = roots_inside(roots, c.region);
      CHECK(c.count == expected);
      CHECK(c.integer_distance < 1e-3);
      CHECK(p.count == roots_inside(roots, p.region));
    }
  }
}

TEST_CASE("locating polynomial roots with multiplicity") {
  const std::vector<Complex> roots{{0.3, 0.2}, {-0.4, 0.1}, {-0.4, 0.1}, {0.1, -0.35}};
  const AnalyticFunction f = polynomial(roots);
  const ZeroReport report = locate_zeros(f, RectRegion{-1.03, 1.01, -0.97, 1.02});
  CHECK(report.winding == 4);
  REQUIRE(report.zeros.size() == 3);
  int total = 0;
  for (const auto& z : report.zeros) {
    total += z.multiplicity;
    double nearest = 1e9;
    for (const Complex r : roots) nearest = std::min(nearest, std::abs(z.s - r));
    CHECK(nearest < 1e-8);
    if (std::abs(z.s - Complex(-0.4, 0.1)) < 1e-6) CHECK(z.multiplicity == 2);
  }
  CHECK(total == report.winding);
  const ZeroReport none = locate_zeros(f, DiskRegion{Complex(3.0, 3.0), 0.5});
  CHECK(none.winding == 0);
  CHECK(none.zeros.empty());
}

TEST_CASE("boundary zeros are detected") {
  const AnalyticFunction f = polynomial({{0.5, 0.0}});
  ContourOptions strict;
  strict.allow_dilation = false;
  try {
    count_zeros(f.with_log_derivative, RectRegion{0.5, 1.0, -0.5, 0.5}, strict);
    FAIL("expected BoundaryZeroSuspected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryZeroSuspected);
  }
  const ZeroCount dilated = count_zeros(f.with_log_derivative, RectRegion{0.5, 1.0, -0.5, 0.5});
  CHECK(dilated.dilated);
  CHECK(dilated.count == 1);
}

TEST_CASE("conjugate-symmetric phase tracking") {
  const AnalyticFunction f = polynomial({{0.2, 0.5}, {0.2, -0.5}, {0.6, 0.0}, {2.0, 1.0}, {2.0, -1.0}});
  ArgumentOptions symmetric;
  symmetric.conjugate_symmetric = true;
  CHECK(count_zeros_by_argument(f.value, RectRegion{0.0, 1.0, -1.0, 1.0}, symmetric).count == 3);
  CHECK(count_zeros_by_argument(f.value, DiskRegion{Complex(1.0, 0.0), 1.5}, symmetric).count == 5);
}

TEST_CASE("Jensen terms on a polynomial") {
  const std::vector<Complex> roots{{0.3, 0.2}, {-0.2, -0.1}};
  const AnalyticFunction f = polynomial(roots);
  const Complex b(0.1, 0.0);
  const double R = 0.8;
  const ZeroReport report = locate_zeros(f, DiskRegion{b, R});
  double exact = 0.0;
  for (const Complex r : roots) exact += std::log(R / std::abs(r - b));
  CHECK(jensen_zero_term(report, b, R) == doctest::Approx(exact).epsilon(1e-9));
  CHECK(jensen_boundary_term(f.value, b, R) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("zero reports serialize") {
  const AnalyticFunction f = polynomial({{0.3, 0.2}});
  const nlohmann::json j = zero_report_to_json(locate_zeros(f, RectRegion{0.0, 1.0, 0.0, 1.0}));
  CHECK(j.at("winding") == 1);
  CHECK(j.at("zeros").at(0).at("re").get<double>() == doctest::Approx(0.3));
  CHECK(j.at("zeros").at(0).at("im").get<double>() == doctest::Approx(0.2));
  CHECK(j.at("zeros").at(0).at("multiplicity") == 1);
  const Region back = region_from_json(j.at("region"));
  REQUIRE(std::holds_alternative<RectRegion>(back));
  CHECK(std::get<RectRegion>(back).re_max == 1.0);
  const Region disk = region_from_json(region_to_json(DiskRegion{Complex(1.0, -2.0), 0.5}));
  CHECK(std::get<DiskRegion>(disk).center == Complex(1.0, -2.0));
}

TEST_CASE("zeros of the reference zeta") {
  const SchottkyData g = reference_group();
  const ZetaFunction trivial(g, ZetaKind::standard(), Representation::trivial(), degree(16));
  SUBCASE("nothing to the right of delta") {
    CHECK(count_zeros(trivial.evaluator(), RectRegion{kDelta + 1.0, kDelta + 2.0, -1.0, 1.0}).count == 0);
  }
  SUBCASE("simple bass zero") {
    CHECK(count_zeros(trivial.evaluator(), DiskRegion{Complex(kDelta, 0.0), 0.05}).count == 1);
  }
  SUBCASE("identity cover has n copies of the bass zero") {
    const ZetaFunction copies(g, ZetaKind::standard(), Representation::standard(identity_rep(2, 2)), degree(16));
    CHECK(count_zeros(copies.evaluator(), DiskRegion{Complex(kDelta, 0.0), 0.05}).count == 2);
    const ZeroReport r = locate_zeros(copies.analytic(), DiskRegion{Complex(kDelta, 0.0), 0.05});
    REQUIRE(r.zeros.size() == 1);
    CHECK(r.zeros[0].multiplicity == 2);
    CHECK(std::abs(r.zeros[0].s - kDelta) < 1e-6);
  }
  SUBCASE("located zeros match counts and are small") {
    const RectRegion rect{0.12, 0.35, -2.0, 2.0};
    const ZeroReport r = locate_zeros(trivial.analytic(), rect);
    int total = 0;
    for (const auto& z : r.zeros) {
      total += z.multiplicity;
      CHECK(contains(rect, z.s));
      CHECK(z.residual <= 1e-8);
    }
    CHECK(total == r.winding);
    CHECK(total == count_zeros_by_argument(trivial.value_evaluator(), rect).count);
    CHECK(total == 5);
  }
}

TEST_CASE("phase tracking survives whole turns between samples") {
  // e^{i w s} - c has a row of zeros on Im s = 1/2 spaced 2 pi / w apart. With 16 initial nodes
  // on the unit square each half step of the bottom edge turns the phase by exactly 2 pi.
  const double w = 16.0 * std::numbers::pi;
  const Complex c = std::exp(-0.5 * w);
  const Complex i(0.0, 1.0);
  const ValueEvaluator f = [&](Complex s) { return std::exp(i * w * s) - c; };
  const RectRegion rect{0.01, 1.01, 0.0, 1.0};
  ArgumentOptions coarse;
  coarse.initial_nodes = 16;
  const ZeroCount n = count_zeros_by_argument(f, rect, coarse);
  CHECK(n.count == 8);
  coarse.confirm_by_doubling = false;
  CHECK(count_zeros_by_argument(f, rect, coarse).count != 8);
}

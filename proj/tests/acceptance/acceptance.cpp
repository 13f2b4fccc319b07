// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/experiments.hpp"
#include "schottky/permrep.hpp"
#include "schottky/random.hpp"
#include "schottky/words.hpp"
#include "schottky/zeros.hpp"
#include "schottky/zeta.hpp"

#ifndef SCHOTTKY_DATA_DIR
#define SCHOTTKY_DATA_DIR "data"
#endif

using namespace schottky;

namespace {

constexpr int kM = 24;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

nlohmann::json read_json(const std::string& name) {
  std::ifstream in(std::string(SCHOTTKY_DATA_DIR) + "/" + name);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + name);
  return nlohmann::json::parse(in);
}

AssembleOptions degree(int M) {
  AssembleOptions o;
  o.M = M;
  return o;
}

const SchottkyData& group() {
  static const SchottkyData g = reference_group();
  return g;
}

double delta() {
  static const double d = hausdorff_dimension(group(), 1e-13, kM).delta;
  return d;
}

Word power_of(const Word& root, int q, int r) {
  Word out;
  for (int k = 0; k < q; ++k) out = multiply_reduced(out, root, r);
  return out;
}

Word random_word(std::mt19937_64& rng, int r, int length) {
  std::uniform_int_distribution<int> letter(1, 2 * r);
  Word w;
  while (static_cast<int>(w.size()) < length) {
    const int a = letter(rng);
    if (!w.empty() && a == bar(w.back(), r)) continue;
    w.push_back(a);
  }
  return w;
}

// 1
Outcome bergman_oracle() {
  const SchottkyData& g = group();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const int disk = 1 + pair % g.alphabet_size();
    const double r = g.radius(disk);
    auto point = [&] {
      return Complex(g.center(disk), 0.0) + 0.5 * r * std::sqrt(u(rng)) * std::polar(1.0, 2 * std::numbers::pi * u(rng));
    };
    const Complex x1 = point(), x2 = point();
    Complex sum = 0.0;
    for (int m = 0; m <= 60; ++m) sum += bergman_basis(g, disk, m, x1) * std::conj(bergman_basis(g, disk, m, x2));
    worst = std::max(worst, std::abs(sum - bergman_kernel(disk, x1, x2, g)));
  }
  return {worst <= 1e-8, fmt("max |partial sum - closed form| = %.2e over 100 pairs", worst)};
}

// 2
Outcome determinant_vs_euler() {
  const ZetaFunction det(group(), ZetaKind::standard(), Representation::trivial(), degree(kM));
  double worst = 0.0;
  for (double x : {0.5, 1.0, 2.0}) {
    const Complex s = delta() + x;
    worst = std::max(worst, std::abs(det.evaluate(s) - euler_product_zeta(s, group(), 14)));
  }
  return {worst <= 1e-4, fmt("max |det - Euler| = %.2e at delta + {0.5, 1, 2}", worst)};
}

// 3
Outcome dimension_consistency() {
  const double d = delta();
  const double p = pressure(d, group(), kM);
  const ZetaFunction z(group(), ZetaKind::standard(), Representation::trivial(), degree(kM));
  LocateOptions lo;
  lo.tol = 1e-12;
  const ZeroReport bass = locate_zeros(z.analytic(), DiskRegion{Complex(d, 0.0), 0.05}, lo);
  const double gap = bass.zeros.size() == 1 ? std::abs(bass.zeros[0].s - d) : 1.0;
  const double p0 = std::abs(pressure(0.0, group(), kM) - std::log(3.0));
  return {std::abs(p) < 1e-8 && gap <= 1e-6 && p0 <= 1e-10,
          fmt("delta = %.15f, |P(delta)| = %.1e, |bass zero - delta| = %.1e, |P(0) - log 3| = %.1e", d, std::abs(p),
              gap, p0)};
}

// 4
Outcome factorization() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> re(0.2, 1.5), im(-5.0, 5.0);
  std::vector<Complex> samples;
  for (int i = 0; i < 10; ++i) samples.emplace_back(re(rng), im(rng));
  double worst = 0.0, worst_identity = 0.0;
  const ZetaFunction trivial(group(), ZetaKind::standard(), Representation::trivial(), degree(kM));
  for (int n : {2, 4, 8}) {
    for (int k = 0; k < 5; ++k)
      worst = std::max(worst, factorization_residual(sample_rep(n, 2, derive_seed(404, n, k)), samples, group(), kM));
    const ZetaFunction copies(group(), ZetaKind::standard(), Representation::standard(identity_rep(n, 2)), degree(kM));
    for (const Complex s : samples) {
      const Complex lhs = copies.evaluate(s);
      worst_identity =
          std::max(worst_identity, std::abs(lhs - std::pow(trivial.evaluate(s), n)) / std::max(1.0, std::abs(lhs)));
    }
  }
  return {worst <= 1e-8 && worst_identity <= 1e-8,
          fmt("max factorization residual %.1e; identity rep vs trivial^n %.1e", worst, worst_identity)};
}

// 5
Outcome argument_principle() {
  const ZetaFunction z(group(), ZetaKind::standard(), Representation::trivial(), degree(kM));
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_distance = 0.0;
  int mismatches = 0, total_zeros = 0;
  for (int i = 0; i < 20; ++i) {
    Region region;
    if (i % 2 == 0) {
      const double x0 = 0.06 + 0.3 * u(rng), y0 = -3.0 + 6.0 * u(rng);
      region = RectRegion{x0, x0 + 0.15 + 0.5 * u(rng), y0, y0 + 0.5 + 1.5 * u(rng)};
    } else {
      const double radius = 0.2 + 0.4 * u(rng);
      region = DiskRegion{Complex(0.07 + radius + 0.3 * u(rng), -3.0 + 6.0 * u(rng)), radius};
    }
    const ZeroCount c = count_zeros(z.evaluator(), region);
    worst_distance = std::max(worst_distance, c.integer_distance);
    const ZeroReport report = locate_zeros(z.analytic(), c.region);
    int sum = 0;
    for (const auto& zero : report.zeros) sum += zero.multiplicity;
    mismatches += sum != c.count || report.winding != c.count;
    total_zeros += c.count;
  }
  const double d = delta();
  const int right = count_zeros(z.evaluator(), RectRegion{d + 0.1, d + 2.0, -5.0, 5.0}).count;
  return {worst_distance <= 1e-3 && mismatches == 0 && right == 0,
          fmt("20 regions, %g zeros, max integer distance %.1e, %g locate mismatches, right window count %g",
              total_zeros, worst_distance, mismatches, right)};
}

// 6
Outcome free_group_oracle() {
  const int r = 2, cap = 10;
  // Largest q with x = root^q, q >= 2, over all roots whose square is short enough.
  std::map<Word, int> best;
  for (const Word& root : all_reduced_words(r, cap - 1)) {
    if (root.empty()) continue;
    for (int q = 2; q <= cap; ++q) {
      const Word x = power_of(root, q, r);
      if (x.size() > static_cast<std::size_t>(cap)) break;
      int& slot = best[x];
      slot = std::max(slot, q);
    }
  }
  std::size_t checked = 0, wrong = 0;
  for (const Word& x : all_reduced_words(r, cap)) {
    ++checked;
    const auto found = proper_power_decomposition(x, r);
    const auto it = best.find(x);
    if (it == best.end() || x.empty()) {
      wrong += found.has_value();
    } else {
      wrong += !found || found->q != it->second || power_of(found->root, found->q, r) != x;
    }
  }
  return {wrong == 0, fmt("%g reduced words, %g proper powers, %g disagreements", static_cast<double>(checked),
                          static_cast<double>(best.size()), static_cast<double>(wrong))};
}

// 7
Outcome expected_traces() {
  const int r = 2;
  const std::vector<Word> words = all_reduced_words(r, 4);
  int exact_checked = 0, exact_violations = 0, outside_hypothesis = 0;
  for (int n : {5, 6}) {
    std::size_t tuples = 0;
    const auto sums = exhaustive_character_sums(words, n, r, &tuples);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const double t = static_cast<double>(words[i].size());
      if (n <= t * t) {
        ++outside_hypothesis;
        continue;
      }
      ++exact_checked;
      exact_violations += std::abs(static_cast<double>(sums[i]) / static_cast<double>(tuples)) > bsp_bound(words[i], n, r);
    }
  }
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> length(1, 4);  // n = 20 > t^2 needs t <= 4
  int mc_violations = 0;
  double worst_z = -1e9;
  for (int k = 0; k < 20; ++k) {
    const Word x = random_word(rng, r, length(rng));
    const TraceEstimate e = expected_trace(x, 20, r, TraceMode::MonteCarlo, 100000, derive_seed(707, k));
    const double excess = std::abs(e.mean) - bsp_bound(x, 20, r);
    mc_violations += excess > 4.0 * e.standard_error;
    worst_z = std::max(worst_z, excess / std::max(e.standard_error, 1e-300));
  }
  return {exact_violations == 0 && mc_violations == 0,
          fmt("exhaustive: %g (word, n) checks, %g violations (%g outside n > t^2); MC n=20: %g violations",
              exact_checked, exact_violations, outside_hypothesis, mc_violations) +
              fmt(", max (|mean| - bound)/SE = %.2f", worst_z)};
}

// 8
Outcome partition_scaling() {
  std::vector<double> taus;
  for (double e : {2.0, 2.5, 3.0, 3.5}) taus.push_back(std::pow(10.0, -e));
  const PartitionScalingRecord rec = run_partition_scaling(group(), taus);
  const double rel = std::abs(rec.member_exponent - delta()) / delta();
  return {rel <= 0.15, fmt("fitted exponent %.4f vs delta %.4f (relative gap %.1f%%), |Zbar| at 10^-3.5 = %g",
                           rec.member_exponent, delta(), 100 * rel, static_cast<double>(rec.points.back().members))};
}

// 9
Outcome derivative_constants() {
  const EstimatedConstants c8 = estimate_constants(8, group(), delta());
  const EstimatedConstants c10 = estimate_constants(10, group(), delta());
  double drift = 0.0;
  bool finite = true;
  for (auto [a, b] : {std::pair{c8.K0, c10.K0}, std::pair{c8.K2, c10.K2}, std::pair{c8.K3, c10.K3}}) {
    finite = finite && std::isfinite(a) && std::isfinite(b);
    drift = std::max(drift, std::abs(b - a) / a);
  }
  std::size_t members = 0, outside = 0;
  for (const double tau : c10.taus) {
    for (const auto& m : mirror_partition(tau, group())) {
      ++members;
      outside += !(m.upsilon >= tau / c10.K1 && m.upsilon <= c10.K1 * tau);
    }
  }
  return {finite && drift <= 0.10 && outside == 0,
          fmt("K0 %.4f K2 %.4f K3 %.4f at depth 10, max drift 8->10 %.2f%%", c10.K0, c10.K2, c10.K3, 100 * drift) +
              fmt("; K1 = %.4f, %g Zbar members checked, %g outside", c10.K1, static_cast<double>(members),
                  static_cast<double>(outside))};
}

// 10
Outcome jensen() {
  const double d = delta();
  const DiskRegion disk = disk_enclosing_rectangle(d, 0.8 * d, 1.0);
  const ZetaFunction trivial(group(), ZetaKind::standard(), Representation::trivial(), degree(kM));
  const JensenAuditResult a = jensen_audit(trivial, disk);
  // Cover of degree 8: at M = 6 the determinant agrees with M = 16 to ~5e-9 relative on this
  // disk, and each evaluation is ~10x cheaper than at M = 24.
  const ZetaFunction cover(group(), ZetaKind::standard(), Representation::standard(sample_rep(8, 2, 1010)), degree(6));
  const JensenAuditResult b = jensen_audit(cover, disk, 1024, true);
  return {a.residual <= 1e-3 && b.residual <= 1e-3,
          fmt("disk center %.4f radius %.4f; trivial: %g zeros, residual %.1e", disk.center.real(), disk.radius,
              a.zeros.winding, a.residual) +
              fmt("; n=8 cover: %g zeros, residual %.1e", b.zeros.winding, b.residual)};
}

// 11
Outcome pointwise_bound() {
  const PointwiseBoundResult r = pointwise_threshold(group(), 1e-3, Representation::trivial(), 30.0, 10.0, 0.5, 1.0, kM);
  return {r.found && r.threshold <= 30.0, r.found ? fmt("s* = %.1f (bound %.0e on [s*, s*+10])", r.threshold, r.bound)
                                                  : std::string("no s* <= 30 found")};
}

// 12
Outcome gap_trend() {
  const GapExperimentConfig config = gap_config_from_json(read_json("gap.json"));
  const GapExperimentRecord rec = run_gap_experiment(group(), config);
  int failures = 0;
  for (const auto& t : rec.trials) failures += t.new_zero_count < 0;
  int audit_bad = 0;
  for (const auto& a : rec.audits) audit_bad += !(a.counts_match && a.multisets_match);
  std::ostringstream os;
  for (const auto& s : rec.degrees)
    os << " n=" << s.n << ": " << s.with_new_zeros << "/" << s.completed << " (sigma " << fmt("%.3f", s.binomial_sigma)
       << ")";
  return {rec.trend_holds && audit_bad == 0 && failures == 0 && !rec.audits.empty(),
          "fractions with new zeros:" + os.str() +
              fmt("; %g/%g audits consistent; %g failed trials", static_cast<double>(rec.audits.size() - audit_bad),
                  static_cast<double>(rec.audits.size()), failures)};
}

// 13
Outcome hs_decay() {
  const HsDecayRecord rec = run_hs_decay(group(), hs_decay_config_from_json(read_json("hs_decay.json")));
  bool negative = !rec.series.empty();
  std::ostringstream os;
  for (const auto& s : rec.series) {
    negative = negative && s.slope < 0.0;
    os << fmt(" sigma %.4f: slope %.3f", s.sigma, s.slope);
  }
  return {negative, "fitted slope of log E||L||_HS^2 against log n:" + os.str()};
}

// 14
Outcome determinism() {
  GapExperimentConfig gap = gap_config_from_json(read_json("gap_small.json"));
  const GapExperimentRecord g1 = run_gap_experiment(group(), gap, 1);
  const GapExperimentRecord g2 = run_gap_experiment(group(), gap, 2);
  const GapExperimentRecord g3 = run_gap_experiment(group(), gap, 1);
  const bool gap_same = gap_csv(g1, false) == gap_csv(g2, false) && gap_csv(g1, false) == gap_csv(g3, false) &&
                        gap_summary_json(g1).dump() == gap_summary_json(g2).dump();
  HsDecayConfig hs;
  hs.degrees = {4, 8};
  hs.trials = 4;
  hs.M = 8;
  const std::string h1 = hs_decay_csv(run_hs_decay(group(), hs, 1));
  const std::string h2 = hs_decay_csv(run_hs_decay(group(), hs, 2));
  const bool hs_same = h1 == h2 && hs_decay_json(run_hs_decay(group(), hs, 1)).dump() ==
                                       hs_decay_json(run_hs_decay(group(), hs, 2)).dump();
  const bool partition_same = partition_csv(partition(1e-3, group())) == partition_csv(partition(1e-3, group()));
  const bool reps_same = rep_to_json(sample_rep(16, 2, 77)).dump() == rep_to_json(sample_rep(16, 2, 77)).dump();
  return {gap_same && hs_same && partition_same && reps_same,
          std::string("gap CSV/summary across runs and jobs 1/2: ") + (gap_same ? "identical" : "DIFFER") +
              "; HS-decay CSV/JSON: " + (hs_same ? "identical" : "DIFFER") +
              "; partition CSV: " + (partition_same ? "identical" : "DIFFER") +
              "; sampled reps: " + (reps_same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "Bergman kernel oracle", 1, bergman_oracle},
      {2, "determinant vs Euler product", 120, determinant_vs_euler},
      {3, "dimension consistency", 60, dimension_consistency},
      {4, "factorization std = 1 + std0", 300, factorization},
      {5, "argument-principle integrity", 120, argument_principle},
      {6, "free-group proper powers", 60, free_group_oracle},
      {7, "expected-trace bounds", 180, expected_traces},
      {8, "partition scaling", 120, partition_scaling},
      {9, "derivative-lemma constants", 120, derivative_constants},
      {10, "Jensen audit", 180, jensen},
      {11, "pointwise bound", 60, pointwise_bound},
      {12, "gap-experiment trend", 1800, gap_trend},
      {13, "HS-decay trend", 1200, hs_decay},
      {14, "determinism", 0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::string timing = fmt("%.1f s", seconds);
    if (c.budget_s > 0) timing += fmt(seconds <= c.budget_s ? ", budget %.0f s" : ", OVER budget %.0f s", c.budget_s);
    std::printf("%s [%2d] %s: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

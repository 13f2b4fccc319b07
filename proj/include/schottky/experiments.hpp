#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "schottky/zeros.hpp"

namespace schottky {

/// Worker count: explicit value if positive, else SCHOTTKY_JOBS, else hardware concurrency.
int resolve_jobs(int requested);

/// Runs task(i) for i in [0, count) on up to `jobs` threads. Exceptions are rethrown after
/// all workers finish (the first by index).
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

struct GapExperimentConfig {
  std::vector<int> degrees{4, 8, 16};
  int trials = 30;
  double sigma0_fraction = 0.8;
  double H = 1.0;
  int M = 12;
  std::uint64_t seed = 1;
  int contour_nodes = 64;     // initial phase-tracking nodes on the upper half boundary
  double right_margin = 0.05;  // right edge of the counting rectangle is delta + margin
  int audit_trials = 3;        // per degree, trials whose zero multisets are cross-checked
  bool identity_reps = false;  // debug: identity permutations instead of random ones
};

GapExperimentConfig gap_config_from_json(const nlohmann::json& j);
nlohmann::json gap_config_to_json(const GapExperimentConfig& c);

struct GapTrial {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool transitive = false;
  int new_zero_count = -1;  // -1 when the trial failed
  double wall_ms = 0.0;
  std::string error;
};

struct GapAudit {
  int n = 0;
  int trial = 0;
  int cover_count = 0;  // zeros of zeta_std (the cover) in the rectangle
  int base_count = 0;   // zeros of Z_X
  int new_count = 0;    // zeros of zeta_std0
  bool counts_match = false;
  bool multisets_match = false;
  std::string error;
};

struct GapDegreeSummary {
  int n = 0;
  int completed = 0;
  int failures = 0;
  int with_new_zeros = 0;
  double fraction = 0.0;
  double binomial_sigma = 0.0;
  double mean_count = 0.0;
  double transitive_fraction = 0.0;
};

struct GapExperimentRecord {
  GapExperimentConfig config;
  std::string config_hash;
  double delta = 0.0;
  RectRegion rect;
  int base_zero_count = 0;
  std::vector<GapTrial> trials;  // ordered by (n, trial)
  std::vector<GapDegreeSummary> degrees;
  std::vector<GapAudit> audits;
  bool trend_holds = true;  // fraction at the largest n <= fraction at the smallest n + 2 sigma
};

GapExperimentRecord run_gap_experiment(const SchottkyData& g, const GapExperimentConfig& config, int jobs = 0);

/// n,trial,seed,transitive,new_zero_count,wall_ms
std::string gap_csv(const GapExperimentRecord& record, bool include_timing = true);
nlohmann::json gap_summary_json(const GapExperimentRecord& record);

/// Counting rectangle [sigma0_fraction * delta, delta + margin] x [-H, H].
RectRegion gap_rectangle(double delta, const GapExperimentConfig& config);

struct HsDecayConfig {
  std::vector<int> degrees{4, 8, 16, 32};
  std::vector<double> sigma_fractions{0.9};
  double H1 = 1.0;     // imaginary parts sampled on {0, H1/2, H1}
  int t_points = 3;
  int trials = 20;
  int M = 16;
  std::uint64_t seed = 1;
};

HsDecayConfig hs_decay_config_from_json(const nlohmann::json& j);
nlohmann::json hs_decay_config_to_json(const HsDecayConfig& c);

struct HsDecayPoint {
  int n = 0;
  double sigma = 0.0;
  double tau = 0.0;
  std::size_t words = 0;
  double mean_hs_squared = 0.0;
  double standard_error = 0.0;
};

struct HsDecaySeries {
  double sigma = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<HsDecayPoint> points;
};

struct HsDecayRecord {
  HsDecayConfig config;
  double delta = 0.0;
  std::vector<HsDecaySeries> series;
};

/// tau = n^{-2/delta}; mean over trials and t-grid of ||L_{tau,s,rho_n^0}||_HS^2 (truncated).
HsDecayRecord run_hs_decay(const SchottkyData& g, const HsDecayConfig& config, int jobs = 0);
std::string hs_decay_csv(const HsDecayRecord& record);
nlohmann::json hs_decay_json(const HsDecayRecord& record);

struct PartitionScalingPoint {
  double tau = 0.0;
  std::size_t members = 0;
  std::size_t identity_pairs = 0;
  std::size_t power_pairs = 0;
  std::size_t other_pairs = 0;
  std::vector<std::pair<PowerPairKey, std::size_t>> histogram;
};

struct PartitionScalingRecord {
  std::vector<PartitionScalingPoint> points;
  double member_exponent = 0.0;    // slope of log |Z-bar| against log(1/tau)
  double power_exponent = 0.0;     // same for |PowerPairs|
  double identity_exponent = 0.0;  // same for identity-class pairs
};

PartitionScalingRecord run_partition_scaling(const SchottkyData& g, const std::vector<double>& taus,
                                             std::size_t cap = 20000);
nlohmann::json partition_scaling_json(const PartitionScalingRecord& record);

struct JensenAuditResult {
  DiskRegion disk;
  ZeroReport zeros;
  double zero_term = 0.0;      // sum of log(R / |z - b|)
  double boundary_term = 0.0;  // mean of log|f| on the circle minus log|f(b)|
  double residual = 0.0;
};

/// Jensen identity check on a disk for the given zeta function.
JensenAuditResult jensen_audit(const ZetaFunction& zeta, const DiskRegion& disk, int boundary_nodes = 1024,
                               bool winding_by_argument = false);

/// Disk centered at delta + offset on the real axis enclosing [sigma0, delta] x [-H, H].
DiskRegion disk_enclosing_rectangle(double delta, double sigma0, double H, double offset = 0.5);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Hex FNV-1a hash of a string (used for config hashes).
std::string fnv1a_hex(const std::string& text);

}  // namespace schottky

#include "schottky/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/random.hpp"

namespace schottky {

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SCHOTTKY_JOBS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) fail(ErrorCode::InvalidArgument, "degenerate abscissae in line fit");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gap experiment

GapExperimentConfig gap_config_from_json(const nlohmann::json& j) {
  GapExperimentConfig c;
  try {
    c.degrees = get_or(j, "degrees", c.degrees);
    c.trials = get_or(j, "trials", c.trials);
    c.sigma0_fraction = get_or(j, "sigma0_fraction", c.sigma0_fraction);
    c.H = get_or(j, "H", c.H);
    c.M = get_or(j, "M", c.M);
    c.seed = get_or(j, "seed", c.seed);
    c.contour_nodes = get_or(j, "contour_nodes", c.contour_nodes);
    c.right_margin = get_or(j, "right_margin", c.right_margin);
    c.audit_trials = get_or(j, "audit_trials", c.audit_trials);
    c.identity_reps = get_or(j, "identity_reps", c.identity_reps);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed gap config: ") + e.what());
  }
  if (!(c.sigma0_fraction > 0.75 && c.sigma0_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "sigma0_fraction must lie in (3/4, 1)");
  }
  if (c.trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (c.degrees.empty()) fail(ErrorCode::InvalidArgument, "degrees must be non-empty");
  if (!std::is_sorted(c.degrees.begin(), c.degrees.end()) || c.degrees.front() < 1) {
    fail(ErrorCode::InvalidArgument, "degrees must be positive and sorted ascending");
  }
  if (!(c.H > 0.0)) fail(ErrorCode::InvalidArgument, "H must be positive");
  if (c.M < 1) fail(ErrorCode::InvalidArgument, "M must be >= 1");
  if (c.contour_nodes < 8) fail(ErrorCode::InvalidArgument, "contour_nodes must be >= 8");
  if (!(c.right_margin > 0.0)) fail(ErrorCode::InvalidArgument, "right_margin must be positive");
  if (c.audit_trials < 0) fail(ErrorCode::InvalidArgument, "audit_trials must be >= 0");
  return c;
}

nlohmann::json gap_config_to_json(const GapExperimentConfig& c) {
  return {{"degrees", c.degrees},       {"trials", c.trials},
          {"sigma0_fraction", c.sigma0_fraction}, {"H", c.H},
          {"M", c.M},                   {"seed", c.seed},
          {"contour_nodes", c.contour_nodes},     {"right_margin", c.right_margin},
          {"audit_trials", c.audit_trials},       {"identity_reps", c.identity_reps}};
}

RectRegion gap_rectangle(double delta, const GapExperimentConfig& config) {
  return {config.sigma0_fraction * delta, delta + config.right_margin, -config.H, config.H};
}

namespace {

AssembleOptions degree_options(int M) {
  AssembleOptions o;
  o.M = M;
  return o;
}

ArgumentOptions symmetric_phase(const GapExperimentConfig& config) {
  ArgumentOptions o;
  o.initial_nodes = config.contour_nodes;
  o.conjugate_symmetric = true;
  o.allow_dilation = false;
  return o;
}

// Removes each zero of `remove` (with multiplicity) from `from`; false if one is missing.
bool subtract_multiset(std::vector<LocatedZero>& from, const std::vector<LocatedZero>& remove, double tol) {
  for (const auto& z : remove) {
    int left = z.multiplicity;
    for (auto& w : from) {
      if (left == 0) break;
      if (w.multiplicity > 0 && std::abs(w.s - z.s) <= tol * std::max(1.0, std::abs(z.s))) {
        const int take = std::min(left, w.multiplicity);
        w.multiplicity -= take;
        left -= take;
      }
    }
    if (left > 0) return false;
  }
  std::erase_if(from, [](const LocatedZero& w) { return w.multiplicity == 0; });
  return true;
}

GapAudit audit_trial(const SchottkyData& g, const GapExperimentConfig& config, const RectRegion& rect,
                     const PermutationRep& rep, int base_count, const ZeroReport* base_zeros, int new_count) {
  GapAudit audit;
  audit.n = rep.n;
  audit.base_count = base_count;
  audit.new_count = new_count;
  try {
    const ZetaFunction cover(g, ZetaKind::standard(), Representation::standard(rep), degree_options(config.M));
    audit.cover_count = count_zeros_by_argument(cover.value_evaluator(), rect, symmetric_phase(config)).count;
    audit.counts_match = audit.cover_count - base_count == new_count;
    if (!audit.counts_match) return audit;
    if (new_count == 0) {
      audit.multisets_match = true;
      return audit;
    }
    LocateOptions lo;
    lo.winding_by_argument = true;
    lo.contour.allow_dilation = false;
    lo.tol = 1e-11;
    const ZetaFunction reduced(g, ZetaKind::standard(), Representation::standard_reduced(rep), degree_options(config.M));
    const ZeroReport cover_zeros = locate_zeros(cover.analytic(), rect, lo);
    const ZeroReport new_zeros = locate_zeros(reduced.analytic(), rect, lo);
    std::vector<LocatedZero> remaining = cover_zeros.zeros;
    audit.multisets_match = subtract_multiset(remaining, base_zeros->zeros, 1e-6);
    if (audit.multisets_match) {
      std::vector<LocatedZero> expected = new_zeros.zeros;
      audit.multisets_match = subtract_multiset(remaining, expected, 1e-6) && remaining.empty();
    }
  } catch (const std::exception& e) {
    audit.error = e.what();
  }
  return audit;
}

}  // namespace

GapExperimentRecord run_gap_experiment(const SchottkyData& g, const GapExperimentConfig& config, int jobs) {
  GapExperimentRecord record;
  record.config = config;
  record.config_hash = fnv1a_hex(gap_config_to_json(config).dump());
  record.delta = hausdorff_dimension(g, 1e-13, std::max(config.M, 16)).delta;
  record.rect = gap_rectangle(record.delta, config);

  // Base surface: the boundary must be free of Z_X zeros.
  const ZetaFunction base(g, ZetaKind::standard(), Representation::trivial(), degree_options(config.M));
  ContourOptions strict;
  strict.allow_dilation = false;
  record.base_zero_count = count_zeros(base.evaluator(), record.rect, strict).count;
  std::optional<ZeroReport> base_zeros;
  if (config.audit_trials > 0) {
    LocateOptions lo;
    lo.contour.allow_dilation = false;
    lo.tol = 1e-11;
    base_zeros = locate_zeros(base.analytic(), record.rect, lo);
  }

  struct Task {
    int n, trial;
  };
  std::vector<Task> tasks;
  for (const int n : config.degrees)
    for (int t = 0; t < config.trials; ++t) tasks.push_back({n, t});
  record.trials.resize(tasks.size());
  std::vector<std::optional<GapAudit>> audits(tasks.size());

  parallel_for(tasks.size(), resolve_jobs(jobs), [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    GapTrial& out = record.trials[i];
    out.n = tasks[i].n;
    out.trial = tasks[i].trial;
    out.seed = derive_seed(config.seed, static_cast<std::uint64_t>(out.n), static_cast<std::uint64_t>(out.trial));
    const PermutationRep rep = config.identity_reps ? identity_rep(out.n, g.r) : sample_rep(out.n, g.r, out.seed);
    out.transitive = is_transitive(rep);
    try {
      const ZetaFunction reduced(g, ZetaKind::standard(), Representation::standard_reduced(rep), degree_options(config.M));
      out.new_zero_count = count_zeros_by_argument(reduced.value_evaluator(), record.rect, symmetric_phase(config)).count;
    } catch (const std::exception& e) {
      out.error = e.what();
      out.new_zero_count = -1;
    }
    if (out.trial < config.audit_trials && out.new_zero_count >= 0) {
      audits[i] = audit_trial(g, config, record.rect, rep, record.base_zero_count, base_zeros ? &*base_zeros : nullptr,
                              out.new_zero_count);
      audits[i]->trial = out.trial;
    }
    out.wall_ms = elapsed_ms(start);
  });

  for (auto& a : audits)
    if (a) record.audits.push_back(std::move(*a));

  for (const int n : config.degrees) {
    GapDegreeSummary s;
    s.n = n;
    double count_sum = 0.0;
    int transitive = 0;
    for (const auto& t : record.trials) {
      if (t.n != n) continue;
      transitive += t.transitive;
      if (t.new_zero_count < 0) {
        ++s.failures;
        continue;
      }
      ++s.completed;
      count_sum += t.new_zero_count;
      s.with_new_zeros += t.new_zero_count > 0;
    }
    if (s.completed > 0) {
      s.fraction = static_cast<double>(s.with_new_zeros) / s.completed;
      s.binomial_sigma = std::sqrt(s.fraction * (1.0 - s.fraction) / s.completed);
      s.mean_count = count_sum / s.completed;
    }
    s.transitive_fraction = static_cast<double>(transitive) / config.trials;
    record.degrees.push_back(s);
  }
  if (record.degrees.size() >= 2) {
    const auto& lo = record.degrees.front();
    const auto& hi = record.degrees.back();
    record.trend_holds =
        hi.fraction <= lo.fraction + 2.0 * std::hypot(lo.binomial_sigma, hi.binomial_sigma) + 1e-12;
  }
  return record;
}

std::string gap_csv(const GapExperimentRecord& record, bool include_timing) {
  std::ostringstream out;
  out << "n,trial,seed,transitive,new_zero_count,wall_ms\n";
  for (const auto& t : record.trials) {
    out << t.n << ',' << t.trial << ',' << t.seed << ',' << (t.transitive ? 1 : 0) << ',';
    if (t.new_zero_count >= 0) {
      out << t.new_zero_count;
    } else {
      out << "NA";
    }
    out << ',' << std::fixed << std::setprecision(1) << (include_timing ? t.wall_ms : 0.0) << std::defaultfloat << '\n';
  }
  return out.str();
}

nlohmann::json gap_summary_json(const GapExperimentRecord& record) {
  nlohmann::json degrees = nlohmann::json::array();
  for (const auto& s : record.degrees) {
    degrees.push_back({{"n", s.n},
                       {"completed", s.completed},
                       {"failures", s.failures},
                       {"with_new_zeros", s.with_new_zeros},
                       {"fraction", s.fraction},
                       {"binomial_sigma", s.binomial_sigma},
                       {"mean_count", s.mean_count},
                       {"transitive_fraction", s.transitive_fraction}});
  }
  nlohmann::json audits = nlohmann::json::array();
  for (const auto& a : record.audits) {
    audits.push_back({{"n", a.n},
                      {"trial", a.trial},
                      {"cover_count", a.cover_count},
                      {"base_count", a.base_count},
                      {"new_count", a.new_count},
                      {"counts_match", a.counts_match},
                      {"multisets_match", a.multisets_match},
                      {"error", a.error}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& t : record.trials)
    if (!t.error.empty()) failures.push_back({{"n", t.n}, {"trial", t.trial}, {"error", t.error}});
  return {{"config", gap_config_to_json(record.config)},
          {"config_hash", record.config_hash},
          {"delta", record.delta},
          {"rect", region_to_json(record.rect)},
          {"base_zero_count", record.base_zero_count},
          {"degrees", degrees},
          {"audits", audits},
          {"failures", failures},
          {"trend_holds", record.trend_holds}};
}

// ---------------------------------------------------------------------------
// HS decay

HsDecayConfig hs_decay_config_from_json(const nlohmann::json& j) {
  HsDecayConfig c;
  try {
    c.degrees = get_or(j, "degrees", c.degrees);
    c.sigma_fractions = get_or(j, "sigma_fractions", c.sigma_fractions);
    c.H1 = get_or(j, "H1", c.H1);
    c.t_points = get_or(j, "t_points", c.t_points);
    c.trials = get_or(j, "trials", c.trials);
    c.M = get_or(j, "M", c.M);
    c.seed = get_or(j, "seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed hs-decay config: ") + e.what());
  }
  if (c.degrees.empty() || c.sigma_fractions.empty()) fail(ErrorCode::InvalidArgument, "degrees and sigmas required");
  for (const int n : c.degrees)
    if (n < 1) fail(ErrorCode::InvalidArgument, "degrees must be >= 1");
  for (const double f : c.sigma_fractions)
    if (!(f > 0.75)) fail(ErrorCode::InvalidArgument, "sigma fractions must exceed 3/4");
  if (c.trials < 1 || c.t_points < 1 || c.M < 1) fail(ErrorCode::InvalidArgument, "trials, t_points, M must be >= 1");
  if (!(c.H1 >= 0.0)) fail(ErrorCode::InvalidArgument, "H1 must be >= 0");
  return c;
}

nlohmann::json hs_decay_config_to_json(const HsDecayConfig& c) {
  return {{"degrees", c.degrees}, {"sigma_fractions", c.sigma_fractions}, {"H1", c.H1}, {"t_points", c.t_points},
          {"trials", c.trials},   {"M", c.M},                             {"seed", c.seed}};
}

HsDecayRecord run_hs_decay(const SchottkyData& g, const HsDecayConfig& config, int jobs) {
  HsDecayRecord record;
  record.config = config;
  record.delta = hausdorff_dimension(g, 1e-13, 24).delta;
  const int workers = resolve_jobs(jobs);
  std::vector<double> ts;
  for (int k = 0; k < config.t_points; ++k) {
    ts.push_back(config.t_points == 1 ? 0.0 : config.H1 * k / (config.t_points - 1));
  }
  for (const double fraction : config.sigma_fractions) {
    HsDecaySeries series;
    series.sigma = fraction * record.delta;
    std::vector<double> log_n, log_mean;
    for (const int n : config.degrees) {
      HsDecayPoint point;
      point.n = n;
      point.sigma = series.sigma;
      point.tau = std::pow(static_cast<double>(n), -2.0 / record.delta);
      if (n == 1) {
        series.points.push_back(point);
        continue;
      }
      AssembleOptions options;
      options.M = config.M;
      const TransferOperator op(g, WordSet::refined(point.tau, g), options);
      point.words = op.word_set().words.size();
      std::vector<TransferBlocks> blocks;
      for (const double t : ts) blocks.push_back(op.blocks(Complex(series.sigma, t)));
      std::vector<double> values(static_cast<std::size_t>(config.trials));
      parallel_for(values.size(), workers, [&](std::size_t trial) {
        const auto rep = Representation::standard_reduced(
            sample_rep(n, g.r, derive_seed(config.seed, static_cast<std::uint64_t>(n), trial)));
        double sum = 0.0;
        for (const auto& b : blocks) sum += hs_norm_squared(op, b, rep);
        values[trial] = sum / static_cast<double>(blocks.size());
      });
      double mean = 0.0, sq = 0.0;
      for (const double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      for (const double v : values) sq += (v - mean) * (v - mean);
      point.mean_hs_squared = mean;
      point.standard_error =
          values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()))
                            : 0.0;
      if (mean > 0.0) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_mean.push_back(std::log(mean));
      }
      series.points.push_back(point);
    }
    if (log_n.size() >= 2) std::tie(series.slope, series.intercept) = fit_line(log_n, log_mean);
    record.series.push_back(std::move(series));
  }
  return record;
}

std::string hs_decay_csv(const HsDecayRecord& record) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "sigma,n,tau,words,mean_hs_squared,standard_error\n";
  for (const auto& s : record.series)
    for (const auto& p : s.points)
      out << p.sigma << ',' << p.n << ',' << p.tau << ',' << p.words << ',' << p.mean_hs_squared << ','
          << p.standard_error << '\n';
  return out.str();
}

nlohmann::json hs_decay_json(const HsDecayRecord& record) {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : record.series) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : s.points) {
      points.push_back({{"n", p.n},
                        {"tau", p.tau},
                        {"words", p.words},
                        {"mean_hs_squared", p.mean_hs_squared},
                        {"standard_error", p.standard_error}});
    }
    series.push_back({{"sigma", s.sigma}, {"slope", s.slope}, {"intercept", s.intercept}, {"points", points}});
  }
  return {{"config", hs_decay_config_to_json(record.config)}, {"delta", record.delta}, {"series", series}};
}

// ---------------------------------------------------------------------------
// Partition scaling

PartitionScalingRecord run_partition_scaling(const SchottkyData& g, const std::vector<double>& taus, std::size_t cap) {
  PartitionScalingRecord record;
  std::vector<double> x, members, powers, identities;
  for (const double tau : taus) {
    const PowerPairsReport report = power_pairs(tau, g, cap);
    PartitionScalingPoint p;
    p.tau = tau;
    p.members = report.members.size();
    p.identity_pairs = report.identity_count;
    p.power_pairs = report.power_count;
    p.other_pairs = report.other_count;
    p.histogram.assign(report.histogram.begin(), report.histogram.end());
    x.push_back(std::log(1.0 / tau));
    members.push_back(std::log(static_cast<double>(p.members)));
    identities.push_back(std::log(static_cast<double>(std::max<std::size_t>(p.identity_pairs, 1))));
    powers.push_back(std::log(static_cast<double>(std::max<std::size_t>(p.power_pairs, 1))));
    record.points.push_back(std::move(p));
  }
  if (x.size() >= 2) {
    record.member_exponent = fit_line(x, members).first;
    record.power_exponent = fit_line(x, powers).first;
    record.identity_exponent = fit_line(x, identities).first;
  }
  return record;
}

nlohmann::json partition_scaling_json(const PartitionScalingRecord& record) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : record.points) {
    nlohmann::json histogram = nlohmann::json::array();
    for (const auto& [key, count] : p.histogram) {
      histogram.push_back({{"L", key.L}, {"M1", key.M1}, {"M2", key.M2}, {"R", key.R}, {"q", key.q}, {"count", count}});
    }
    points.push_back({{"tau", p.tau},
                      {"members", p.members},
                      {"identity_pairs", p.identity_pairs},
                      {"power_pairs", p.power_pairs},
                      {"other_pairs", p.other_pairs},
                      {"histogram", histogram}});
  }
  return {{"points", points},
          {"member_exponent", record.member_exponent},
          {"power_exponent", record.power_exponent},
          {"identity_exponent", record.identity_exponent}};
}

// ---------------------------------------------------------------------------
// Jensen audit

DiskRegion disk_enclosing_rectangle(double delta, double sigma0, double H, double offset) {
  const double center = delta + offset;
  return {Complex(center, 0.0), 1.02 * std::hypot(center - sigma0, H)};
}

JensenAuditResult jensen_audit(const ZetaFunction& zeta, const DiskRegion& disk, int boundary_nodes,
                               bool winding_by_argument) {
  JensenAuditResult out;
  LocateOptions options;
  options.winding_by_argument = winding_by_argument;
  out.zeros = locate_zeros(zeta.analytic(), disk, options);
  out.disk = std::get<DiskRegion>(out.zeros.region);
  out.zero_term = jensen_zero_term(out.zeros, out.disk.center, out.disk.radius);
  out.boundary_term = jensen_boundary_term(zeta.value_evaluator(), out.disk.center, out.disk.radius, boundary_nodes);
  out.residual = std::abs(out.zero_term - out.boundary_term);
  return out;
}

}  // namespace schottky

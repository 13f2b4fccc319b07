#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace schottky;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

struct Globals {
  std::string group_path;
  std::string out_dir;
  bool to_stdout = false;
  std::uint64_t seed = 1;
  int jobs = 0;
  bool strict = false;
  std::string config_path;
  int M = 16;
};

struct RepArgs {
  std::string kind = "trivial";
  int n = 0;
  bool identity = false;
};

void add_rep_options(CLI::App* app, RepArgs& rep) {
  app->add_option("--rep", rep.kind, "trivial, std or std0")->check(CLI::IsMember({"trivial", "std", "std0"}));
  app->add_option("--n", rep.n, "cover degree for std/std0 (sampled from --seed)")->check(CLI::PositiveNumber);
  app->add_flag("--identity", rep.identity, "identity permutations instead of a random sample");
}

SchottkyData load(const Globals& g) { return g.group_path.empty() ? reference_group() : load_group(g.group_path); }

Representation make_rep(const RepArgs& args, const SchottkyData& g, std::uint64_t seed) {
  if (args.kind == "trivial") return Representation::trivial();
  if (args.n < 1) fail(ErrorCode::InvalidArgument, "--n is required for --rep " + args.kind);
  PermutationRep p = args.identity ? identity_rep(args.n, g.r) : sample_rep(args.n, g.r, seed);
  return args.kind == "std" ? Representation::standard(std::move(p)) : Representation::standard_reduced(std::move(p));
}

json rep_json(const RepArgs& args, std::uint64_t seed) {
  return {{"kind", args.kind}, {"n", args.n}, {"identity", args.identity}, {"seed", seed}};
}

AssembleOptions assemble_options(const Globals& g) {
  AssembleOptions o;
  o.M = g.M;
  o.strict = g.strict;
  return o;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, std::string("cannot parse ") + what + ": " + text);
    }
  }
  if (expected && out.size() != expected) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " needs " + std::to_string(expected) + " comma separated numbers");
  }
  return out;
}

/// Collects named outputs and writes them to --out, a fresh timestamped directory, or stdout.
class Sink {
 public:
  Sink(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {}

  void add(const std::string& name, const std::string& content) { files_.emplace_back(name, content); }
  void add(const std::string& name, const json& content) { add(name, content.dump(2) + "\n"); }

  void flush() const {
    if (g_.to_stdout) {
      for (const auto& [name, content] : files_) {
        if (files_.size() > 1) std::cout << "# " << name << '\n';
        std::cout << content;
      }
      return;
    }
    const fs::path dir = g_.out_dir.empty() ? timestamped() : fs::path(g_.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
      out << content;
    }
    std::cerr << "wrote " << files_.size() << " file(s) to " << dir.string() << '\n';
  }

 private:
  fs::path timestamped() const {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream name;
    name << command_ << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
    fs::path dir = fs::path("runs") / name.str();
    for (int k = 1; fs::exists(dir); ++k) dir = fs::path("runs") / (name.str() + "-" + std::to_string(k));
    return dir;
  }

  const Globals& g_;
  std::string command_;
  std::vector<std::pair<std::string, std::string>> files_;
};

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selberg zeta functions of Schottky surfaces and their random covers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--group", g.group_path, "group JSON (default: the built-in reference group)");
  app.add_option("--out", g.out_dir, "output directory (default: runs/<command>-<timestamp>)");
  app.add_flag("--stdout", g.to_stdout, "write data to standard output instead of files");
  app.add_option("--seed", g.seed, "base seed for all randomness");
  app.add_option("--jobs", g.jobs, "worker threads (default: SCHOTTKY_JOBS or all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--strict", g.strict, "treat truncation warnings as failures");
  app.add_option("--config", g.config_path, "JSON config for experiment commands");
  app.add_option("-M,--degree", g.M, "Taylor degree per disk")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "check the group invariants");

  auto* dimension_cmd = app.add_subcommand("dimension", "Hausdorff dimension from the pressure root");
  double dim_tol = 1e-12;
  dimension_cmd->add_option("--tol", dim_tol)->check(CLI::PositiveNumber);

  auto* pressure_cmd = app.add_subcommand("pressure", "P(sigma)");
  double sigma = 0.0;
  pressure_cmd->add_option("--sigma", sigma)->required()->check(CLI::NonNegativeNumber);

  auto* zeta_cmd = app.add_subcommand("zeta-eval", "evaluate zeta at s");
  double s_re = 0.0, s_im = 0.0, tau = 0.0;
  std::string kind = "standard";
  bool with_derivative = false;
  RepArgs rep_args;
  zeta_cmd->add_option("--re", s_re)->required();
  zeta_cmd->add_option("--im", s_im);
  zeta_cmd->add_option("--kind", kind)->check(CLI::IsMember({"standard", "refined"}));
  zeta_cmd->add_option("--tau", tau);
  zeta_cmd->add_flag("--log-derivative", with_derivative);
  add_rep_options(zeta_cmd, rep_args);

  auto* resonances_cmd = app.add_subcommand("resonances", "locate zeros in a rectangle or disk");
  std::string rect_text, disk_text;
  double locate_tol = 1e-10;
  bool by_argument = false;
  resonances_cmd->add_option("--rect", rect_text, "re_min,re_max,im_min,im_max");
  resonances_cmd->add_option("--disk", disk_text, "center_re,center_im,radius");
  resonances_cmd->add_option("--tol", locate_tol)->check(CLI::PositiveNumber);
  resonances_cmd->add_flag("--by-argument", by_argument, "whole-region winding by phase tracking only");
  resonances_cmd->add_option("--kind", kind)->check(CLI::IsMember({"standard", "refined"}));
  resonances_cmd->add_option("--tau", tau);
  add_rep_options(resonances_cmd, rep_args);

  auto* partition_cmd = app.add_subcommand("partition", "Z(tau) or its mirror as CSV");
  bool mirrored = false;
  partition_cmd->add_option("--tau", tau)->required();
  partition_cmd->add_flag("--mirror", mirrored, "emit Z-bar(tau)");

  auto* pairs_cmd = app.add_subcommand("power-pairs", "classify pairs of Z-bar(tau)");
  std::size_t cap = 20000;
  pairs_cmd->add_option("--tau", tau)->required();
  pairs_cmd->add_option("--cap", cap);

  auto* trace_cmd = app.add_subcommand("trace-stats", "expected std0 trace of a word");
  std::string word_text;
  std::string trace_mode = "mc";
  std::size_t trials = 10000;
  int degree_n = 0;
  trace_cmd->add_option("--word", word_text, "letters, comma separated")->required();
  trace_cmd->add_option("--n", degree_n)->required()->check(CLI::PositiveNumber);
  trace_cmd->add_option("--mode", trace_mode)->check(CLI::IsMember({"mc", "exhaustive"}));
  trace_cmd->add_option("--trials", trials);

  auto* hs_cmd = app.add_subcommand("hs-norm", "Hilbert-Schmidt norm of the refined operator");
  std::string hs_method = "matrix";
  hs_cmd->add_option("--tau", tau)->required();
  hs_cmd->add_option("--re", s_re)->required();
  hs_cmd->add_option("--im", s_im);
  hs_cmd->add_option("--method", hs_method)->check(CLI::IsMember({"matrix", "kernel", "both"}));
  add_rep_options(hs_cmd, rep_args);

  auto* cover_cmd = app.add_subcommand("cover-sample", "sample a permutation representation");
  cover_cmd->add_option("--n", degree_n)->required()->check(CLI::PositiveNumber);

  auto* gap_cmd = app.add_subcommand("gap-experiment", "count new zeros of random covers");
  bool no_timing = false;
  gap_cmd->add_flag("--no-timing", no_timing, "write 0 in the wall_ms column");

  auto* decay_cmd = app.add_subcommand("hs-decay", "HS norm decay in the cover degree");

  auto* jensen_cmd = app.add_subcommand("jensen-audit", "Jensen formula check on a disk");
  double sigma0_fraction = 0.8, H = 1.0;
  int boundary_nodes = 1024;
  jensen_cmd->add_option("--disk", disk_text, "center_re,center_im,radius (default: encloses Rect(sigma0, H))");
  jensen_cmd->add_option("--sigma0-fraction", sigma0_fraction);
  jensen_cmd->add_option("--H", H);
  jensen_cmd->add_option("--nodes", boundary_nodes)->check(CLI::PositiveNumber);
  jensen_cmd->add_flag("--by-argument", by_argument);
  add_rep_options(jensen_cmd, rep_args);

  auto* constants_cmd = app.add_subcommand("constants", "empirical distortion constants");
  int depth = 8;
  constants_cmd->add_option("--depth", depth)->check(CLI::Range(1, 12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  const CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  Sink sink(g, name);
  try {
    const SchottkyData group = load(g);
    const int jobs = resolve_jobs(g.jobs);

    if (cmd == validate_cmd) {
      const ValidationReport report = validate(group);
      json checks = json::array();
      for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"detail", c.detail}});
      sink.add("validation.json", json{{"ok", report.ok()}, {"checks", checks}});
      sink.flush();
      if (!report.ok()) {
        std::cerr << "validation failed: " << report.failures() << '\n';
        return kExitValidation;
      }
    } else if (cmd == dimension_cmd) {
      const DimensionResult d = hausdorff_dimension(group, dim_tol, std::max(g.M, 24));
      std::cerr << std::setprecision(15) << "delta = " << d.delta << " in [" << d.bracket_lo << ", " << d.bracket_hi
                << "]\n";
      sink.add("dimension.json", json{{"delta", d.delta},
                                      {"bracket", {d.bracket_lo, d.bracket_hi}},
                                      {"pressure_at_delta", d.pressure_at_delta},
                                      {"iterations", d.iterations},
                                      {"M", std::max(g.M, 24)}});
      sink.flush();
    } else if (cmd == pressure_cmd) {
      sink.add("pressure.json", json{{"sigma", sigma}, {"pressure", pressure(sigma, group, std::max(g.M, 24))}});
      sink.flush();
    } else if (cmd == zeta_cmd) {
      const ZetaKind k = kind == "standard" ? ZetaKind::standard() : ZetaKind::refined(tau);
      if (kind == "refined" && !(tau > 0.0)) fail(ErrorCode::TauNonPositive, "--tau must be positive");
      const ZetaFunction zeta(group, k, make_rep(rep_args, group, g.seed), assemble_options(g));
      const Complex s(s_re, s_im);
      const TransferMatrix t = zeta.matrix(s);
      json out{{"s", complex_json(s)},
               {"kind", kind},
               {"tau", tau},
               {"rep", rep_json(rep_args, g.seed)},
               {"M", g.M},
               {"size", zeta.size()},
               {"trailing_mass", t.trailing_mass},
               {"truncation_warning", t.truncation_warning}};
      if (with_derivative) {
        const ZetaValue v = zeta.evaluate_with_log_derivative(s);
        out["value"] = complex_json(v.value);
        out["log_derivative"] = complex_json(v.log_derivative);
      } else {
        out["value"] = complex_json(zeta.evaluate(s));
      }
      sink.add("zeta.json", out);
      sink.flush();
    } else if (cmd == resonances_cmd) {
      Region region;
      if (!rect_text.empty() == !disk_text.empty()) fail(ErrorCode::InvalidArgument, "give exactly one of --rect, --disk");
      if (!rect_text.empty()) {
        const auto v = parse_list(rect_text, 4, "--rect");
        if (!(v[0] < v[1] && v[2] < v[3])) fail(ErrorCode::InvalidArgument, "empty rectangle");
        region = RectRegion{v[0], v[1], v[2], v[3]};
      } else {
        const auto v = parse_list(disk_text, 3, "--disk");
        if (!(v[2] > 0.0)) fail(ErrorCode::InvalidArgument, "disk radius must be positive");
        region = DiskRegion{Complex(v[0], v[1]), v[2]};
      }
      if (kind == "refined" && !(tau > 0.0)) fail(ErrorCode::TauNonPositive, "--tau must be positive");
      const ZetaKind k = kind == "standard" ? ZetaKind::standard() : ZetaKind::refined(tau);
      const ZetaFunction zeta(group, k, make_rep(rep_args, group, g.seed), assemble_options(g));
      LocateOptions lo;
      lo.tol = locate_tol;
      lo.winding_by_argument = by_argument;
      json report = zero_report_to_json(locate_zeros(zeta.analytic(), region, lo));
      report["rep"] = rep_json(rep_args, g.seed);
      report["M"] = g.M;
      sink.add("resonances.json", report);
      sink.flush();
    } else if (cmd == partition_cmd) {
      if (!(tau > 0.0)) fail(ErrorCode::TauNonPositive, "--tau must be positive");
      const auto entries = mirrored ? mirror_partition(tau, group) : partition(tau, group);
      sink.add(mirrored ? "mirror_partition.csv" : "partition.csv", partition_csv(entries));
      sink.flush();
    } else if (cmd == pairs_cmd) {
      if (!(tau > 0.0)) fail(ErrorCode::TauNonPositive, "--tau must be positive");
      sink.add("power_pairs.json", partition_scaling_json(run_partition_scaling(group, {tau}, cap)));
      sink.flush();
    } else if (cmd == trace_cmd) {
      const Word w = reduce(parse_word(word_text), group.r);
      const TraceMode mode = trace_mode == "mc" ? TraceMode::MonteCarlo : TraceMode::Exhaustive;
      const TraceEstimate e = expected_trace(w, degree_n, group.r, mode, trials, g.seed);
      json out{{"word", format_word(w)},
               {"n", degree_n},
               {"mode", trace_mode},
               {"trials", e.trials},
               {"mean", e.mean},
               {"standard_error", e.standard_error},
               {"seed", g.seed}};
      if (mode == TraceMode::Exhaustive) out["exact_sum"] = e.exact_sum;
      const int t = static_cast<int>(w.size());
      if (degree_n > t * t) out["bsp_bound"] = bsp_bound(w, degree_n, group.r);
      sink.add("trace.json", out);
      sink.flush();
    } else if (cmd == hs_cmd) {
      if (!(tau > 0.0)) fail(ErrorCode::TauNonPositive, "--tau must be positive");
      const Representation rep = make_rep(rep_args, group, g.seed);
      const Complex s(s_re, s_im);
      json out{{"tau", tau}, {"s", complex_json(s)}, {"rep", rep_json(rep_args, g.seed)}};
      if (hs_method != "kernel") {
        const TransferMatrix t = assemble(group, WordSet::refined(tau, group), s, rep, assemble_options(g));
        out["matrix"] = {{"value", hs_norm_matrix(t)}, {"M", g.M}, {"truncation_warning", t.truncation_warning}};
      }
      if (hs_method != "matrix") {
        const KernelHsResult k = hs_norm_kernel(group, tau, s, rep);
        out["kernel"] = {{"value", k.value}, {"doubled_change", k.doubled_change}, {"imaginary_residual", k.imaginary_residual}};
      }
      sink.add("hs_norm.json", out);
      sink.flush();
    } else if (cmd == cover_cmd) {
      const PermutationRep rep = sample_rep(degree_n, group.r, g.seed);
      json out = rep_to_json(rep);
      out["transitive"] = is_transitive(rep);
      sink.add("cover.json", out);
      sink.flush();
    } else if (cmd == gap_cmd) {
      GapExperimentConfig config = g.config_path.empty() ? GapExperimentConfig{} : gap_config_from_json(read_json(g.config_path));
      if (app.count("--seed")) config.seed = g.seed;
      const GapExperimentRecord record = run_gap_experiment(group, config, jobs);
      sink.add("gap.csv", gap_csv(record, !no_timing));
      sink.add("gap_summary.json", gap_summary_json(record));
      sink.flush();
      for (const auto& d : record.degrees) {
        std::cerr << "n=" << d.n << " fraction=" << d.fraction << " +- " << d.binomial_sigma << " failures=" << d.failures
                  << '\n';
      }
    } else if (cmd == decay_cmd) {
      HsDecayConfig config = g.config_path.empty() ? HsDecayConfig{} : hs_decay_config_from_json(read_json(g.config_path));
      if (app.count("--seed")) config.seed = g.seed;
      const HsDecayRecord record = run_hs_decay(group, config, jobs);
      sink.add("hs_decay.csv", hs_decay_csv(record));
      sink.add("hs_decay.json", hs_decay_json(record));
      sink.flush();
      for (const auto& s : record.series) std::cerr << "sigma=" << s.sigma << " slope=" << s.slope << '\n';
    } else if (cmd == jensen_cmd) {
      DiskRegion disk;
      if (!disk_text.empty()) {
        const auto v = parse_list(disk_text, 3, "--disk");
        disk = {Complex(v[0], v[1]), v[2]};
      } else {
        if (!(sigma0_fraction > 0.75 && sigma0_fraction < 1.0)) {
          fail(ErrorCode::InvalidArgument, "--sigma0-fraction must lie in (3/4, 1)");
        }
        const double delta = hausdorff_dimension(group, 1e-13, 24).delta;
        disk = disk_enclosing_rectangle(delta, sigma0_fraction * delta, H);
      }
      if (!(disk.radius > 0.0)) fail(ErrorCode::InvalidArgument, "disk radius must be positive");
      const ZetaFunction zeta(group, ZetaKind::standard(), make_rep(rep_args, group, g.seed), assemble_options(g));
      const JensenAuditResult r = jensen_audit(zeta, disk, boundary_nodes, by_argument);
      sink.add("jensen.json", json{{"disk", region_to_json(r.disk)},
                                   {"zeros", zero_report_to_json(r.zeros)},
                                   {"zero_term", r.zero_term},
                                   {"boundary_term", r.boundary_term},
                                   {"residual", r.residual},
                                   {"rep", rep_json(rep_args, g.seed)}});
      sink.flush();
      std::cerr << "residual = " << r.residual << '\n';
    } else if (cmd == constants_cmd) {
      const double delta = hausdorff_dimension(group, 1e-12, 24).delta;
      sink.add("constants.json", constants_to_json(estimate_constants(depth, group, delta)));
      sink.flush();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Validation ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

#include "mmdvar/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmdvar/error.hpp"
#include "mmdvar/exact.hpp"
#include "mmdvar/fast_laplace.hpp"
#include "mmdvar/harness.hpp"
#include "mmdvar/ingest.hpp"
#include "mmdvar/selftest.hpp"

namespace mmdvar::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void diagnose(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  err << ordered_json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Ingest: return kIngestError;
    case ErrorKind::Config: return kUsageError;
    default: return kEstimatorError;
  }
}

KernelFamily parse_family(const std::string& s) {
  return s == "gaussian" ? KernelFamily::Gaussian : KernelFamily::Laplacian;
}

// "median" or a positive real.
std::optional<double> parse_sigma(const std::string& s) {
  if (s == "median") return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Config, "--sigma expects a number or 'median', got '" + s + "'");
  }
  return value;
}

struct EstimateArgs {
  std::string x_path;
  std::string y_path;
  std::string kernel = "laplacian";
  std::string sigma = "median";
  std::string path = "auto";
  std::string format = "json";
  std::string input_format = "csv";
  std::string dump_path;
  bool mean_only = false;
  bool clamp = false;
};

struct SweepArgs {
  std::size_t n = 50;
  double ratio = 1.0;
  std::vector<double> deltas{0.0};
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  std::string kernel = "laplacian";
  std::string sigma = "median";
  std::string format = "json";
};

struct BenchArgs {
  std::vector<std::size_t> sizes{1000, 10000, 100000};
  double ratio = 1.2;
  std::vector<std::string> paths{"fast", "matrix"};
  std::size_t runs = 20;
  std::size_t matrix_runs = 3;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  std::string format = "json";
};

struct SelftestArgs {
  bool quick = false;
  std::string fault = "none";
};

void write_report(std::ostream& out, const std::string& format, std::size_t n, std::size_t m,
                  const KernelSpec& spec, EstimatorPath path, double mmd2,
                  const std::optional<MmdReport>& report) {
  if (format == "csv") {
    const auto field = [&](double MmdReport::*member) {
      return report ? format_double((*report).*member) : std::string();
    };
    out << "n,m,sigma,family,path,mmd2,var_t1,var_t2,var_total\n"
        << n << ',' << m << ',' << format_double(spec.sigma()) << ','
        << family_name(spec.family()) << ',' << path_name(path) << ',' << format_double(mmd2)
        << ',' << field(&MmdReport::var_t1) << ',' << field(&MmdReport::var_t2) << ','
        << field(&MmdReport::var_total) << '\n';
    return;
  }
  ordered_json j;
  j["mmd2"] = mmd2;
  j["var_t1"] = report ? ordered_json(report->var_t1) : ordered_json(nullptr);
  j["var_t2"] = report ? ordered_json(report->var_t2) : ordered_json(nullptr);
  j["var_total"] = report ? ordered_json(report->var_total) : ordered_json(nullptr);
  j["n"] = n;
  j["m"] = m;
  j["sigma"] = spec.sigma();
  j["family"] = family_name(spec.family());
  j["path"] = path_name(path);
  out << j.dump() << '\n';
}

int estimate(const EstimateArgs& args, std::ostream& out) {
  const InputFormat in_format = args.input_format == "raw" ? InputFormat::Raw : InputFormat::Csv;
  const Sample x = ingest(args.x_path, in_format);
  const Sample y = ingest(args.y_path, in_format);
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::InvalidInput, "samples have different dimensions");
  }

  const KernelFamily family = parse_family(args.kernel);
  const std::optional<double> fixed = parse_sigma(args.sigma);
  const KernelSpec spec(family, fixed ? *fixed : median_heuristic(x, y));

  const bool eligible = family == KernelFamily::Laplacian && x.dim() == 1;
  EstimatorPath path = eligible ? EstimatorPath::FastLaplace : EstimatorPath::Matrix;
  if (args.path == "matrix") path = EstimatorPath::Matrix;
  if (args.path == "fast") {
    if (family != KernelFamily::Laplacian) {
      throw Error(ErrorKind::UnsupportedFamily, "the fast path supports the Laplacian kernel only");
    }
    if (x.dim() != 1) throw Error(ErrorKind::InvalidInput, "the fast path is univariate only");
    path = EstimatorPath::FastLaplace;
  }

  if (!args.dump_path.empty()) {
    if (path != EstimatorPath::FastLaplace) {
      throw Error(ErrorKind::Config, "--dump-accumulators needs the fast path");
    }
    std::ofstream dump(args.dump_path);
    if (!dump) throw Error(ErrorKind::Config, "cannot write " + args.dump_path);
    const Sample xs = x.sorted();
    const Sample ys = y.sorted();
    dump << "# X within\n";
    write_accumulators(dump, prefix_suffix(xs, spec.sigma()), xs);
    dump << "# Y within\n";
    write_accumulators(dump, prefix_suffix(ys, spec.sigma()), ys);
    dump << "# cross\n";
    write_accumulators(dump, cross_prefix_suffix(xs, ys, spec.sigma()));
  }

  if (args.mean_only) {
    const double mmd2 = path == EstimatorPath::FastLaplace ? mmd2_fast(x, y, spec.sigma())
                                                           : mmd2_unbiased(x, y, spec);
    write_report(out, args.format, x.size(), y.size(), spec, path, mmd2, std::nullopt);
    return kOk;
  }

  MmdReport report = path == EstimatorPath::FastLaplace ? variance_fast(x, y, spec.sigma())
                                                        : variance_full(x, y, spec);
  if (args.clamp) report = clamp_variance(report);
  write_report(out, args.format, report.n, report.m, report.spec, report.path, report.mmd2,
               report);
  return kOk;
}

void write_sweep(std::ostream& out, const SweepResult& result, const std::string& format) {
  if (format == "csv") {
    out << result.to_csv();
  } else {
    out << result.to_json().dump(2) << '\n';
  }
}

int sweep(const SweepArgs& args, std::ostream& out) {
  ScenarioConfig cfg;
  cfg.n = args.n;
  cfg.ratio = args.ratio;
  cfg.replicates = args.replicates;
  cfg.seed = args.seed;
  const KernelFamily family = parse_family(args.kernel);
  if (const auto fixed = parse_sigma(args.sigma)) {
    cfg.kernel = KernelSpec(family, *fixed);
  } else {
    cfg.median.family = family;
  }
  write_sweep(out, shift_sweep(cfg, args.deltas), args.format);
  return kOk;
}

int bench(const BenchArgs& args, std::ostream& out) {
  std::vector<EstimatorPath> paths;
  for (const auto& p : args.paths) {
    paths.push_back(p == "matrix" ? EstimatorPath::Matrix : EstimatorPath::FastLaplace);
  }
  BenchmarkOptions opt;
  opt.runs = args.runs;
  opt.matrix_runs = args.matrix_runs;
  opt.sigma = args.sigma;
  opt.seed = args.seed;
  write_sweep(out, scaling_benchmark(args.sizes, args.ratio, paths, opt), args.format);
  return kOk;
}

int selftest(const SelftestArgs& args, std::ostream& out) {
  SelftestOptions opt;
  opt.quick = args.quick;
  opt.corrupt_squared_pass = args.fault == "half-bandwidth";
  const std::vector<SuiteResult> results = run_selftest(opt);
  bool ok = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-34s %8s %8s %12s %10s  %s\n", "suite", "cases", "failed",
                "worst_rel", "tolerance", "status");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-34s %8zu %8zu %12.3e %10.1e  %s\n", r.name.c_str(),
                  r.cases, r.failures, r.worst_rel_error, r.tolerance,
                  r.passed() ? "PASS" : "FAIL");
    out << line;
    ok = ok && r.passed();
  }
  return ok ? kOk : kSelftestFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unbiased MMD^2 and its finite-sample variance", "mmdvar"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "MMD^2 and its variance for two samples");
  est_cmd->add_option("--x", est.x_path, "First sample file")->required();
  est_cmd->add_option("--y", est.y_path, "Second sample file")->required();
  est_cmd->add_option("--kernel", est.kernel)->check(CLI::IsMember({"laplacian", "gaussian"}));
  est_cmd->add_option("--sigma", est.sigma, "Bandwidth or 'median'");
  est_cmd->add_option("--path", est.path)->check(CLI::IsMember({"auto", "matrix", "fast"}));
  est_cmd->add_option("--format", est.format)->check(CLI::IsMember({"json", "csv"}));
  est_cmd->add_option("--input-format", est.input_format)->check(CLI::IsMember({"csv", "raw"}));
  est_cmd->add_option("--dump-accumulators", est.dump_path,
                      "Write fast-path accumulator columns to this file");
  est_cmd->add_flag("--mean-only", est.mean_only, "Report MMD^2 only (allows n, m >= 2)");
  est_cmd->add_flag("--clamp", est.clamp, "Floor the second-order variance at zero");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over location shifts");
  sw_cmd->add_option("--n", sw.n);
  sw_cmd->add_option("--ratio", sw.ratio, "m = round(ratio * n)");
  sw_cmd->add_option("--deltas", sw.deltas)->delimiter(',');
  sw_cmd->add_option("--replicates", sw.replicates);
  sw_cmd->add_option("--seed", sw.seed);
  sw_cmd->add_option("--kernel", sw.kernel)->check(CLI::IsMember({"laplacian", "gaussian"}));
  sw_cmd->add_option("--sigma", sw.sigma, "Bandwidth or 'median'");
  sw_cmd->add_option("--format", sw.format)->check(CLI::IsMember({"json", "csv"}));

  BenchArgs bn;
  auto* bn_cmd = app.add_subcommand("bench", "Runtime and memory scaling benchmark");
  bn_cmd->add_option("--sizes", bn.sizes)->delimiter(',');
  bn_cmd->add_option("--ratio", bn.ratio);
  bn_cmd->add_option("--paths", bn.paths)->delimiter(',')->check(
      CLI::IsMember({"fast", "matrix"}));
  bn_cmd->add_option("--runs", bn.runs);
  bn_cmd->add_option("--matrix-runs", bn.matrix_runs);
  bn_cmd->add_option("--sigma", bn.sigma);
  bn_cmd->add_option("--seed", bn.seed);
  bn_cmd->add_option("--format", bn.format)->check(CLI::IsMember({"json", "csv"}));

  SelftestArgs st;
  auto* st_cmd = app.add_subcommand("selftest", "Run the built-in oracle suites");
  st_cmd->add_flag("--quick", st.quick, "Reduced instance counts");
  st_cmd->add_option("--inject-fault", st.fault)
      ->check(CLI::IsMember({"none", "half-bandwidth"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnose(err, "usage", e.what(), kUsageError);
    return kUsageError;
  }

  try {
    if (*est_cmd) return estimate(est, out);
    if (*sw_cmd) return sweep(sw, out);
    if (*bn_cmd) return bench(bn, out);
    if (*st_cmd) return selftest(st, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    diagnose(err, error_kind_name(e.kind()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    diagnose(err, "internal", e.what(), kEstimatorError);
    return kEstimatorError;
  }
  return kUsageError;
}

}  // namespace mmdvar::cli

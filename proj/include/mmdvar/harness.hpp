#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmdvar/kernel.hpp"
#include "mmdvar/report.hpp"

namespace mmdvar {

/// Source distributions: X ~ Laplace(0, 1), Y ~ Laplace(delta, 1).
enum class SourceFamily { LaplaceLaplace };

/// Bandwidth recomputed from each replicate's pooled sample.
struct MedianHeuristic {
  KernelFamily family = KernelFamily::Laplacian;
};

struct ScenarioConfig {
  std::size_t n = 50;
  double ratio = 1.0;  // m = round(ratio * n)
  double delta = 0.0;
  SourceFamily family = SourceFamily::LaplaceLaplace;
  /// Fixed kernel; when empty the median heuristic picks sigma per replicate.
  std::optional<KernelSpec> kernel;
  MedianHeuristic median;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;

  std::size_t m() const;
  /// Throws Config on n < 4, m < 4, replicates < 1 or a non-finite shift.
  void validate() const;
};

/// Uniforms in (0, 1) keyed by (seed, replicate, stream); each key owns an
/// independent engine, so replicates can be generated in any order.
std::vector<double> uniform_stream(std::uint64_t seed, std::uint64_t replicate,
                                   std::uint64_t stream, std::size_t count);

/// Inverse CDF of Laplace(location, scale).
double laplace_quantile(double u, double location, double scale) noexcept;

/// X and Y for one replicate. Y is the Laplace(0, 1) draw translated by
/// cfg.delta, so the same seed yields the same underlying draws at every
/// shift.
std::pair<Sample, Sample> generate_scenario(const ScenarioConfig& cfg, std::uint64_t replicate = 0);

struct SweepRow {
  std::string label;
  std::string path;
  std::size_t n = 0;
  std::size_t m = 0;
  double delta = 0.0;
  std::size_t replicates = 0;
  double mean_sigma = 0.0;
  double mean_mmd2 = 0.0;
  double se_mmd2 = 0.0;  // standard error of mean_mmd2
  double empvar_mmd2 = 0.0;
  double mean_var_t1 = 0.0;
  double mean_var_t2 = 0.0;
  double mean_var_total = 0.0;
  double se_var_total = 0.0;  // standard error of mean_var_total
  double time_median_s = 0.0;
  double time_min_s = 0.0;
  double time_max_s = 0.0;
  std::size_t peak_bytes = 0;
  bool capped = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// One header row, stable column order.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

struct HarnessOptions {
  /// 0 means MMDVAR_THREADS or the hardware concurrency.
  std::size_t threads = 0;
};

/// Worker count honouring the MMDVAR_THREADS cap.
std::size_t resolve_threads(std::size_t requested);

/// Runs cfg.replicates independent draws and compares the spread of MMD^2
/// with the mean estimated variance. Rows carry no timings, so the output is
/// a pure function of the config. Uses the fast path for univariate
/// Laplacian kernels. Requires at least 100 replicates.
SweepRow monte_carlo_variance(const ScenarioConfig& cfg, const HarnessOptions& options = {});

/// One row per shift. The same draws are reused across shifts; only Y's
/// translation changes. cfg.replicates counts the seeds averaged per row.
SweepResult shift_sweep(const ScenarioConfig& base, std::span<const double> deltas,
                        const HarnessOptions& options = {});

struct BenchmarkOptions {
  std::size_t runs = 20;
  std::size_t matrix_runs = 20;
  /// Matrix-path sizes above this are recorded as capped rows.
  std::size_t matrix_cap = 10000;
  double sigma = 1.0;
  double delta = 1.0;
  std::uint64_t seed = 1;
};

/// Wall-time and peak additional heap per (size, path). The matrix path
/// materialises its kernel matrices, like the textbook quadratic algorithm.
SweepResult scaling_benchmark(std::span<const std::size_t> sizes, double ratio,
                              std::span<const EstimatorPath> paths,
                              const BenchmarkOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mmdvar

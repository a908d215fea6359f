#include "mmdvar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <new>
#include <random>
#include <sstream>
#include <thread>

#include "mmdvar/alloc_tracker.hpp"
#include "mmdvar/compensated_sum.hpp"
#include "mmdvar/error.hpp"
#include "mmdvar/exact.hpp"
#include "mmdvar/fast_laplace.hpp"

namespace mmdvar {

std::size_t ScenarioConfig::m() const {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

void ScenarioConfig::validate() const {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorKind::Config, "ratio must be positive and finite");
  }
  if (n < 4 || m() < 4) {
    throw Error(ErrorKind::Config, "scenario needs n >= 4 and round(ratio * n) >= 4, got n=" +
                                       std::to_string(n) + ", m=" + std::to_string(m()));
  }
  if (replicates < 1) throw Error(ErrorKind::Config, "replicates must be at least 1");
  if (!std::isfinite(delta)) throw Error(ErrorKind::Config, "shift must be finite");
}

std::vector<double> uniform_stream(std::uint64_t seed, std::uint64_t replicate,
                                   std::uint64_t stream, std::size_t count) {
  std::seed_seq key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 engine(key);
  std::vector<double> out(count);
  for (double& u : out) {
    // 53 random bits centred in their cell: strictly inside (0, 1).
    u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
  }
  return out;
}

double laplace_quantile(double u, double location, double scale) noexcept {
  return u < 0.5 ? location + scale * std::log(2.0 * u)
                 : location - scale * std::log(2.0 * (1.0 - u));
}

std::pair<Sample, Sample> generate_scenario(const ScenarioConfig& cfg, std::uint64_t replicate) {
  cfg.validate();
  std::vector<double> x = uniform_stream(cfg.seed, replicate, 0, cfg.n);
  std::vector<double> y = uniform_stream(cfg.seed, replicate, 1, cfg.m());
  for (double& v : x) v = laplace_quantile(v, 0.0, 1.0);
  for (double& v : y) v = laplace_quantile(v, 0.0, 1.0) + cfg.delta;
  return {Sample::univariate(std::move(x)), Sample::univariate(std::move(y))};
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t threads = requested;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MMDVAR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) threads = std::min<std::size_t>(threads, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(threads, 1);
}

namespace {

struct ReplicateOutcome {
  MmdReport report;
};

MmdReport estimate(const Sample& x, const Sample& y, const KernelSpec& spec) {
  if (spec.family() == KernelFamily::Laplacian && x.dim() == 1) {
    return variance_fast(x, y, spec.sigma());
  }
  return variance_full(x, y, spec);
}

ReplicateOutcome run_replicate(const ScenarioConfig& cfg, std::uint64_t replicate) {
  const auto [x, y] = generate_scenario(cfg, replicate);
  const KernelSpec spec =
      cfg.kernel ? *cfg.kernel : KernelSpec(cfg.median.family, median_heuristic(x, y));
  return {estimate(x, y, spec)};
}

// Results are stored by replicate index, so the reduction order (and hence
// every output byte) is independent of the worker count.
std::vector<ReplicateOutcome> run_replicates(const ScenarioConfig& cfg,
                                             const HarnessOptions& options) {
  cfg.validate();
  std::vector<ReplicateOutcome> outcomes(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replicates; r = next++) {
      try {
        outcomes[r] = run_replicate(cfg, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(resolve_threads(options.threads), cfg.replicates);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const Error& e) {
      throw Error(e.kind(), "replicate " + std::to_string(r) + ": " + e.what());
    }
  }
  return outcomes;
}

double mean_of(const std::vector<double>& v) {
  return compensated_total(v) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  CompensatedSum acc;
  for (const double x : v) acc += (x - mean) * (x - mean);
  return acc.value() / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

SweepRow summarise(const ScenarioConfig& cfg, const std::vector<ReplicateOutcome>& outcomes,
                   std::string label) {
  std::vector<double> sigma, mmd2, t1, t2, total;
  for (const auto& o : outcomes) {
    sigma.push_back(o.report.spec.sigma());
    mmd2.push_back(o.report.mmd2);
    t1.push_back(o.report.var_t1);
    t2.push_back(o.report.var_t2);
    total.push_back(o.report.var_total);
  }
  SweepRow row;
  row.label = std::move(label);
  row.path = std::string(path_name(outcomes.front().report.path));
  row.n = cfg.n;
  row.m = cfg.m();
  row.delta = cfg.delta;
  row.replicates = outcomes.size();
  row.mean_sigma = mean_of(sigma);
  row.mean_mmd2 = mean_of(mmd2);
  row.empvar_mmd2 = sample_variance(mmd2, row.mean_mmd2);
  row.se_mmd2 = std::sqrt(row.empvar_mmd2 / static_cast<double>(outcomes.size()));
  row.mean_var_t1 = mean_of(t1);
  row.mean_var_t2 = mean_of(t2);
  row.mean_var_total = mean_of(total);
  row.se_var_total = std::sqrt(sample_variance(total, row.mean_var_total) /
                               static_cast<double>(outcomes.size()));
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SweepRow monte_carlo_variance(const ScenarioConfig& cfg, const HarnessOptions& options) {
  cfg.validate();
  if (cfg.replicates < 100) {
    throw Error(ErrorKind::Config, "Monte Carlo variance needs at least 100 replicates, got " +
                                       std::to_string(cfg.replicates));
  }
  return summarise(cfg, run_replicates(cfg, options), "monte_carlo");
}

SweepResult shift_sweep(const ScenarioConfig& base, std::span<const double> deltas,
                        const HarnessOptions& options) {
  base.validate();
  SweepResult result;
  for (const double delta : deltas) {
    ScenarioConfig cfg = base;
    cfg.delta = delta;
    result.rows.push_back(summarise(cfg, run_replicates(cfg, options), "shift"));
  }
  return result;
}

SweepResult scaling_benchmark(std::span<const std::size_t> sizes, double ratio,
                              std::span<const EstimatorPath> paths,
                              const BenchmarkOptions& options) {
  if (options.runs < 1 || options.matrix_runs < 1) throw Error(ErrorKind::Config, "benchmark needs at least one run");
  SweepResult result;
  for (const std::size_t n : sizes) {
    ScenarioConfig cfg;
    cfg.n = n;
    cfg.ratio = ratio;
    cfg.delta = options.delta;
    cfg.seed = options.seed;
    cfg.validate();

    for (const EstimatorPath path : paths) {
      SweepRow row;
      row.label = "scaling";
      row.path = std::string(path_name(path));
      row.n = n;
      row.m = cfg.m();
      row.delta = cfg.delta;
      row.mean_sigma = options.sigma;
      if (path == EstimatorPath::Matrix && n > options.matrix_cap) {
        row.capped = true;
        result.rows.push_back(row);
        continue;
      }

      const auto [x, y] = generate_scenario(cfg, 0);
      const KernelSpec spec = KernelSpec::laplacian(options.sigma);
      const auto run_once = [&] {
        return path == EstimatorPath::FastLaplace
                   ? variance_fast(x, y, spec.sigma())
                   : variance_full(x, y, spec, MatrixOptions{.materialize = true});
      };

      std::vector<double> secs;
      MmdReport report;
      try {
        const std::size_t runs =
            path == EstimatorPath::Matrix ? options.matrix_runs : options.runs;
        for (std::size_t r = 0; r < runs; ++r) {
          const alloc::PeakScope scope;
          const auto start = std::chrono::steady_clock::now();
          report = run_once();
          secs.push_back(
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
          row.peak_bytes = std::max(row.peak_bytes, scope.peak_additional());
        }
      } catch (const std::bad_alloc&) {
        row.capped = true;
        result.rows.push_back(row);
        continue;
      }
      row.replicates = secs.size();
      row.mean_mmd2 = report.mmd2;
      row.mean_var_t1 = report.var_t1;
      row.mean_var_t2 = report.var_t2;
      row.mean_var_total = report.var_total;
      row.empvar_mmd2 = std::numeric_limits<double>::quiet_NaN();
      row.se_mmd2 = std::numeric_limits<double>::quiet_NaN();
      row.se_var_total = std::numeric_limits<double>::quiet_NaN();
      row.time_median_s = median_of(secs);
      row.time_min_s = *std::min_element(secs.begin(), secs.end());
      row.time_max_s = *std::max_element(secs.begin(), secs.end());
      result.rows.push_back(row);
    }
  }
  return result;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "slope fit needs at least two matching points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  out << "label,path,n,m,delta,replicates,mean_sigma,mean_mmd2,se_mmd2,empvar_mmd2,"
         "mean_var_t1,mean_var_t2,mean_var_total,se_var_total,time_median_s,time_min_s,time_max_s,"
         "peak_bytes,capped\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.path << ',' << r.n << ',' << r.m << ',' << format_double(r.delta)
        << ',' << r.replicates << ',' << format_double(r.mean_sigma) << ','
        << format_double(r.mean_mmd2) << ',' << format_double(r.se_mmd2) << ','
        << format_double(r.empvar_mmd2) << ',' << format_double(r.mean_var_t1) << ','
        << format_double(r.mean_var_t2) << ',' << format_double(r.mean_var_total) << ','
        << format_double(r.se_var_total) << ','
        << format_double(r.time_median_s) << ',' << format_double(r.time_min_s) << ','
        << format_double(r.time_max_s) << ',' << r.peak_bytes << ','
        << (r.capped ? "true" : "false") << '\n';
  }
  return out.str();
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"label", r.label},
                   {"path", r.path},
                   {"n", r.n},
                   {"m", r.m},
                   {"delta", r.delta},
                   {"replicates", r.replicates},
                   {"mean_sigma", r.mean_sigma},
                   {"mean_mmd2", r.mean_mmd2},
                   {"se_mmd2", r.se_mmd2},
                   {"empvar_mmd2", r.empvar_mmd2},
                   {"mean_var_t1", r.mean_var_t1},
                   {"mean_var_t2", r.mean_var_t2},
                   {"mean_var_total", r.mean_var_total},
                   {"se_var_total", r.se_var_total},
                   {"time_median_s", r.time_median_s},
                   {"time_min_s", r.time_min_s},
                   {"time_max_s", r.time_max_s},
                   {"peak_bytes", r.peak_bytes},
                   {"capped", r.capped}});
  }
  return arr;
}

}  // namespace mmdvar

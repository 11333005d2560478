#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scheds/cone.hpp"
#include "scheds/model.hpp"

namespace scheds {

struct SynthConfig {
  int T = 100;
  int p = 100;
  int s_star = 2;
  double sigma_star = 0.5;
  int trials = 100;
  std::uint64_t seed = 1;
};

/// One draw of the homoscedastic benchmark protocol: X and xi i.i.d. standard
/// Gaussian, beta* a random permutation of [1_{s*}, 0_{p-s*}], phi* =
/// beta*/sigma*, Y = sigma* (X phi* + xi).
struct SynthInstance {
  Matrix X;
  Vector Y;
  Vector beta_star;
  Vector phi_star;
  std::vector<int> support;
};

/// Deterministic in (config.seed, trial_index) regardless of scheduling.
SynthInstance generate(const SynthConfig& config, int trial_index);

struct TrialRecord {
  int trial = 0;
  bool ok = false;
  double err_beta = 0.0;     // |beta_hat - beta*|_2
  double err_support = 0.0;  // |s_hat - s*|
  double err_sigma = 0.0;    // 10 |sigma_hat - sigma*|
  double seconds = 0.0;
};

struct MethodSummary {
  std::string method;
  int trials_ok = 0;
  int trials_failed = 0;
  double mean_beta = 0.0, std_beta = 0.0;
  double mean_support = 0.0, std_support = 0.0;
  double mean_sigma = 0.0, std_sigma = 0.0;
  double mean_seconds = 0.0;
};

struct ConfigReport {
  SynthConfig config;
  std::vector<MethodSummary> methods;             // ScHeDs, SqrtLasso
  std::vector<std::vector<TrialRecord>> records;  // raw, same order as methods
};

struct BenchReport {
  std::vector<ConfigReport> configs;
};

/// Failed trials are excluded from the means and counted; a config fails the
/// run when more than 2% of its trials fail.
bool bench_run_failed(const BenchReport& report);

/// Full per-trial pipeline: generate -> normalize columns -> fit with
/// lambda = sqrt(2 log p) on singleton groups (q = 1, R = ones) -> bias
/// correction -> metrics in the original column scale.  The square-root
/// Lasso runs on the same draws.  threads > 1 distributes trials with
/// per-trial RNG streams; the output is identical for any thread count.
BenchReport run_benchmark(const std::vector<SynthConfig>& configs,
                          const SolverConfig& solver, int threads = 1);

MethodSummary summarize(const std::string& method,
                        const std::vector<TrialRecord>& records);

/// Deterministic CSV (one row per method) with a provenance comment header.
std::string bench_csv(const ConfigReport& report);
std::string bench_file_stem(const SynthConfig& config);  // bench_<T>_<p>_<s>_<sigma>

struct TimingRow {
  int p = 0;
  double ip_seconds_per_iteration = 0.0;
  int ip_iterations = 0;
  double ofo_seconds_per_iteration = 0.0;
  int ofo_iterations = 0;
};

/// Seconds per iteration of both solvers on one assembled instance per p.
/// Absolute numbers are hardware-bound; only scaling behavior is asserted
/// downstream.
std::vector<TimingRow> timing_profile(const std::vector<int>& p_values, int T,
                                      int s_star, double sigma_star,
                                      std::uint64_t seed = 1);

}  // namespace scheds

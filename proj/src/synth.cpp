#include "scheds/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "scheds/estimator.hpp"
#include "scheds/rng.hpp"
#include "scheds/sqrt_lasso.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scheds {

SynthInstance generate(const SynthConfig& config, int trial_index) {
  if (config.s_star < 1 || config.s_star > config.p)
    throw std::invalid_argument("generate: s_star outside [1, p]");
  Rng rng(config.seed, static_cast<std::uint64_t>(trial_index));

  SynthInstance inst;
  inst.X.resize(config.T, config.p);
  for (int j = 0; j < config.p; ++j)
    for (int t = 0; t < config.T; ++t) inst.X(t, j) = rng.normal();
  Vector xi(config.T);
  for (int t = 0; t < config.T; ++t) xi(t) = rng.normal();

  // beta0 = [1_{s*}, 0], then a Fisher-Yates permutation of the entries
  Vector beta = Vector::Zero(config.p);
  beta.head(config.s_star).setOnes();
  for (int j = config.p - 1; j > 0; --j) {
    const int i = static_cast<int>(rng.uniform_below(j + 1));
    std::swap(beta(i), beta(j));
  }
  inst.beta_star = beta;
  inst.phi_star = beta / config.sigma_star;
  inst.Y = config.sigma_star * (inst.X * inst.phi_star + xi);
  for (int j = 0; j < config.p; ++j)
    if (beta(j) != 0.0) inst.support.push_back(j);
  return inst;
}

MethodSummary summarize(const std::string& method,
                        const std::vector<TrialRecord>& records) {
  MethodSummary s;
  s.method = method;
  std::vector<const TrialRecord*> ok;
  for (const auto& r : records) {
    if (r.ok)
      ok.push_back(&r);
    else
      ++s.trials_failed;
  }
  s.trials_ok = static_cast<int>(ok.size());
  if (ok.empty()) return s;
  const double n = static_cast<double>(ok.size());
  auto accumulate = [&](auto get, double& mean, double& sd) {
    double sum = 0.0;
    for (auto* r : ok) sum += get(*r);
    mean = sum / n;
    if (ok.size() > 1) {
      double ss = 0.0;
      for (auto* r : ok) ss += (get(*r) - mean) * (get(*r) - mean);
      sd = std::sqrt(ss / (n - 1.0));
    } else {
      sd = 0.0;
    }
  };
  accumulate([](const TrialRecord& r) { return r.err_beta; }, s.mean_beta,
             s.std_beta);
  accumulate([](const TrialRecord& r) { return r.err_support; },
             s.mean_support, s.std_support);
  accumulate([](const TrialRecord& r) { return r.err_sigma; }, s.mean_sigma,
             s.std_sigma);
  double t = 0.0;
  for (auto* r : ok) t += r->seconds;
  s.mean_seconds = t / n;
  return s;
}

bool bench_run_failed(const BenchReport& report) {
  for (const auto& config : report.configs)
    for (const auto& m : config.methods)
      if (m.trials_failed >
          0.02 * static_cast<double>(m.trials_ok + m.trials_failed))
        return true;
  return false;
}

namespace {

struct TrialPair {
  TrialRecord scheds;
  TrialRecord sqrtl;
};

TrialPair run_trial(const SynthConfig& config, const SolverConfig& solver,
                    int trial) {
  TrialPair pair;
  pair.scheds.trial = trial;
  pair.sqrtl.trial = trial;

  const SynthInstance inst = generate(config, trial);
  const ColumnScaling scaling = ColumnScaling::unit_norm(inst.X);
  const Matrix Xn = scaling.apply(inst.X);
  const double lambda0 = std::sqrt(2.0 * std::log(double(config.p)));

  // ScHeDs: singleton groups, q = 1, R = ones.
  {
    const auto t0 = std::chrono::steady_clock::now();
    RegressionData data{Xn, inst.Y, Matrix::Ones(config.T, 1),
                        GroupPartition::singletons(config.p)};
    ScHeDsProblem problem = make_problem(std::move(data));
    problem.lambda = lambda_weights(problem.geometry, lambda0).values;
    const ScHeDsEstimate stage1 = fit(problem, solver);
    if (stage1.solver_report.status == SolveStatus::optimal) {
      const ScHeDsEstimate stage2 =
          bias_correct(problem, stage1, problem.data.Y, solver);
      const double sigma_hat = 1.0 / stage2.alpha_hat(0);
      const Vector beta_hat = scaling.to_raw(stage2.phi_hat) * sigma_hat;
      pair.scheds.ok = stage2.solver_report.status == SolveStatus::optimal;
      pair.scheds.err_beta = (beta_hat - inst.beta_star).norm();
      pair.scheds.err_support = std::abs(
          static_cast<double>(stage1.selected_groups.size()) - config.s_star);
      pair.scheds.err_sigma = 10.0 * std::abs(sigma_hat - config.sigma_star);
    }
    pair.scheds.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }

  // Square-root Lasso on the same normalized design.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const SqrtLassoEstimate stage1 = sqrt_lasso(Xn, inst.Y, lambda0, solver);
    if (stage1.solver_report.status == SolveStatus::optimal) {
      const SqrtLassoEstimate stage2 =
          sqrt_lasso_bias_correct(Xn, inst.Y, stage1, solver);
      const Vector beta_hat = scaling.to_raw(stage2.beta_hat);
      pair.sqrtl.ok = true;
      pair.sqrtl.err_beta = (beta_hat - inst.beta_star).norm();
      pair.sqrtl.err_support = std::abs(
          static_cast<double>(stage1.selected.size()) - config.s_star);
      pair.sqrtl.err_sigma =
          10.0 * std::abs(stage2.sigma_hat - config.sigma_star);
    }
    pair.sqrtl.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }
  return pair;
}

}  // namespace

BenchReport run_benchmark(const std::vector<SynthConfig>& configs,
                          const SolverConfig& solver, int threads) {
  BenchReport report;
  for (const auto& config : configs) {
    if (config.trials < 1)
      throw std::invalid_argument("run_benchmark: trials < 1");
    std::vector<TrialPair> pairs(config.trials);
    if (threads <= 1) {
      for (int i = 0; i < config.trials; ++i)
        pairs[i] = run_trial(config, solver, i);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
      for (int i = 0; i < config.trials; ++i)
        pairs[i] = run_trial(config, solver, i);
    }
    ConfigReport cr;
    cr.config = config;
    cr.records.resize(2);
    for (auto& pair : pairs) {
      cr.records[0].push_back(pair.scheds);
      cr.records[1].push_back(pair.sqrtl);
    }
    cr.methods.push_back(summarize("ScHeDs", cr.records[0]));
    cr.methods.push_back(summarize("SqrtLasso", cr.records[1]));
    report.configs.push_back(std::move(cr));
  }
  return report;
}

std::string bench_file_stem(const SynthConfig& config) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "bench_%d_%d_%d_%g", config.T, config.p,
                config.s_star, config.sigma_star);
  return buf;
}

std::string bench_csv(const ConfigReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << bench_file_stem(report.config)
      << " trials=" << report.config.trials << " seed=" << report.config.seed
      << "\n";
  out << "T,p,s_star,sigma_star,method,trials_ok,trials_failed,"
         "beta_err_mean,beta_err_std,support_err_mean,support_err_std,"
         "sigma_err_mean,sigma_err_std,seconds_mean\n";
  for (const auto& m : report.methods) {
    out << report.config.T << ',' << report.config.p << ','
        << report.config.s_star << ',' << report.config.sigma_star << ','
        << m.method << ',' << m.trials_ok << ',' << m.trials_failed << ','
        << m.mean_beta << ',' << m.std_beta << ',' << m.mean_support << ','
        << m.std_support << ',' << m.mean_sigma << ',' << m.std_sigma << ','
        << m.mean_seconds << '\n';
  }
  return out.str();
}

std::vector<TimingRow> timing_profile(const std::vector<int>& p_values, int T,
                                      int s_star, double sigma_star,
                                      std::uint64_t seed) {
  std::vector<TimingRow> rows;
  for (int p : p_values) {
    SynthConfig config{T, p, s_star, sigma_star, 1, seed};
    const SynthInstance inst = generate(config, 0);
    const Matrix Xn = ColumnScaling::unit_norm(inst.X).apply(inst.X);
    RegressionData data{Xn, inst.Y, Matrix::Ones(T, 1),
                        GroupPartition::singletons(p)};
    ScHeDsProblem problem = make_problem(std::move(data));
    problem.lambda =
        lambda_weights(problem.geometry, std::sqrt(2.0 * std::log(double(p))))
            .values;
    const auto assembled = assemble_program(problem, inst.Y);

    TimingRow row;
    row.p = p;
    {
      SolverConfig ip = SolverConfig::interior_point(1e-14, 4);
      const ConeSolution sol = solve(assembled.program, ip);
      row.ip_seconds_per_iteration = sol.seconds_per_iteration;
      row.ip_iterations = sol.iterations;
    }
    {
      SolverConfig ofo = SolverConfig::first_order(1e-14, 200);
      const ConeSolution sol = solve(assembled.program, ofo);
      row.ofo_seconds_per_iteration = sol.seconds_per_iteration;
      row.ofo_iterations = sol.iterations;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace scheds

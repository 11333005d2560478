#include "scheds/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scheds {

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const Json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Json to_json(const SolverReport& report) {
  return Json{{"method", report.method},
              {"status", to_string(report.status)},
              {"objective", report.objective},
              {"primal_residual", report.primal_residual},
              {"gap_proxy", report.gap_proxy},
              {"iterations", report.iterations},
              {"seconds_per_iteration", report.seconds_per_iteration}};
}

SolverReport solver_report_from_json(const Json& j) {
  SolverReport report;
  report.method = j.value("method", "");
  const std::string status = j.value("status", "max_iter");
  report.status = status == "optimal" ? SolveStatus::optimal
                  : status == "infeasible_suspected"
                      ? SolveStatus::infeasible_suspected
                      : SolveStatus::max_iter;
  report.objective = j.value("objective", 0.0);
  report.primal_residual = j.value("primal_residual", 0.0);
  report.gap_proxy = j.value("gap_proxy", 0.0);
  report.iterations = j.value("iterations", 0);
  report.seconds_per_iteration = j.value("seconds_per_iteration", 0.0);
  return report;
}

Json to_json(const LambdaRule& rule) {
  Json j{{"mode", rule.mode == LambdaMode::scaled_sqrt_rank
                      ? "scaled_sqrt_rank"
                      : "theorem2"},
         {"values", to_json(rule.values)}};
  if (rule.mode == LambdaMode::scaled_sqrt_rank)
    j["lambda0"] = rule.lambda0;
  else
    j["K_over_eps"] = rule.K_over_eps;
  return j;
}

Json estimate_to_json(const ScHeDsEstimate& estimate, const LambdaRule& rule,
                      const GroupPartition& partition,
                      const std::optional<ColumnScaling>& x_scaling,
                      const std::optional<Vector>& r_scaling) {
  Json j;
  j["estimator"] = "scheds";
  j["phi_hat"] = to_json(estimate.phi_hat);
  j["alpha_hat"] = to_json(estimate.alpha_hat);
  j["selected_groups"] = estimate.selected_groups;
  j["bias_corrected"] = estimate.bias_corrected;
  j["lambda_rule"] = to_json(rule);
  j["solver"] = to_json(estimate.solver_report);
  j["groups"] = partition.groups;
  j["normalization"] = Json::object();
  if (x_scaling) j["normalization"]["x_scale"] = to_json(x_scaling->scale);
  if (r_scaling) j["normalization"]["r_scale"] = to_json(*r_scaling);
  return j;
}

Json estimate_to_json(const SqrtLassoEstimate& estimate, double lambda,
                      const std::optional<ColumnScaling>& x_scaling) {
  Json j;
  j["estimator"] = "sqrt_lasso";
  j["beta_hat"] = to_json(estimate.beta_hat);
  j["sigma_hat"] = estimate.sigma_hat;
  j["selected"] = estimate.selected;
  j["lambda"] = lambda;
  j["column_weights"] = to_json(estimate.column_weights);
  j["bias_corrected"] = estimate.bias_corrected;
  j["solver"] = to_json(estimate.solver_report);
  j["normalization"] = Json::object();
  if (x_scaling) j["normalization"]["x_scale"] = to_json(x_scaling->scale);
  return j;
}

namespace {

Json to_json(const MethodSummary& m) {
  return Json{{"method", m.method},
              {"trials_ok", m.trials_ok},
              {"trials_failed", m.trials_failed},
              {"beta_err", {{"mean", m.mean_beta}, {"std", m.std_beta}}},
              {"support_err",
               {{"mean", m.mean_support}, {"std", m.std_support}}},
              {"sigma_err", {{"mean", m.mean_sigma}, {"std", m.std_sigma}}},
              {"seconds_mean", m.mean_seconds}};
}

Json to_json(const TrialRecord& r) {
  return Json{{"trial", r.trial},         {"ok", r.ok},
              {"beta_err", r.err_beta},   {"support_err", r.err_support},
              {"sigma_err", r.err_sigma}, {"seconds", r.seconds}};
}

}  // namespace

Json to_json(const BenchReport& report) {
  Json configs = Json::array();
  for (const auto& c : report.configs) {
    Json jc;
    jc["config"] = Json{{"T", c.config.T},
                        {"p", c.config.p},
                        {"s_star", c.config.s_star},
                        {"sigma_star", c.config.sigma_star},
                        {"trials", c.config.trials},
                        {"seed", c.config.seed}};
    Json methods = Json::array();
    for (const auto& m : c.methods) methods.push_back(to_json(m));
    jc["methods"] = methods;
    Json records = Json::array();
    for (std::size_t mi = 0; mi < c.records.size(); ++mi) {
      Json rec = Json::array();
      for (const auto& r : c.records[mi]) rec.push_back(to_json(r));
      records.push_back(rec);
    }
    jc["records"] = records;
    configs.push_back(jc);
  }
  return Json{{"configs", configs}};
}

Json to_json(const TheoryConstants& constants) {
  return Json{{"C1", constants.C1},
              {"C2", constants.C2},
              {"C3", constants.C3},
              {"C4", constants.C4}};
}

Json to_json(const KsResult& ks) {
  return Json{{"statistic", ks.statistic}, {"p_value", ks.p_value}};
}

Json to_json(const GreProbeResult& probe) {
  return Json{{"subset_size", probe.subset_size},
              {"kappa_upper", probe.kappa_upper},
              {"subsets_examined", probe.subsets_examined},
              {"exhaustive", probe.exhaustive},
              {"witness", to_json(probe.witness)}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  return Json::parse(read_text_file(path));
}

}  // namespace scheds

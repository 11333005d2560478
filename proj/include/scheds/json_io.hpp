#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "scheds/diagnostics.hpp"
#include "scheds/estimator.hpp"
#include "scheds/sqrt_lasso.hpp"
#include "scheds/synth.hpp"

namespace scheds {

using Json = nlohmann::json;

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const SolverReport& report);
SolverReport solver_report_from_json(const Json& j);

Json to_json(const LambdaRule& rule);

/// Estimate document: coefficients, selected groups, lambda rule, solver
/// report, and the column scaling needed to predict on raw inputs.
Json estimate_to_json(const ScHeDsEstimate& estimate, const LambdaRule& rule,
                      const GroupPartition& partition,
                      const std::optional<ColumnScaling>& x_scaling,
                      const std::optional<Vector>& r_scaling);

/// Same document shape with a baseline tag.
Json estimate_to_json(const SqrtLassoEstimate& estimate, double lambda,
                      const std::optional<ColumnScaling>& x_scaling);

Json to_json(const BenchReport& report);
Json to_json(const TheoryConstants& constants);
Json to_json(const KsResult& ks);
Json to_json(const GreProbeResult& probe);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace scheds

#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "scheds/model.hpp"

namespace scheds {

/// Empirical constants of the risk analysis, evaluated at a given (phi, alpha):
///   C1 = max_l (1/T) sum_t r_tl^2 (X_t phi)^2 / (R_t alpha)^2
///   C2 = max_l (1/T) sum_t r_tl^2 / (R_t alpha)^2
///   C3 = min_l (1/T) sum_t r_tl / (R_t alpha)
///   C4 = (sqrt(C2) + sqrt(2 C1)) / C3
struct TheoryConstants {
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
};

TheoryConstants theory_constants(const Matrix& X, const Matrix& R,
                                 const Vector& phi_star,
                                 const Vector& alpha_star);

/// Sampling probe of the group-restricted eigenvalue condition.  For subsets
/// of at most N groups it searches the weighted cone
///   sum_{k not in S} lambda_k |X_Gk d| <= sum_{k in S} lambda_k |X_Gk d|
/// by random directions (rescaled onto the cone boundary) plus directions
/// supported on the subset, and reports the smallest Rayleigh-type ratio
/// found.  The result is an UPPER bound on kappa: it certifies a violation
/// when it falls below a required kappa, never compliance.
struct GreProbeResult {
  int subset_size = 0;     // N
  double kappa_upper = 0.0;
  Vector witness;          // delta attaining the reported ratio
  long subsets_examined = 0;
  bool exhaustive = false;
};

GreProbeResult gre_probe(const Matrix& X, const GroupPartition& partition,
                         const Vector& lambda, int subset_size, int budget,
                         std::uint64_t seed = 1, int threads = 1);

/// Ratio |X d|^2 / sum_{k in subset} |X_Gk d|^2 (the probe's objective).
double gre_ratio(const Matrix& X, const GroupPartition& partition,
                 const std::vector<int>& subset, const Vector& delta);

/// Kolmogorov-Smirnov test of the residuals against the standard normal;
/// p-value from the asymptotic Kolmogorov series.
struct KsResult {
  double statistic = 0.0;  // D in [0, 1]
  double p_value = 0.0;    // in [0, 1]
};

KsResult ks_test(const Vector& residuals);

double normal_cdf(double x);

struct SupportMetrics {
  double abs_diff = 0.0;   // | s_hat - s* |
  double precision = 1.0;  // 1 by convention when nothing is selected
  double recall = 1.0;
};

SupportMetrics support_metrics(const std::set<int>& selected,
                               const std::set<int>& true_support, int p);

}  // namespace scheds

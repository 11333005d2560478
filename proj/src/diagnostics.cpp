#include "scheds/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scheds/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scheds {

TheoryConstants theory_constants(const Matrix& X, const Matrix& R,
                                 const Vector& phi_star,
                                 const Vector& alpha_star) {
  const auto T = X.rows();
  if (R.rows() != T || phi_star.size() != X.cols() ||
      alpha_star.size() != R.cols())
    throw std::invalid_argument("theory_constants: dimension mismatch");
  const Vector ra = R * alpha_star;
  for (Eigen::Index t = 0; t < T; ++t)
    if (!(ra(t) > 0.0))
      throw std::invalid_argument(
          "theory_constants: R alpha* not positive at t = " + std::to_string(t));
  const Vector xphi = X * phi_star;

  TheoryConstants c;
  c.C1 = -std::numeric_limits<double>::infinity();
  c.C2 = -std::numeric_limits<double>::infinity();
  c.C3 = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < R.cols(); ++l) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const double r = R(t, l);
      const double w = r / ra(t);
      s1 += w * w * xphi(t) * xphi(t);
      s2 += w * w;
      s3 += w;
    }
    c.C1 = std::max(c.C1, s1 / T);
    c.C2 = std::max(c.C2, s2 / T);
    c.C3 = std::min(c.C3, s3 / T);
  }
  if (!(c.C3 > 0.0))
    throw std::invalid_argument("theory_constants: C3 must be positive");
  c.C4 = (std::sqrt(c.C2) + std::sqrt(2.0 * c.C1)) / c.C3;
  return c;
}

double gre_ratio(const Matrix& X, const GroupPartition& partition,
                 const std::vector<int>& subset, const Vector& delta) {
  double denom = 0.0;
  for (int k : subset) {
    double block = 0.0;
    Vector xd = Vector::Zero(X.rows());
    for (int j : partition.groups[k]) xd += X.col(j) * delta(j);
    block = xd.squaredNorm();
    denom += block;
  }
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return (X * delta).squaredNorm() / denom;
}

namespace {

// next subset of sizes 1..N in lexicographic enumeration; returns false at end
bool next_subset(std::vector<int>& subset, int K, int N) {
  const int size = static_cast<int>(subset.size());
  int i = size - 1;
  while (i >= 0 && subset[i] == K - size + i) --i;
  if (i < 0) {
    if (size >= N) return false;
    subset.resize(size + 1);
    for (int j = 0; j <= size; ++j) subset[j] = j;
    return true;
  }
  ++subset[i];
  for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
  return true;
}

long count_subsets(int K, int N, long cap) {
  long total = 0;
  for (int size = 1; size <= N; ++size) {
    double binom = 1.0;
    for (int i = 0; i < size; ++i) binom = binom * (K - i) / (i + 1);
    total += static_cast<long>(binom);
    if (total > cap) return cap + 1;
  }
  return total;
}

struct SubsetResult {
  double ratio = std::numeric_limits<double>::infinity();
  Vector witness;
};

SubsetResult probe_subset(const Matrix& X, const GroupPartition& partition,
                          const Vector& lambda, const std::vector<int>& subset,
                          int budget, std::uint64_t seed,
                          std::uint64_t stream) {
  const int p = static_cast<int>(X.cols());
  const int K = partition.group_count();
  std::vector<char> in_subset(K, 0);
  for (int k : subset) in_subset[k] = 1;

  Rng rng(seed, stream);
  SubsetResult best;
  for (int b = 0; b < budget; ++b) {
    Vector delta(p);
    for (int j = 0; j < p; ++j) delta(j) = rng.normal();
    if (b % 2 == 1) {
      // direction supported on the subset: trivially inside the cone
      for (int k = 0; k < K; ++k)
        if (!in_subset[k])
          for (int j : partition.groups[k]) delta(j) = 0.0;
    } else {
      // rescale the complement onto the cone boundary when violated
      double inside = 0.0, outside = 0.0;
      for (int k = 0; k < K; ++k) {
        Vector xd = Vector::Zero(X.rows());
        for (int j : partition.groups[k]) xd += X.col(j) * delta(j);
        const double norm = lambda(k) * xd.norm();
        (in_subset[k] ? inside : outside) += norm;
      }
      if (outside > inside) {
        const double scale = outside > 0.0 ? inside / outside : 0.0;
        for (int k = 0; k < K; ++k)
          if (!in_subset[k])
            for (int j : partition.groups[k]) delta(j) *= scale;
      }
    }
    const double ratio = gre_ratio(X, partition, subset, delta);
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.witness = delta;
    }
  }
  return best;
}

}  // namespace

GreProbeResult gre_probe(const Matrix& X, const GroupPartition& partition,
                         const Vector& lambda, int subset_size, int budget,
                         std::uint64_t seed, int threads) {
  const int K = partition.group_count();
  if (subset_size < 1 || subset_size > K)
    throw std::invalid_argument("gre_probe: subset size outside [1, K]");
  if (budget < 1) throw std::invalid_argument("gre_probe: budget < 1");
  if (lambda.size() != K)
    throw std::invalid_argument("gre_probe: lambda length != K");

  constexpr long kEnumerationCap = 10000;
  const long total = count_subsets(K, subset_size, kEnumerationCap);
  const bool exhaustive = total <= kEnumerationCap;

  std::vector<std::vector<int>> subsets;
  if (exhaustive) {
    std::vector<int> subset;
    while (next_subset(subset, K, subset_size)) subsets.push_back(subset);
  } else {
    Rng rng(seed, 0xF00D);
    subsets.reserve(kEnumerationCap);
    for (long i = 0; i < kEnumerationCap; ++i) {
      const int size = 1 + static_cast<int>(rng.uniform_below(subset_size));
      std::vector<int> subset;
      while (static_cast<int>(subset.size()) < size) {
        const int k = static_cast<int>(rng.uniform_below(K));
        if (std::find(subset.begin(), subset.end(), k) == subset.end())
          subset.push_back(k);
      }
      std::sort(subset.begin(), subset.end());
      subsets.push_back(std::move(subset));
    }
  }

  std::vector<SubsetResult> results(subsets.size());
  const auto work = [&](std::size_t i) {
    results[i] = probe_subset(X, partition, lambda, subsets[i], budget, seed,
                              static_cast<std::uint64_t>(i) + 1);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < subsets.size(); ++i) work(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::size_t i = 0; i < subsets.size(); ++i) work(i);
  }

  GreProbeResult out;
  out.subset_size = subset_size;
  out.subsets_examined = static_cast<long>(subsets.size());
  out.exhaustive = exhaustive;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].ratio < best) {
      best = results[i].ratio;
      out.witness = results[i].witness;
    }
  }
  out.kappa_upper = std::isfinite(best) ? std::sqrt(best) : 0.0;
  return out;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

KsResult ks_test(const Vector& residuals) {
  const auto n = residuals.size();
  if (n < 5) throw std::invalid_argument("ks_test: need at least 5 residuals");
  std::vector<double> sorted(residuals.data(), residuals.data() + n);
  std::sort(sorted.begin(), sorted.end());

  double D = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double F = normal_cdf(sorted[i]);
    D = std::max(D, (i + 1.0) / n - F);
    D = std::max(D, F - static_cast<double>(i) / n);
  }

  const double lam = std::sqrt(double(n)) * D;
  double p = 1.0;
  if (lam >= 1e-3) {
    p = 0.0;
    for (int k = 1; k <= 1000000; ++k) {
      const double term = 2.0 * std::exp(-2.0 * k * k * lam * lam);
      p += (k % 2 == 1 ? term : -term);
      if (term < 1e-12) break;
    }
  }
  p = std::min(1.0, std::max(0.0, p));
  return KsResult{D, p};
}

SupportMetrics support_metrics(const std::set<int>& selected,
                               const std::set<int>& true_support, int p) {
  (void)p;
  SupportMetrics m;
  m.abs_diff = std::abs(static_cast<double>(selected.size()) -
                        static_cast<double>(true_support.size()));
  std::size_t hits = 0;
  for (int j : selected)
    if (true_support.count(j)) ++hits;
  m.precision = selected.empty()
                    ? 1.0
                    : static_cast<double>(hits) / selected.size();
  m.recall = true_support.empty()
                 ? 1.0
                 : static_cast<double>(hits) / true_support.size();
  return m;
}

}  // namespace scheds

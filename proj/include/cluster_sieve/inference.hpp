#pragma once

#include <optional>
#include <variant>

#include "cluster_sieve/distributions.hpp"
#include "cluster_sieve/kmeans.hpp"
#include "cluster_sieve/selection.hpp"
#include "cluster_sieve/truncation.hpp"

namespace csieve {

namespace variance {
struct Known {
  double sigma = 1.0;
};
struct PlugInSample {};
struct PlugInMedian {};
struct Unknown {};
}  // namespace variance

using VarianceMode = std::variant<variance::Known, variance::PlugInSample, variance::PlugInMedian, variance::Unknown>;

struct TestRequest {
  Matrix data;
  KMeansConfig kmeans;
  SelectionRule rule = rule::Fixed{};
  VarianceMode variance = variance::Known{};
  /// Condition on the selected pair set as well as the clustering. Only
  /// meaningful for data-dependent rules.
  bool account_selection = false;
};

/// Data plus its K-means trace; the shared starting point of every test.
struct ClusteredData {
  Matrix X;
  KMeansTrace trace;
  ClusterPartition partition;
};

/// Runs K-means on req.data. Throws Error(DegenerateTrace) for NA traces.
ClusteredData cluster(const TestRequest& req);

/// Multi-pair test with sigma known (or plugged in). Statistic
/// ||P_E X||_F / sigma, reference law chi_d truncated to S_sigma (and to
/// S_{sigma,V} when the selection is accounted for).
PValueResult test_known_sigma(const TestRequest& req);
PValueResult test_known_sigma(const ClusteredData& data, const SelectionRule& rule, double sigma,
                              bool account_selection);

/// Single pre-specified pair (k, k'), 0-based.
PValueResult test_pairwise_known(const TestRequest& req, int k, int k_prime);
PValueResult test_pairwise_known(const ClusteredData& data, int k, int k_prime, double sigma);

/// min(|V| * min_{pairs} p_pair, 1) over the fixed pairs of req.rule.
PValueResult test_bonferroni(const TestRequest& req);
PValueResult test_bonferroni(const ClusteredData& data, const std::vector<ClusterPair>& pairs, double sigma);

/// Variance-free test: statistic (||P_E X||^2/d) / (||P_1 X||^2/d*), reference
/// law F(d, d*) truncated to S* (and S*_V).
PValueResult test_unknown_sigma(const TestRequest& req);
PValueResult test_unknown_sigma(const ClusteredData& data, const SelectionRule& rule, bool account_selection);

/// Dispatches on req.variance: Known and the plug-in modes go to
/// test_known_sigma, Unknown to test_unknown_sigma.
PValueResult run_test(const TestRequest& req);

double sigma_hat_sample(const Matrix& X);
double sigma_hat_med(const Matrix& X);
/// Median of chi^2_1, (Phi^{-1}(0.75))^2.
double median_chisq1();

/// The sigma a request resolves to (estimates for plug-in modes).
double resolve_sigma(const VarianceMode& mode, const Matrix& X);

}  // namespace csieve

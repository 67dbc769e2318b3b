#include "cluster_sieve/inference.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace csieve {

namespace {

// Relative tolerance for "statistic lies in its truncation set".
constexpr double kEndpointTolerance = 1e-9;

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lower + upper);
}

bool near_set(const IntervalUnion& set, double x) {
  return set.contains(x) || set.distance_to_boundary(x) <= kEndpointTolerance * std::max(1.0, std::abs(x));
}

PValueResult finish(double statistic, const Family& family, IntervalUnion set, Method method) {
  PValueResult res;
  res.statistic = statistic;
  res.method = method;
  res.df_num = static_cast<int>(family.d1);
  if (family.kind == Family::Kind::FisherF) res.df_den = static_cast<int>(family.d2);
  res.degenerate = !near_set(set, statistic);
  const TailProbability tail = truncated_tail(statistic, TruncatedDistSpec{family, set});
  res.p_value = tail.value;
  res.diagnostics.path = tail.path;
  res.diagnostics.clamped = tail.clamped;
  res.truncation = std::move(set);
  return res;
}

void require_pairs_fit(const std::vector<ClusterPair>& pairs, int K) { validate_pairs(pairs, K); }

}  // namespace

double median_chisq1() {
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.75);
  return z * z;
}

double sigma_hat_sample(const Matrix& X) {
  require(X.rows() >= 2, "sigma_hat_sample needs n >= 2");
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const double ss = (X.rowwise() - mean).squaredNorm();
  return std::sqrt(ss / (static_cast<double>(X.rows() - 1) * static_cast<double>(X.cols())));
}

double sigma_hat_med(const Matrix& X) {
  require(X.rows() >= 1 && X.cols() >= 1, "sigma_hat_med needs a non-empty matrix");
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(X.size()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::vector<double> col(X.col(j).data(), X.col(j).data() + X.rows());
    const double med = median_of(col);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double dev = X(i, j) - med;
      sq.push_back(dev * dev);
    }
  }
  return std::sqrt(median_of(std::move(sq)) / median_chisq1());
}

double resolve_sigma(const VarianceMode& mode, const Matrix& X) {
  if (const auto* k = std::get_if<variance::Known>(&mode)) {
    require(k->sigma > 0.0 && std::isfinite(k->sigma), "known sigma must be positive");
    return k->sigma;
  }
  double est = 0.0;
  if (std::holds_alternative<variance::PlugInSample>(mode)) {
    est = sigma_hat_sample(X);
  } else if (std::holds_alternative<variance::PlugInMedian>(mode)) {
    est = sigma_hat_med(X);
  } else {
    require(false, "unknown-variance mode has no sigma");
  }
  if (!(est > 0.0)) fail(ErrorKind::ZeroStatistic, "estimated sigma is zero");
  return est;
}

ClusteredData cluster(const TestRequest& req) {
  DataMatrix X(req.data);
  KMeansTrace trace = run_kmeans(X, req.kmeans);
  ClusterPartition part = trace.partition();
  return ClusteredData{req.data, std::move(trace), std::move(part)};
}

PValueResult test_known_sigma(const ClusteredData& data, const SelectionRule& rule, double sigma,
                              bool account_selection) {
  const PairSet observed = select_pairs(data.X, data.partition, rule);
  const ProjectionBundle bundle = build_projection(data.partition, observed.pairs, static_cast<int>(data.X.cols()));
  const KnownSigmaDecomposition dec = decompose_known(data.X, bundle, sigma);
  IntervalUnion set = known_sigma_truncation(dec, data.trace);
  const bool selected = account_selection && is_data_dependent(rule);
  if (selected) set = set.intersect(selection_truncation_known(dec, data.partition, observed));

  PValueResult res = finish(dec.statistic, Family::chi(bundle.d), std::move(set),
                            selected ? Method::KnownSigmaSelected : Method::KnownSigma);
  res.diagnostics.sigma_used = sigma;
  res.diagnostics.kmeans_iterations = data.trace.J;
  res.diagnostics.pairs = observed.pairs;
  return res;
}

PValueResult test_pairwise_known(const ClusteredData& data, int k, int k_prime, double sigma) {
  require(k != k_prime, "pairwise test needs two distinct clusters");
  const ClusterPair pair{std::min(k, k_prime), std::max(k, k_prime)};
  PValueResult res = test_known_sigma(data, rule::Fixed{{pair}}, sigma, false);
  res.method = Method::PairwiseKnown;
  return res;
}

PValueResult test_bonferroni(const ClusteredData& data, const std::vector<ClusterPair>& pairs, double sigma) {
  require_pairs_fit(pairs, data.partition.K());
  std::optional<PValueResult> best;
  for (const auto& [k, kp] : pairs) {
    PValueResult p = test_pairwise_known(data, k, kp, sigma);
    if (!best || p.p_value < best->p_value) {
      best = std::move(p);
      best->diagnostics.bonferroni_pair = ClusterPair{k, kp};
    }
  }
  PValueResult res = std::move(*best);
  res.p_value = std::min(1.0, static_cast<double>(pairs.size()) * res.p_value);
  res.method = Method::Bonferroni;
  res.diagnostics.pairs = pairs;
  std::sort(res.diagnostics.pairs.begin(), res.diagnostics.pairs.end());
  return res;
}

PValueResult test_unknown_sigma(const ClusteredData& data, const SelectionRule& rule, bool account_selection) {
  const PairSet observed = select_pairs(data.X, data.partition, rule);
  const ProjectionBundle bundle = build_projection(data.partition, observed.pairs, static_cast<int>(data.X.cols()));
  const UnknownSigmaDecomposition dec = decompose_unknown(data.X, data.partition, bundle);
  IntervalUnion set = unknown_sigma_truncation(dec, data.trace);
  const bool selected = account_selection && is_data_dependent(rule);
  if (selected) set = set.intersect(selection_truncation_unknown(dec, data.partition, observed));

  PValueResult res = finish(dec.statistic, Family::fisher_f(bundle.d, bundle.d_star), std::move(set),
                            selected ? Method::UnknownSigmaSelected : Method::UnknownSigma);
  res.diagnostics.kmeans_iterations = data.trace.J;
  res.diagnostics.pairs = observed.pairs;
  return res;
}

PValueResult test_known_sigma(const TestRequest& req) {
  const double sigma = resolve_sigma(req.variance, req.data);
  PValueResult res = test_known_sigma(cluster(req), req.rule, sigma, req.account_selection);
  res.diagnostics.asymptotic_only = !std::holds_alternative<variance::Known>(req.variance);
  return res;
}

PValueResult test_pairwise_known(const TestRequest& req, int k, int k_prime) {
  const double sigma = resolve_sigma(req.variance, req.data);
  PValueResult res = test_pairwise_known(cluster(req), k, k_prime, sigma);
  res.diagnostics.asymptotic_only = !std::holds_alternative<variance::Known>(req.variance);
  return res;
}

PValueResult test_bonferroni(const TestRequest& req) {
  const auto* fixed = std::get_if<rule::Fixed>(&req.rule);
  require(fixed != nullptr, "the Bonferroni baseline needs a fixed pair set");
  const double sigma = resolve_sigma(req.variance, req.data);
  PValueResult res = test_bonferroni(cluster(req), fixed->pairs, sigma);
  res.diagnostics.asymptotic_only = !std::holds_alternative<variance::Known>(req.variance);
  return res;
}

PValueResult test_unknown_sigma(const TestRequest& req) {
  return test_unknown_sigma(cluster(req), req.rule, req.account_selection);
}

PValueResult run_test(const TestRequest& req) {
  if (std::holds_alternative<variance::Unknown>(req.variance)) return test_unknown_sigma(req);
  return test_known_sigma(req);
}

}  // namespace csieve

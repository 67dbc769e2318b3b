#include "cluster_sieve/kmeans.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace csieve {

namespace {

Matrix cluster_means(const Matrix& A, const std::vector<int>& labels, int K) {
  Matrix means = Matrix::Zero(K, A.cols());
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    means.row(l) += A.row(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int l = 0; l < K; ++l) {
    if (counts[static_cast<std::size_t>(l)] > 0) means.row(l) /= counts[static_cast<std::size_t>(l)];
  }
  return means;
}

bool all_clusters_used(const std::vector<int>& labels, int K) {
  std::vector<char> seen(static_cast<std::size_t>(K), 0);
  for (int l : labels) seen[static_cast<std::size_t>(l)] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

Matrix rows_of(const Matrix& A, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), A.cols());
  for (std::size_t l = 0; l < idx.size(); ++l) out.row(static_cast<Eigen::Index>(l)) = A.row(idx[l]);
  return out;
}

}  // namespace

std::vector<int> assign_nearest(const Matrix& A, const Matrix& centers) {
  std::vector<int> labels(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    int best = 0;
    double best_d = (A.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index l = 1; l < centers.rows(); ++l) {
      const double d = (A.row(i) - centers.row(l)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(l);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

std::vector<int> draw_initial_rows(int n, int K, std::uint64_t seed) {
  require(K >= 1 && K <= n, "need 1 <= K <= n");
  std::mt19937_64 rng(seed);
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates; std::shuffle/sample are not portable across
  // standard libraries and traces must be reproducible from the seed.
  for (int l = 0; l < K; ++l) {
    const auto span = static_cast<std::uint64_t>(n - l);
    const auto pick = static_cast<int>(rng() % span) + l;
    std::swap(all[static_cast<std::size_t>(l)], all[static_cast<std::size_t>(pick)]);
  }
  return {all.begin(), all.begin() + K};
}

namespace {

// Shared by run_kmeans and replay. `expected` (if given) aborts on the first
// step that disagrees with it.
bool lloyd(const Matrix& A, const std::vector<int>& init, int K, int max_iter,
           const KMeansTrace* expected, KMeansTrace* out) {
  std::vector<std::vector<int>> steps;
  std::vector<int> labels = assign_nearest(A, rows_of(A, init));
  const auto matches = [&](std::size_t j, const std::vector<int>& lab) {
    return expected == nullptr || (j < expected->assignments.size() && expected->assignments[j] == lab);
  };
  if (!all_clusters_used(labels, K)) {
    if (expected) return false;
    fail(ErrorKind::DegenerateTrace, "K-means initial assignment left a cluster empty");
  }
  if (!matches(0, labels)) return false;
  steps.push_back(labels);

  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix centers = cluster_means(A, labels, K);
    std::vector<int> next = assign_nearest(A, centers);
    if (!all_clusters_used(next, K)) {
      if (expected) return false;
      fail(ErrorKind::DegenerateTrace, "K-means iteration " + std::to_string(it) + " left a cluster empty");
    }
    if (!matches(static_cast<std::size_t>(it), next)) return false;
    converged = next == labels;
    steps.push_back(std::move(next));
    labels = steps.back();
    if (converged) break;
  }
  if (expected) return steps.size() == expected->assignments.size();
  out->init_indices = init;
  out->assignments = std::move(steps);
  out->J = static_cast<int>(out->assignments.size()) - 1;
  out->converged = converged;
  out->K = K;
  return true;
}

}  // namespace

KMeansTrace run_kmeans(const DataMatrix& X, const KMeansConfig& cfg) {
  const int n = static_cast<int>(X.rows());
  require(cfg.K >= 1 && cfg.K <= n, "K must satisfy 1 <= K <= n");
  require(cfg.max_iter >= 1, "max_iter must be at least 1");
  std::vector<int> init;
  if (const auto* ex = std::get_if<ExplicitIndices>(&cfg.init)) {
    init = ex->rows;
    require(static_cast<int>(init.size()) == cfg.K, "need exactly K initial rows");
    std::set<int> distinct(init.begin(), init.end());
    require(distinct.size() == init.size(), "initial rows must be distinct");
    for (int r : init) require(r >= 0 && r < n, "initial row out of range");
  } else {
    init = draw_initial_rows(n, cfg.K, cfg.seed);
  }
  KMeansTrace trace;
  lloyd(X.values(), init, cfg.K, cfg.max_iter, nullptr, &trace);
  return trace;
}

Matrix centroids_at(const Matrix& A, const KMeansTrace& trace, int j) {
  require(j >= 1 && j <= trace.J, "step index out of range");
  return cluster_means(A, trace.assignments[static_cast<std::size_t>(j - 1)], trace.K);
}

Vector centroid_of(const Matrix& A, const KMeansTrace& trace, int l, int j) {
  require(l >= 0 && l < trace.K, "cluster index out of range");
  require(j >= 1 && j <= trace.J, "step index out of range");
  require(static_cast<std::size_t>(A.rows()) == trace.n(), "row count mismatch");
  const auto& labels = trace.assignments[static_cast<std::size_t>(j - 1)];
  Vector sum = Vector::Zero(A.cols());
  int count = 0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] == l) {
      sum += A.row(static_cast<Eigen::Index>(s)).transpose();
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::DegenerateTrace, "centroid of an empty cluster");
  return sum / count;
}

bool replay_matches(const Matrix& A, const KMeansTrace& trace) {
  require(static_cast<std::size_t>(A.rows()) == trace.n(), "row count mismatch");
  // J steps were taken; a converged trace stopped early, otherwise the cap hit.
  const int max_iter = trace.J;
  return lloyd(A, trace.init_indices, trace.K, std::max(max_iter, 0), &trace, nullptr);
}

double within_cluster_ss(const Matrix& A, const std::vector<int>& labels, int K) {
  const Matrix means = cluster_means(A, labels, K);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    ss += (A.row(i) - means.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return ss;
}

}  // namespace csieve

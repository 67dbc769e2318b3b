#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "cluster_sieve/core.hpp"

namespace csieve {

struct SeededRandomRows {};
struct ExplicitIndices {
  std::vector<int> rows;  // 0-based
};

struct KMeansConfig {
  int K = 2;
  int max_iter = 50;
  std::uint64_t seed = 0;
  std::variant<SeededRandomRows, ExplicitIndices> init = SeededRandomRows{};
};

/// Every assignment made by Lloyd's algorithm, step 0 (nearest initial
/// centre) through step J. Row j of `assignments` holds c^(j).
struct KMeansTrace {
  std::vector<int> init_indices;
  std::vector<std::vector<int>> assignments;
  int J = 0;
  bool converged = false;
  int K = 0;

  std::size_t n() const { return assignments.front().size(); }
  const std::vector<int>& final_labels() const { return assignments.back(); }
  ClusterPartition partition() const { return ClusterPartition(final_labels(), K); }
};

/// Lloyd's algorithm started from K rows of X. Throws
/// Error(DegenerateTrace) if any step leaves a cluster empty.
KMeansTrace run_kmeans(const DataMatrix& X, const KMeansConfig& cfg);

/// K distinct row indices drawn uniformly without replacement.
std::vector<int> draw_initial_rows(int n, int K, std::uint64_t seed);

/// M_l^(j-1)(A): mean of the rows of A carrying label l at step j-1.
Vector centroid_of(const Matrix& A, const KMeansTrace& trace, int l, int j);

/// All K step-(j-1) centroids of A as a K x q matrix.
Matrix centroids_at(const Matrix& A, const KMeansTrace& trace, int j);

/// Re-run Lloyd's algorithm on A from the traced initial rows and report
/// whether every step reproduces the traced assignment.
bool replay_matches(const Matrix& A, const KMeansTrace& trace);

/// Nearest-centre assignment with ties going to the lower cluster index.
std::vector<int> assign_nearest(const Matrix& A, const Matrix& centers);

double within_cluster_ss(const Matrix& A, const std::vector<int>& labels, int K);

}  // namespace csieve

#pragma once

#include <utility>
#include <vector>

#include "cluster_sieve/core.hpp"

namespace csieve {

using ClusterPair = std::pair<int, int>;  // (k, k'), 0-based, k < k'

/// Every pair k < k' over K clusters, lexicographic.
std::vector<ClusterPair> all_pairs(int K);
/// (k, k+1) for k = 0..K-2.
std::vector<ClusterPair> chain_pairs(int K);
/// (0, k) for k = 1..K-1.
std::vector<ClusterPair> star_pairs(int K);

/// v_{k,k'} = 1_{C_k}/|C_k| - 1_{C_k'}/|C_k'|.
Vector contrast_vector(const ClusterPartition& part, int k, int k_prime);

/// Orthonormal basis of E = span{v_{k,k'} : (k,k') in V} together with the
/// degree-of-freedom bookkeeping shared by the known- and unknown-variance
/// tests.
struct ProjectionBundle {
  Matrix basis;              // n x r, orthonormal columns
  int r = 0;                 // dim(E)
  std::vector<int> touched;  // clusters appearing in V, sorted
  int d = 0;                 // q * r
  int d_star = 0;            // q * (sum_{k touched} |C_k| - |touched|)
  double r_star = 0.0;       // d_star / d
};

/// Throws Error(InvalidArgument) for malformed pair lists. d_star may be 0;
/// callers needing a within-cluster estimate check it themselves.
ProjectionBundle build_projection(const ClusterPartition& part, const std::vector<ClusterPair>& pairs,
                                  int q);

void validate_pairs(const std::vector<ClusterPair>& pairs, int K);

Matrix apply_PE(const ProjectionBundle& bundle, const Matrix& A);
Matrix apply_PE_perp(const ProjectionBundle& bundle, const Matrix& A);
/// Centre rows within each touched cluster; rows of other clusters are zero.
Matrix apply_P1(const ClusterPartition& part, const std::vector<int>& touched, const Matrix& A);
Matrix apply_P2(const ProjectionBundle& bundle, const ClusterPartition& part, const Matrix& A);

}  // namespace csieve

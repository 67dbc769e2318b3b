#include "cluster_sieve/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace csieve {

std::vector<ClusterPair> all_pairs(int K) {
  std::vector<ClusterPair> out;
  for (int k = 0; k < K; ++k) {
    for (int kp = k + 1; kp < K; ++kp) out.emplace_back(k, kp);
  }
  return out;
}

std::vector<ClusterPair> chain_pairs(int K) {
  std::vector<ClusterPair> out;
  for (int k = 0; k + 1 < K; ++k) out.emplace_back(k, k + 1);
  return out;
}

std::vector<ClusterPair> star_pairs(int K) {
  std::vector<ClusterPair> out;
  for (int k = 1; k < K; ++k) out.emplace_back(0, k);
  return out;
}

Vector contrast_vector(const ClusterPartition& part, int k, int k_prime) {
  require(k != k_prime, "contrast needs two distinct clusters");
  require(k >= 0 && k < part.K() && k_prime >= 0 && k_prime < part.K(), "cluster index out of range");
  const double wk = 1.0 / part.size(k);
  const double wkp = 1.0 / part.size(k_prime);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(part.n()));
  for (std::size_t i = 0; i < part.n(); ++i) {
    if (part.label(i) == k) {
      v(static_cast<Eigen::Index>(i)) = wk;
    } else if (part.label(i) == k_prime) {
      v(static_cast<Eigen::Index>(i)) = -wkp;
    }
  }
  return v;
}

void validate_pairs(const std::vector<ClusterPair>& pairs, int K) {
  require(!pairs.empty(), "pair set is empty");
  std::set<ClusterPair> seen;
  for (const auto& [k, kp] : pairs) {
    require(k >= 0 && kp < K && k < kp, "pair indices must satisfy 0 <= k < k' < K");
    require(seen.insert({k, kp}).second, "duplicate pair in pair set");
  }
}

ProjectionBundle build_projection(const ClusterPartition& part, const std::vector<ClusterPair>& pairs,
                                  int q) {
  const int K = part.K();
  validate_pairs(pairs, K);
  require(q >= 1, "q must be positive");
  const auto n = static_cast<Eigen::Index>(part.n());

  ProjectionBundle b;
  if (pairs.size() == static_cast<std::size_t>(K * (K - 1) / 2)) {
    // The chain v_{k,k+1} is a basis of E when V = V_all.
    Matrix chain(n, K - 1);
    for (int k = 0; k + 1 < K; ++k) chain.col(k) = contrast_vector(part, k, k + 1);
    Eigen::HouseholderQR<Matrix> qr(chain);
    b.basis = qr.householderQ() * Matrix::Identity(n, K - 1);
  } else {
    Matrix stacked(n, static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      stacked.col(static_cast<Eigen::Index>(c)) = contrast_vector(part, pairs[c].first, pairs[c].second);
    }
    Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = static_cast<double>(std::max<Eigen::Index>(n, stacked.cols())) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    b.basis = svd.matrixU().leftCols(rank);
  }
  b.r = static_cast<int>(b.basis.cols());

  std::set<int> touched;
  for (const auto& [k, kp] : pairs) {
    touched.insert(k);
    touched.insert(kp);
  }
  b.touched.assign(touched.begin(), touched.end());
  int within = 0;
  for (int k : b.touched) within += part.size(k) - 1;
  b.d = q * b.r;
  b.d_star = q * within;
  b.r_star = static_cast<double>(b.d_star) / b.d;
  return b;
}

Matrix apply_PE(const ProjectionBundle& bundle, const Matrix& A) {
  require(A.rows() == bundle.basis.rows(), "row count mismatch");
  return bundle.basis * (bundle.basis.transpose() * A);
}

Matrix apply_PE_perp(const ProjectionBundle& bundle, const Matrix& A) { return A - apply_PE(bundle, A); }

Matrix apply_P1(const ClusterPartition& part, const std::vector<int>& touched, const Matrix& A) {
  require(static_cast<std::size_t>(A.rows()) == part.n(), "row count mismatch");
  const int K = part.K();
  std::vector<char> is_touched(static_cast<std::size_t>(K), 0);
  for (int k : touched) {
    require(k >= 0 && k < K, "touched cluster out of range");
    is_touched[static_cast<std::size_t>(k)] = 1;
  }
  Matrix means = Matrix::Zero(K, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) means.row(part.label(static_cast<std::size_t>(i))) += A.row(i);
  for (int k = 0; k < K; ++k) means.row(k) /= part.size(k);

  Matrix out = Matrix::Zero(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const int k = part.label(static_cast<std::size_t>(i));
    if (is_touched[static_cast<std::size_t>(k)]) out.row(i) = A.row(i) - means.row(k);
  }
  return out;
}

Matrix apply_P2(const ProjectionBundle& bundle, const ClusterPartition& part, const Matrix& A) {
  return A - apply_PE(bundle, A) - apply_P1(part, bundle.touched, A);
}

}  // namespace csieve

#pragma once

#include <variant>
#include <vector>

#include "cluster_sieve/projection.hpp"

namespace csieve {

namespace rule {
struct Fixed {
  std::vector<ClusterPair> pairs;
};
/// Pairs whose centres are among the g farthest apart.
struct TopG {
  int g = 1;
};
/// Pairs whose centres are among the g closest.
struct BottomG {
  int g = 1;
};
/// Pairs whose centre distance is at most t.
struct ThresholdBelow {
  double t = 1.0;
};
/// Pairs whose centre distance is at least t.
struct ThresholdAbove {
  double t = 1.0;
};
}  // namespace rule

using SelectionRule =
    std::variant<rule::Fixed, rule::TopG, rule::BottomG, rule::ThresholdBelow, rule::ThresholdAbove>;

inline bool is_data_dependent(const SelectionRule& r) { return !std::holds_alternative<rule::Fixed>(r); }

void validate_rule(const SelectionRule& r, int K);

struct PairSet {
  std::vector<ClusterPair> pairs;  // lexicographic order
  SelectionRule rule;
  int K = 0;
};

/// Squared distance ||A^T v_{k,k'}||^2 between the centres of A's clusters,
/// one entry per pair of all_pairs(K).
std::vector<double> center_sq_distances(const Matrix& A, const ClusterPartition& part);

/// Apply `r` to A under the fixed partition. Ties at the rank-g boundary are
/// all included. Throws Error(EmptySelection) when nothing is chosen.
PairSet select_pairs(const Matrix& A, const ClusterPartition& part, const SelectionRule& r);

}  // namespace csieve

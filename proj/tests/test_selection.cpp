#include <doctest.h>

#include <random>

#include "cluster_sieve/selection.hpp"
#include "oracles.hpp"

using namespace csieve;

namespace {

// One observation per cluster at each of the given 1-D positions, plus a
// second copy so every cluster has two members.
std::pair<Matrix, ClusterPartition> line_centres(const std::vector<double>& centres) {
  const int K = static_cast<int>(centres.size());
  Matrix A(2 * K, 1);
  std::vector<int> labels;
  for (int k = 0; k < K; ++k) {
    A(2 * k, 0) = centres[static_cast<std::size_t>(k)] - 0.1;
    A(2 * k + 1, 0) = centres[static_cast<std::size_t>(k)] + 0.1;
    labels.push_back(k);
    labels.push_back(k);
  }
  return {A, ClusterPartition(labels, K)};
}

std::set<int> as_indices(const PairSet& s) {
  const auto all = all_pairs(s.K);
  std::set<int> out;
  for (const auto& p : s.pairs) out.insert(static_cast<int>(std::find(all.begin(), all.end(), p) - all.begin()));
  return out;
}

}  // namespace

TEST_CASE("rank and threshold rules on 1-D centres") {
  const auto [A, part] = line_centres({0, 1, 10});
  CHECK(select_pairs(A, part, rule::TopG{1}).pairs == std::vector<ClusterPair>{{0, 2}});
  CHECK(select_pairs(A, part, rule::BottomG{1}).pairs == std::vector<ClusterPair>{{0, 1}});
  CHECK(select_pairs(A, part, rule::ThresholdBelow{2}).pairs == std::vector<ClusterPair>{{0, 1}});
  CHECK(select_pairs(A, part, rule::ThresholdAbove{9.5}).pairs == std::vector<ClusterPair>{{0, 2}});
  CHECK(select_pairs(A, part, rule::TopG{3}).pairs == all_pairs(3));
}

TEST_CASE("fixed pairs pass through") {
  const auto [A, part] = line_centres({0, 1, 10});
  CHECK(select_pairs(A, part, rule::Fixed{{{1, 2}, {0, 1}}}).pairs == std::vector<ClusterPair>{{0, 1}, {1, 2}});
}

TEST_CASE("empty selections are reported") {
  const auto [A, part] = line_centres({0, 1, 10});
  try {
    select_pairs(A, part, rule::ThresholdAbove{100});
    FAIL("expected an empty selection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySelection);
  }
}

TEST_CASE("ties at the rank boundary are all kept") {
  const auto [A, part] = line_centres({0, 1, 2});
  CHECK(select_pairs(A, part, rule::BottomG{1}).pairs.size() == 2);
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(validate_rule(rule::TopG{0}, 3), Error);
  CHECK_THROWS_AS(validate_rule(rule::TopG{4}, 3), Error);
  CHECK_THROWS_AS(validate_rule(rule::ThresholdBelow{0.0}, 3), Error);
  CHECK_NOTHROW(validate_rule(rule::BottomG{3}, 3));
}

TEST_CASE("random selections match an independent ranking") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + trial % 5;
    const int n = 3 * K;
    Matrix A(n, 2);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      A(i, 0) = z(rng);
      A(i, 1) = z(rng);
      labels.push_back(i % K);
    }
    const ClusterPartition part(labels, K);
    const int m = K * (K - 1) / 2;
    const int g = 1 + trial % m;
    const auto d2 = oracle::center_distances(A, labels, K);
    const double t = std::sqrt(d2[static_cast<std::size_t>(trial) % d2.size()]) * 1.01;
    for (const SelectionRule& r : std::vector<SelectionRule>{rule::TopG{g}, rule::BottomG{g}, rule::ThresholdBelow{t}}) {
      CHECK(as_indices(select_pairs(A, part, r)) == oracle::selected_indices(d2, r));
    }
  }
}

TEST_CASE("rank rules are scale invariant and complementary") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 4;
    Matrix A(12, 2);
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
      A(i, 0) = z(rng);
      A(i, 1) = z(rng);
      labels.push_back(i % K);
    }
    const ClusterPartition part(labels, K);
    const int g = 1 + trial % 5;
    const auto top = select_pairs(A, part, rule::TopG{g});
    CHECK(select_pairs(3.7 * A, part, rule::TopG{g}).pairs == top.pairs);
    CHECK(select_pairs(0.2 * A, part, rule::BottomG{g}).pairs == select_pairs(A, part, rule::BottomG{g}).pairs);

    auto top_idx = as_indices(top);
    const auto bottom_idx = as_indices(select_pairs(A, part, rule::BottomG{6 - g}));
    CHECK(top_idx.size() + bottom_idx.size() == 6);
    top_idx.insert(bottom_idx.begin(), bottom_idx.end());
    CHECK(top_idx.size() == 6);
  }
}

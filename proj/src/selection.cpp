#include "cluster_sieve/selection.hpp"

#include <algorithm>
#include <functional>

namespace csieve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate_rule(const SelectionRule& r, int K) {
  const int total = K * (K - 1) / 2;
  std::visit(overloaded{
                 [&](const rule::Fixed& f) { validate_pairs(f.pairs, K); },
                 [&](const rule::TopG& s) { require(s.g >= 1 && s.g <= total, "g must lie in [1, K(K-1)/2]"); },
                 [&](const rule::BottomG& s) { require(s.g >= 1 && s.g <= total, "g must lie in [1, K(K-1)/2]"); },
                 [&](const rule::ThresholdBelow& s) { require(s.t > 0.0, "threshold must be positive"); },
                 [&](const rule::ThresholdAbove& s) { require(s.t > 0.0, "threshold must be positive"); },
             },
             r);
}

std::vector<double> center_sq_distances(const Matrix& A, const ClusterPartition& part) {
  const int K = part.K();
  Matrix means = Matrix::Zero(K, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) means.row(part.label(static_cast<std::size_t>(i))) += A.row(i);
  for (int k = 0; k < K; ++k) means.row(k) /= part.size(k);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K * (K - 1) / 2));
  for (int k = 0; k < K; ++k) {
    for (int kp = k + 1; kp < K; ++kp) out.push_back((means.row(k) - means.row(kp)).squaredNorm());
  }
  return out;
}

PairSet select_pairs(const Matrix& A, const ClusterPartition& part, const SelectionRule& r) {
  const int K = part.K();
  require(static_cast<std::size_t>(A.rows()) == part.n(), "row count mismatch");
  validate_rule(r, K);
  PairSet out{{}, r, K};

  if (const auto* f = std::get_if<rule::Fixed>(&r)) {
    out.pairs = f->pairs;
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
  }

  const auto pairs = all_pairs(K);
  const auto dist = center_sq_distances(A, part);
  std::function<bool(double)> keep;
  std::visit(overloaded{
                 [](const rule::Fixed&) {},
                 [&](const rule::TopG& s) {
                   auto sorted = dist;
                   std::sort(sorted.begin(), sorted.end(), std::greater<>());
                   const double cut = sorted[static_cast<std::size_t>(s.g - 1)];
                   keep = [cut](double x) { return x >= cut; };
                 },
                 [&](const rule::BottomG& s) {
                   auto sorted = dist;
                   std::sort(sorted.begin(), sorted.end());
                   const double cut = sorted[static_cast<std::size_t>(s.g - 1)];
                   keep = [cut](double x) { return x <= cut; };
                 },
                 [&](const rule::ThresholdBelow& s) {
                   const double cut = s.t * s.t;
                   keep = [cut](double x) { return x <= cut; };
                 },
                 [&](const rule::ThresholdAbove& s) {
                   const double cut = s.t * s.t;
                   keep = [cut](double x) { return x >= cut; };
                 },
             },
             r);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (keep(dist[p])) out.pairs.push_back(pairs[p]);
  }
  if (out.pairs.empty()) fail(ErrorKind::EmptySelection, "selection rule chose no pair of clusters");
  return out;
}

}  // namespace csieve

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cluster_sieve/error.hpp"

namespace csieve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// n x q observation matrix, rows are observations. All entries finite,
/// n >= 2 and q >= 1.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// Hard assignment of n observations to K clusters (0-based labels).
class ClusterPartition {
 public:
  ClusterPartition(std::vector<int> labels, int K);

  int K() const noexcept { return K_; }
  std::size_t n() const noexcept { return labels_.size(); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  int size(int k) const { return sizes_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& sizes() const noexcept { return sizes_; }

 private:
  std::vector<int> labels_;
  std::vector<int> sizes_;
  int K_;
};

struct Interval {
  double lo = 0.0;
  double hi = kInf;
  bool lo_closed = true;
  bool hi_closed = true;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of disjoint intervals on [0, inf). Always stored in
/// canonical form: sorted, pairwise disjoint, gaps below
/// kMergeTolerance merged away, nothing below zero.
class IntervalUnion {
 public:
  static constexpr double kMergeTolerance = 1e-12;

  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> intervals);

  static IntervalUnion empty() { return {}; }
  static IntervalUnion half_line() { return IntervalUnion({Interval{}}); }
  static IntervalUnion closed(double lo, double hi) {
    return IntervalUnion({Interval{lo, hi, true, true}});
  }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool is_empty() const noexcept { return intervals_.empty(); }
  std::size_t size() const noexcept { return intervals_.size(); }
  double infimum() const;
  double supremum() const;

  bool contains(double x) const;
  /// Distance from x to the nearest endpoint (inf when there are none).
  double distance_to_boundary(double x) const;

  IntervalUnion intersect(const IntervalUnion& other) const;
  IntervalUnion unite(const IntervalUnion& other) const;
  /// Complement relative to [0, inf).
  IntervalUnion complement() const;

  /// Sum over intervals of survival(lo) - survival(hi), clamped to [0, 1].
  /// `survival` must be decreasing with survival(0) = 1; survival(inf) is
  /// taken as 0 without calling it.
  double measure_under(const std::function<double(double)>& survival) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> intervals_;
};

IntervalUnion intersect_all(const std::vector<IntervalUnion>& sets);

std::string to_string(const IntervalUnion& set);

enum class Method {
  KnownSigma,
  KnownSigmaSelected,
  Bonferroni,
  UnknownSigma,
  UnknownSigmaSelected,
  PairwiseKnown,
};

std::string_view to_string(Method method);

enum class EvaluationPath { Exact, ChiSquareApprox };

std::string_view to_string(EvaluationPath path);

struct Diagnostics {
  EvaluationPath path = EvaluationPath::Exact;
  bool clamped = false;          // raw p-value left [0,1] by more than 1e-9
  bool asymptotic_only = false;  // plug-in variance estimate was used
  std::optional<double> sigma_used;
  std::optional<std::pair<int, int>> bonferroni_pair;
  int kmeans_iterations = 0;
  std::vector<std::pair<int, int>> pairs;  // V(X), 0-based
};

struct PValueResult {
  double statistic = 0.0;
  int df_num = 0;
  std::optional<int> df_den;
  IntervalUnion truncation;
  double p_value = 1.0;
  Method method = Method::KnownSigma;
  // The observed statistic fell outside the computed truncation set by more
  // than the endpoint tolerance; the p-value is still reported.
  bool degenerate = false;
  Diagnostics diagnostics;
};

}  // namespace csieve

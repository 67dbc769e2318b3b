#include "cluster_sieve/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace csieve {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::DegenerateTrace: return "degenerate_trace";
    case ErrorKind::DegenerateWithin: return "degenerate_within";
    case ErrorKind::ZeroStatistic: return "zero_statistic";
    case ErrorKind::ZeroMassSet: return "zero_mass_set";
    case ErrorKind::EmptySelection: return "empty_selection";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::KnownSigma: return "known_sigma";
    case Method::KnownSigmaSelected: return "known_sigma_selected";
    case Method::Bonferroni: return "bonferroni";
    case Method::UnknownSigma: return "unknown_sigma";
    case Method::UnknownSigmaSelected: return "unknown_sigma_selected";
    case Method::PairwiseKnown: return "pairwise_known";
  }
  return "unknown";
}

std::string_view to_string(EvaluationPath path) {
  return path == EvaluationPath::Exact ? "exact" : "chisq_approx";
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.rows() >= 2, "data matrix needs at least 2 rows");
  require(values_.cols() >= 1, "data matrix needs at least 1 column");
  require(values_.allFinite(), "data matrix contains non-finite entries");
}

ClusterPartition::ClusterPartition(std::vector<int> labels, int K)
    : labels_(std::move(labels)), sizes_(static_cast<std::size_t>(std::max(K, 0)), 0), K_(K) {
  require(K >= 1, "cluster count must be positive");
  for (int l : labels_) {
    require(l >= 0 && l < K, "cluster label out of range");
    ++sizes_[static_cast<std::size_t>(l)];
  }
  for (int s : sizes_) require(s >= 1, "partition has an empty cluster");
}

// ---------------------------------------------------------------------------
// IntervalUnion

namespace {

bool nonempty(const Interval& iv) {
  if (iv.lo < iv.hi) return true;
  return iv.lo == iv.hi && iv.lo_closed && iv.hi_closed;
}

}  // namespace

IntervalUnion::IntervalUnion(std::vector<Interval> intervals) {
  for (auto& iv : intervals) {
    require(!std::isnan(iv.lo) && !std::isnan(iv.hi), "interval endpoint is NaN");
    require(iv.lo <= iv.hi, "interval has lo > hi");
    if (iv.hi < 0.0) continue;
    if (iv.lo < 0.0) {
      iv.lo = 0.0;
      iv.lo_closed = true;
    }
    if (std::isinf(iv.hi)) iv.hi_closed = false;
    if (nonempty(iv)) intervals_.push_back(iv);
  }
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });

  std::vector<Interval> merged;
  merged.reserve(intervals_.size());
  for (const auto& iv : intervals_) {
    if (!merged.empty()) {
      Interval& last = merged.back();
      if (iv.lo - last.hi < kMergeTolerance) {
        if (iv.hi > last.hi) {
          last.hi = iv.hi;
          last.hi_closed = iv.hi_closed;
        } else if (iv.hi == last.hi) {
          last.hi_closed = last.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    merged.push_back(iv);
  }
  intervals_ = std::move(merged);
}

double IntervalUnion::infimum() const {
  require(!is_empty(), "infimum of an empty set");
  return intervals_.front().lo;
}

double IntervalUnion::supremum() const {
  require(!is_empty(), "supremum of an empty set");
  return intervals_.back().hi;
}

bool IntervalUnion::contains(double x) const {
  // First interval whose hi is >= x.
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  if (it == intervals_.end()) return false;
  const Interval& iv = *it;
  const bool above_lo = iv.lo_closed ? x >= iv.lo : x > iv.lo;
  const bool below_hi = iv.hi_closed ? x <= iv.hi : x < iv.hi;
  return above_lo && below_hi;
}

double IntervalUnion::distance_to_boundary(double x) const {
  double best = kInf;
  for (const auto& iv : intervals_) {
    best = std::min(best, std::abs(x - iv.lo));
    if (std::isfinite(iv.hi)) best = std::min(best, std::abs(x - iv.hi));
  }
  return best;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    Interval iv;
    if (a[i].lo > b[j].lo) {
      iv.lo = a[i].lo;
      iv.lo_closed = a[i].lo_closed;
    } else if (a[i].lo < b[j].lo) {
      iv.lo = b[j].lo;
      iv.lo_closed = b[j].lo_closed;
    } else {
      iv.lo = a[i].lo;
      iv.lo_closed = a[i].lo_closed && b[j].lo_closed;
    }
    if (a[i].hi < b[j].hi) {
      iv.hi = a[i].hi;
      iv.hi_closed = a[i].hi_closed;
    } else if (a[i].hi > b[j].hi) {
      iv.hi = b[j].hi;
      iv.hi_closed = b[j].hi_closed;
    } else {
      iv.hi = a[i].hi;
      iv.hi_closed = a[i].hi_closed && b[j].hi_closed;
    }
    if (iv.lo <= iv.hi && nonempty(iv)) out.push_back(iv);
    if (a[i].hi < b[j].hi) {
      ++i;
    } else if (a[i].hi > b[j].hi) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return IntervalUnion(std::move(all));
}

IntervalUnion IntervalUnion::complement() const {
  std::vector<Interval> out;
  double cursor = 0.0;
  bool cursor_closed = true;
  for (const auto& iv : intervals_) {
    if (iv.lo > cursor || (iv.lo == cursor && cursor_closed && !iv.lo_closed)) {
      out.push_back(Interval{cursor, iv.lo, cursor_closed, !iv.lo_closed});
    }
    cursor = iv.hi;
    cursor_closed = !iv.hi_closed;
  }
  if (std::isfinite(cursor)) out.push_back(Interval{cursor, kInf, cursor_closed, false});
  return IntervalUnion(std::move(out));
}

double IntervalUnion::measure_under(const std::function<double(double)>& survival) const {
  double total = 0.0;
  for (const auto& iv : intervals_) {
    require(iv.lo <= iv.hi, "interval has lo > hi");
    const double upper = std::isinf(iv.hi) ? 0.0 : survival(iv.hi);
    total += survival(iv.lo) - upper;
  }
  return std::clamp(total, 0.0, 1.0);
}

IntervalUnion intersect_all(const std::vector<IntervalUnion>& sets) {
  IntervalUnion acc = IntervalUnion::half_line();
  for (const auto& s : sets) {
    acc = acc.intersect(s);
    if (acc.is_empty()) break;
  }
  return acc;
}

std::string to_string(const IntervalUnion& set) {
  if (set.is_empty()) return "{}";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& iv : set.intervals()) {
    if (!first) os << " U ";
    first = false;
    os << (iv.lo_closed ? '[' : '(') << iv.lo << ", ";
    if (std::isinf(iv.hi)) {
      os << "inf";
    } else {
      os << iv.hi;
    }
    os << (iv.hi_closed ? ']' : ')');
  }
  return os.str();
}

}  // namespace csieve

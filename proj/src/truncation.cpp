#include "cluster_sieve/truncation.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <complex>

namespace csieve {

// ---------------------------------------------------------------------------
// Scalar inequality solvers

double SqrtCoeffs::operator()(double psi) const { return in_root(std::sqrt(std::max(psi, 0.0))); }

double SqrtCoeffs::in_root(double y) const {
  const double s = std::sqrt(y * y + r_star);
  const auto& l = lambda;
  return l[0] * y * y + l[1] * y + l[2] * y * s + l[3] * s + l[4];
}

SqrtCoeffs SqrtCoeffs::operator-(const SqrtCoeffs& o) const {
  SqrtCoeffs out;
  for (std::size_t k = 0; k < 5; ++k) out.lambda[k] = lambda[k] - o.lambda[k];
  out.r_star = r_star;
  return out;
}

IntervalUnion solve_quad_leq(const QuadCoeffs& c) {
  require(std::isfinite(c.a) && std::isfinite(c.b) && std::isfinite(c.c), "non-finite quadratic coefficient");
  if (c.a == 0.0) {
    if (c.b == 0.0) return c.c <= 0.0 ? IntervalUnion::half_line() : IntervalUnion::empty();
    const double root = -c.c / c.b;
    if (c.b > 0.0) return root < 0.0 ? IntervalUnion::empty() : IntervalUnion({Interval{0.0, root, true, true}});
    return IntervalUnion({Interval{root, kInf, true, false}});
  }
  const double disc = c.b * c.b - 4.0 * c.a * c.c;
  if (disc < 0.0) return c.a > 0.0 ? IntervalUnion::empty() : IntervalUnion::half_line();
  // Cancellation-free pair of roots.
  const double sq = std::sqrt(disc);
  const double qv = -0.5 * (c.b + std::copysign(sq, c.b));
  double r1 = qv / c.a;
  double r2 = qv != 0.0 ? c.c / qv : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (c.a > 0.0) return r2 < 0.0 ? IntervalUnion::empty() : IntervalUnion({Interval{r1, r2, true, true}});
  return IntervalUnion({Interval{-kInf, r1, true, true}, Interval{r2, kInf, true, false}});
}

namespace {

// Real, non-negative candidate roots of g(y) = 0 via the squared-out quartic.
std::vector<double> quartic_candidates(const SqrtCoeffs& c, double scale) {
  const double r = c.r_star;
  std::array<double, 5> l{};
  for (std::size_t k = 0; k < 5; ++k) l[k] = c.lambda[k] / scale;
  // Ascending powers of y.
  std::array<double, 5> poly = {
      l[3] * l[3] * r - l[4] * l[4],
      2.0 * (l[2] * l[3] * r - l[1] * l[4]),
      l[3] * l[3] + l[2] * l[2] * r - l[1] * l[1] - 2.0 * l[0] * l[4],
      2.0 * (l[2] * l[3] - l[0] * l[1]),
      l[2] * l[2] - l[0] * l[0],
  };
  double pmax = 0.0;
  for (double p : poly) pmax = std::max(pmax, std::abs(p));
  if (pmax == 0.0) return {};
  int degree = 4;
  while (degree > 0 && std::abs(poly[static_cast<std::size_t>(degree)]) <= 1e-13 * pmax) --degree;
  if (degree == 0) return {};

  std::vector<double> raw;
  const auto accept = [&raw](std::complex<double> z) {
    // Loose acceptance: spurious candidates only refine the sign scan.
    if (std::abs(z.imag()) <= 1.0 * std::max(1.0, std::abs(z.real()))) raw.push_back(z.real());
  };
  if (degree == 1) {
    raw.push_back(-poly[0] / poly[1]);
  } else {
    Eigen::VectorXd coeffs(degree + 1);
    for (int k = 0; k <= degree; ++k) coeffs(k) = poly[static_cast<std::size_t>(k)];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    if (solver.roots().size() == degree) {
      for (Eigen::Index k = 0; k < degree; ++k) accept(solver.roots()(k));
    } else {
      // Near-square quartics can stall the real Schur iteration.
      Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
      for (int k = 0; k < degree; ++k) companion(k, degree - 1) = -poly[static_cast<std::size_t>(k)] / poly[static_cast<std::size_t>(degree)];
      for (int k = 1; k < degree; ++k) companion(k, k - 1) = 1.0;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(companion, false);
      if (ces.info() == Eigen::Success) {
        for (Eigen::Index k = 0; k < degree; ++k) accept(ces.eigenvalues()(k));
      }
    }
  }
  // Roots of the rational part l0 y^2 + l1 y + l4; exact roots of g when the
  // radical terms vanish, which is where the quartic is a perfect square.
  if (l[0] != 0.0) {
    const double disc = l[1] * l[1] - 4.0 * l[0] * l[4];
    if (disc >= 0.0) {
      const double qv = -0.5 * (l[1] + std::copysign(std::sqrt(disc), l[1]));
      raw.push_back(qv / l[0]);
      if (qv != 0.0) raw.push_back(l[4] / qv);
    }
  } else if (l[1] != 0.0) {
    raw.push_back(-l[4] / l[1]);
  }

  std::vector<double> out;
  for (double y : raw) {
    if (!(y >= 0.0) || !std::isfinite(y)) continue;
    const double s = std::sqrt(y * y + r);
    const double f1 = (l[2] * y + l[3]) * s;
    const double f2 = -l[0] * y * y - l[1] * y - l[4];
    if (std::abs(f1 - f2) <= 1.0 * (1.0 + y * y)) out.push_back(y);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= 1e-30; }),
            out.end());
  return out;
}

// Bisection for a sign change of g between lo and hi (g(lo) and g(hi) differ
// in whether they are <= 0).
double refine_boundary(const SqrtCoeffs& c, double lo, double hi) {
  const bool lo_in = c.in_root(lo) <= 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((c.in_root(mid) <= 0.0) == lo_in) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IntervalUnion solve_sqrt_leq(const SqrtCoeffs& c) {
  require(c.r_star > 0.0, "r* must be positive");
  for (double l : c.lambda) require(std::isfinite(l), "non-finite coefficient");
  double scale = 0.0;
  for (double l : c.lambda) scale = std::max(scale, std::abs(l));
  if (scale == 0.0) return IntervalUnion::half_line();

  const auto roots = quartic_candidates(c, scale);

  // Probe points: one inside each gap between consecutive candidates.
  std::vector<double> probes;
  double prev = 0.0;
  for (double y : roots) {
    if (y > prev) probes.push_back(0.5 * (prev + y));
    prev = std::max(prev, y);
  }
  probes.push_back(2.0 * prev + 1.0);
  std::vector<char> inside(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) inside[k] = c.in_root(probes[k]) <= 0.0 ? 1 : 0;

  // Walk the probes; every change of membership marks a boundary, located
  // precisely by bisection between the two probes.
  std::vector<Interval> out;
  double open_at = inside.front() ? 0.0 : -1.0;
  for (std::size_t k = 1; k < probes.size(); ++k) {
    if (inside[k] == inside[k - 1]) continue;
    const double y = refine_boundary(c, probes[k - 1], probes[k]);
    if (inside[k]) {
      open_at = y;
    } else {
      out.push_back(Interval{open_at * open_at, y * y, true, true});
      open_at = -1.0;
    }
  }
  if (open_at >= 0.0) out.push_back(Interval{open_at * open_at, kInf, true, false});
  return IntervalUnion(std::move(out));
}

QuadCoeffs quad_norm_coeffs(const Vector& d, const Vector& e) {
  return {d.squaredNorm(), 2.0 * d.dot(e), e.squaredNorm()};
}

SqrtCoeffs sqrt_norm_coeffs(const Vector& a, const Vector& b, const Vector& c, double r_star) {
  const double sr = std::sqrt(r_star);
  SqrtCoeffs out;
  out.r_star = r_star;
  out.lambda = {a.squaredNorm() + c.squaredNorm(), 2.0 * a.dot(b) * sr, 2.0 * a.dot(c), 2.0 * b.dot(c) * sr,
                (b.squaredNorm() + c.squaredNorm()) * r_star};
  return out;
}

// ---------------------------------------------------------------------------
// Decompositions of X along the test statistic

KnownSigmaDecomposition decompose_known(const Matrix& X, const ProjectionBundle& bundle, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive and finite");
  const Matrix pe = apply_PE(bundle, X);
  const double norm = pe.norm();
  if (!(norm > 0.0)) fail(ErrorKind::ZeroStatistic, "||P_E X||_F is zero");
  KnownSigmaDecomposition dec;
  dec.direction = (sigma / norm) * pe;
  dec.remainder = X - pe;
  dec.statistic = norm / sigma;
  return dec;
}

UnknownSigmaDecomposition decompose_unknown(const Matrix& X, const ClusterPartition& part,
                                            const ProjectionBundle& bundle) {
  if (bundle.d_star < 1) {
    fail(ErrorKind::DegenerateWithin, "every cluster of interest is a singleton; no within-cluster variation");
  }
  const Matrix pe = apply_PE(bundle, X);
  const Matrix p1 = apply_P1(part, bundle.touched, X);
  const double ne = pe.norm();
  const double n1 = p1.norm();
  if (!(ne > 0.0)) fail(ErrorKind::ZeroStatistic, "||P_E X||_F is zero");
  if (!(n1 > 0.0)) fail(ErrorKind::ZeroStatistic, "||P_1 X||_F is zero");
  UnknownSigmaDecomposition dec;
  dec.total_norm = std::sqrt(ne * ne + n1 * n1);
  dec.A = pe / ne;
  dec.B = p1 / n1;
  dec.C = (X - pe - p1) / dec.total_norm;
  dec.r_star = bundle.r_star;
  dec.statistic = (ne * ne / bundle.d) / (n1 * n1 / bundle.d_star);
  return dec;
}

Matrix UnknownSigmaDecomposition::at(double psi) const {
  const double wa = std::sqrt(psi / (psi + r_star));
  const double wb = std::sqrt(r_star / (psi + r_star));
  return total_norm * (wa * A + wb * B + C);
}

// ---------------------------------------------------------------------------
// Inequality systems

namespace {

using RowVec = Eigen::RowVectorXd;

// Calls on(lhs, rhs) for every Lloyd inequality ||lhs||^2 <= ||rhs||^2, with
// lhs/rhs given per component matrix: the row of i minus its assigned
// centre, and minus a competing centre. Step 0 uses the initial rows,
// step j >= 1 the step-(j-1) centroids.
template <class OnInequality>
void for_each_lloyd_inequality(const std::vector<const Matrix*>& comps, const KMeansTrace& trace,
                               OnInequality&& on) {
  const std::size_t m = comps.size();
  const auto n = static_cast<Eigen::Index>(trace.n());
  const int K = trace.K;
  std::vector<Vector> lhs(m), rhs(m);

  const auto& step0 = trace.assignments.front();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int assigned = step0[static_cast<std::size_t>(i)];
    const int own_row = trace.init_indices[static_cast<std::size_t>(assigned)];
    for (int l = 0; l < K; ++l) {
      if (l == assigned) continue;
      const int other_row = trace.init_indices[static_cast<std::size_t>(l)];
      for (std::size_t c = 0; c < m; ++c) {
        lhs[c] = (comps[c]->row(i) - comps[c]->row(own_row)).transpose();
        rhs[c] = (comps[c]->row(i) - comps[c]->row(other_row)).transpose();
      }
      on(lhs, rhs);
    }
  }

  std::vector<Matrix> centers(m);
  for (int j = 1; j <= trace.J; ++j) {
    for (std::size_t c = 0; c < m; ++c) centers[c] = centroids_at(*comps[c], trace, j);
    const auto& step = trace.assignments[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const int assigned = step[static_cast<std::size_t>(i)];
      for (int l = 0; l < K; ++l) {
        if (l == assigned) continue;
        for (std::size_t c = 0; c < m; ++c) {
          lhs[c] = (comps[c]->row(i) - centers[c].row(assigned)).transpose();
          rhs[c] = (comps[c]->row(i) - centers[c].row(l)).transpose();
        }
        on(lhs, rhs);
      }
    }
  }
}

// A^T v_{k,k'} for every pair of all_pairs(K), for each component.
std::vector<std::vector<Vector>> pair_projections(const std::vector<const Matrix*>& comps,
                                                  const ClusterPartition& part) {
  const int K = part.K();
  std::vector<std::vector<Vector>> out;
  for (const Matrix* M : comps) {
    Matrix means = Matrix::Zero(K, M->cols());
    for (Eigen::Index i = 0; i < M->rows(); ++i) means.row(part.label(static_cast<std::size_t>(i))) += M->row(i);
    for (int k = 0; k < K; ++k) means.row(k) /= part.size(k);
    std::vector<Vector> per_pair;
    for (const auto& [k, kp] : all_pairs(K)) per_pair.push_back((means.row(k) - means.row(kp)).transpose());
    out.push_back(std::move(per_pair));
  }
  return out;
}

// Builds S_{.,V} given the squared-norm function of each pair (as Coeffs)
// and the squared threshold function, following the set displays of the
// selection settings. `leq(f)` solves {f <= 0}.
template <class Coeffs, class Leq, class Threshold>
IntervalUnion selection_event(const std::vector<Coeffs>& norms, const ClusterPartition& part,
                              const PairSet& observed, Leq&& leq, Threshold&& threshold) {
  const auto pairs = all_pairs(part.K());
  std::vector<char> selected(pairs.size(), 0);
  for (const auto& p : observed.pairs) {
    const auto it = std::find(pairs.begin(), pairs.end(), p);
    require(it != pairs.end(), "observed pair not among the cluster pairs");
    selected[static_cast<std::size_t>(it - pairs.begin())] = 1;
  }
  IntervalUnion acc = IntervalUnion::half_line();
  const auto add = [&](const IntervalUnion& s) { acc = acc.intersect(s); };

  if (std::holds_alternative<rule::TopG>(observed.rule) || std::holds_alternative<rule::BottomG>(observed.rule)) {
    const bool top = std::holds_alternative<rule::TopG>(observed.rule);
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      if (!selected[a]) continue;
      for (std::size_t b = 0; b < pairs.size(); ++b) {
        if (selected[b]) continue;
        // Top: ||v_a||^2 > ||v_b||^2, i.e. not (||v_a||^2 - ||v_b||^2 <= 0).
        // Bottom: ||v_a||^2 < ||v_b||^2, i.e. not (||v_b||^2 - ||v_a||^2 <= 0).
        add((top ? leq(norms[a] - norms[b]) : leq(norms[b] - norms[a])).complement());
      }
    }
  } else if (const auto* below = std::get_if<rule::ThresholdBelow>(&observed.rule)) {
    const Coeffs t = threshold(below->t * below->t);
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      if (selected[a]) {
        add(leq(norms[a] - t));
      } else {
        add(leq(norms[a] - t).complement());
      }
    }
  } else if (const auto* above = std::get_if<rule::ThresholdAbove>(&observed.rule)) {
    const Coeffs t = threshold(above->t * above->t);
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      if (selected[a]) {
        add(leq(t - norms[a]));
      } else {
        add(leq(t - norms[a]).complement());
      }
    }
  } else {
    require(false, "selection truncation needs a data-dependent rule");
  }
  return acc;
}

}  // namespace

IntervalUnion known_sigma_truncation(const KnownSigmaDecomposition& dec, const KMeansTrace& trace) {
  IntervalUnion acc = IntervalUnion::half_line();
  for_each_lloyd_inequality({&dec.direction, &dec.remainder}, trace,
                            [&](const std::vector<Vector>& lhs, const std::vector<Vector>& rhs) {
                              const QuadCoeffs diff =
                                  quad_norm_coeffs(lhs[0], lhs[1]) - quad_norm_coeffs(rhs[0], rhs[1]);
                              acc = acc.intersect(solve_quad_leq(diff));
                            });
  return acc;
}

IntervalUnion known_sigma_truncation(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                     double sigma) {
  return known_sigma_truncation(decompose_known(X, bundle, sigma), trace);
}

IntervalUnion selection_truncation_known(const KnownSigmaDecomposition& dec, const ClusterPartition& part,
                                         const PairSet& observed) {
  const auto proj = pair_projections({&dec.direction, &dec.remainder}, part);
  std::vector<QuadCoeffs> norms;
  for (std::size_t p = 0; p < proj[0].size(); ++p) norms.push_back(quad_norm_coeffs(proj[0][p], proj[1][p]));
  return selection_event(
      norms, part, observed, [](const QuadCoeffs& f) { return solve_quad_leq(f); },
      [](double t2) { return QuadCoeffs{0.0, 0.0, t2}; });
}

IntervalUnion selection_truncation_known(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                         double sigma, const SelectionRule& rule) {
  const ClusterPartition part = trace.partition();
  const PairSet observed = select_pairs(X, part, rule);
  return selection_truncation_known(decompose_known(X, bundle, sigma), part, observed);
}

IntervalUnion unknown_sigma_truncation(const UnknownSigmaDecomposition& dec, const KMeansTrace& trace) {
  IntervalUnion acc = IntervalUnion::half_line();
  for_each_lloyd_inequality({&dec.A, &dec.B, &dec.C}, trace,
                            [&](const std::vector<Vector>& lhs, const std::vector<Vector>& rhs) {
                              const SqrtCoeffs diff = sqrt_norm_coeffs(lhs[0], lhs[1], lhs[2], dec.r_star) -
                                                      sqrt_norm_coeffs(rhs[0], rhs[1], rhs[2], dec.r_star);
                              acc = acc.intersect(solve_sqrt_leq(diff));
                            });
  return acc;
}

IntervalUnion unknown_sigma_truncation(const Matrix& X, const KMeansTrace& trace, const ClusterPartition& part,
                                       const ProjectionBundle& bundle) {
  return unknown_sigma_truncation(decompose_unknown(X, part, bundle), trace);
}

IntervalUnion selection_truncation_unknown(const UnknownSigmaDecomposition& dec, const ClusterPartition& part,
                                           const PairSet& observed) {
  const auto proj = pair_projections({&dec.A, &dec.B, &dec.C}, part);
  std::vector<SqrtCoeffs> norms;
  for (std::size_t p = 0; p < proj[0].size(); ++p) {
    norms.push_back(sqrt_norm_coeffs(proj[0][p], proj[1][p], proj[2][p], dec.r_star));
  }
  const double n2 = dec.total_norm * dec.total_norm;
  const double r = dec.r_star;
  return selection_event(
      norms, part, observed, [](const SqrtCoeffs& f) { return solve_sqrt_leq(f); },
      [n2, r](double t2) {
        // h(psi) = gamma1*psi + gamma2 in the same scaling as the norms.
        SqrtCoeffs h;
        h.r_star = r;
        h.lambda = {t2 / n2, 0.0, 0.0, 0.0, r * t2 / n2};
        return h;
      });
}

IntervalUnion selection_truncation_unknown(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                           const SelectionRule& rule) {
  const ClusterPartition part = trace.partition();
  const PairSet observed = select_pairs(X, part, rule);
  return selection_truncation_unknown(decompose_unknown(X, part, bundle), part, observed);
}

}  // namespace csieve

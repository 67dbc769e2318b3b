#pragma once

#include <array>

#include "cluster_sieve/kmeans.hpp"
#include "cluster_sieve/projection.hpp"
#include "cluster_sieve/selection.hpp"

namespace csieve {

/// a*psi^2 + b*psi + c.
struct QuadCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double psi) const { return (a * psi + b) * psi + c; }
  QuadCoeffs operator-(const QuadCoeffs& o) const { return {a - o.a, b - o.b, c - o.c}; }
};

/// l1*psi + l2*sqrt(psi) + l3*sqrt(psi)*sqrt(psi+r) + l4*sqrt(psi+r) + l5.
struct SqrtCoeffs {
  std::array<double, 5> lambda{};
  double r_star = 1.0;

  double operator()(double psi) const;
  /// Same function written in y = sqrt(psi).
  double in_root(double y) const;
  SqrtCoeffs operator-(const SqrtCoeffs& o) const;
};

/// {psi >= 0 : c(psi) <= 0}.
IntervalUnion solve_quad_leq(const QuadCoeffs& c);

/// {psi >= 0 : c(psi) <= 0}. Candidate boundaries come from the quartic
/// obtained by squaring out sqrt(psi + r); the sign of the original function
/// is then checked between candidates and each boundary is refined by
/// bisection on the original function.
IntervalUnion solve_sqrt_leq(const SqrtCoeffs& c);

/// Coefficients of ||psi*d + e||^2.
QuadCoeffs quad_norm_coeffs(const Vector& d, const Vector& e);

/// Coefficients of ||sqrt(psi)*a + sqrt(r)*b + sqrt(psi + r)*c||^2.
SqrtCoeffs sqrt_norm_coeffs(const Vector& a, const Vector& b, const Vector& c, double r_star);

/// X = T*D + E with D = sigma*P_E X/||P_E X||_F and E = P_E^perp X.
struct KnownSigmaDecomposition {
  Matrix direction;  // D
  Matrix remainder;  // E
  double statistic = 0.0;

  Matrix at(double psi) const { return psi * direction + remainder; }
};

/// Throws Error(ZeroStatistic) when ||P_E X||_F = 0.
KnownSigmaDecomposition decompose_known(const Matrix& X, const ProjectionBundle& bundle, double sigma);

/// X = N*(sqrt(T/(T+r)) A + sqrt(r/(T+r)) B) + P_2 X with
/// N^2 = ||P_E X||^2 + ||P_1 X||^2 and C = P_2 X / N.
struct UnknownSigmaDecomposition {
  Matrix A;
  Matrix B;
  Matrix C;
  double total_norm = 0.0;  // N
  double r_star = 1.0;
  double statistic = 0.0;   // T*

  Matrix at(double psi) const;
};

/// Throws Error(DegenerateWithin) when d* = 0 and Error(ZeroStatistic) when
/// either projection vanishes.
UnknownSigmaDecomposition decompose_unknown(const Matrix& X, const ClusterPartition& part,
                                            const ProjectionBundle& bundle);

/// S_sigma: the values of psi for which Lloyd's algorithm on x_sigma(psi)
/// repeats every traced assignment.
IntervalUnion known_sigma_truncation(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                     double sigma);
IntervalUnion known_sigma_truncation(const KnownSigmaDecomposition& dec, const KMeansTrace& trace);

/// S_{sigma,V}: psi for which the rule applied to x_sigma(psi) under the
/// final partition selects the same pairs as on X.
IntervalUnion selection_truncation_known(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                         double sigma, const SelectionRule& rule);
IntervalUnion selection_truncation_known(const KnownSigmaDecomposition& dec, const ClusterPartition& part,
                                         const PairSet& observed);

IntervalUnion unknown_sigma_truncation(const Matrix& X, const KMeansTrace& trace, const ClusterPartition& part,
                                       const ProjectionBundle& bundle);
IntervalUnion unknown_sigma_truncation(const UnknownSigmaDecomposition& dec, const KMeansTrace& trace);

IntervalUnion selection_truncation_unknown(const Matrix& X, const KMeansTrace& trace, const ProjectionBundle& bundle,
                                           const SelectionRule& rule);
IntervalUnion selection_truncation_unknown(const UnknownSigmaDecomposition& dec, const ClusterPartition& part,
                                           const PairSet& observed);

}  // namespace csieve

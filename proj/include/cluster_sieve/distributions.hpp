#pragma once

#include "cluster_sieve/core.hpp"

namespace csieve {

// Regularized incomplete gamma and beta functions in log space. Accurate to
// roughly 1e-12 relative in the body of the distribution; tails stay finite
// in log space long after the plain values underflow.
double log_gamma_p(double a, double x);
double log_gamma_q(double a, double x);
/// log I_x(a, b) and log(1 - I_x(a, b)); `y` must equal 1 - x and is passed
/// separately so callers can avoid the cancellation in forming it.
struct LogBetaPair {
  double lower;  // log I_x(a, b)
  double upper;  // log (1 - I_x(a, b))
};
LogBetaPair log_ibeta(double a, double b, double x, double y);

/// log(1 - e^x) for x <= 0.
double log1mexp(double x);
double log_add_exp(double a, double b);

// chi_d: the law of sqrt(Y) with Y ~ chi^2_d.
double chi_survival(double t, double d);
double log_chi_survival(double t, double d);
double log_chi_cdf(double t, double d);
double log_chi_pdf(double t, double d);

double chisq_survival(double x, double d);
double log_chisq_survival(double x, double d);
double log_chisq_cdf(double x, double d);
double log_chisq_pdf(double x, double d);

double f_survival(double t, double d1, double d2);
double log_f_survival(double t, double d1, double d2);
double log_f_cdf(double t, double d1, double d2);
double log_f_pdf(double t, double d1, double d2);

struct Family {
  enum class Kind { Chi, ChiSquare, FisherF };
  Kind kind = Kind::Chi;
  double d1 = 1.0;
  double d2 = 1.0;

  static Family chi(double d) { return {Kind::Chi, d, 0.0}; }
  static Family chi_square(double d) { return {Kind::ChiSquare, d, 0.0}; }
  static Family fisher_f(double d1, double d2) { return {Kind::FisherF, d1, d2}; }

  double log_survival(double t) const;
  double log_cdf(double t) const;
  double log_pdf(double t) const;
};

struct TruncatedDistSpec {
  Family family;
  IntervalUnion set;
};

/// log of the probability mass of `set` under `family`.
double log_set_mass(const Family& family, const IntervalUnion& set);

struct TailProbability {
  double value = 1.0;
  EvaluationPath path = EvaluationPath::Exact;
  bool clamped = false;
};

/// P(T >= t | T in S). F-family problems whose set mass falls below e^-700
/// are handed to f_to_chisq_approx. Throws Error(ZeroMassSet) when neither
/// route yields a usable mass.
TailProbability truncated_tail(double t, const TruncatedDistSpec& spec);
double truncated_survival(double t, const TruncatedDistSpec& spec);

/// Maps an F(d1, d2) truncation problem onto chi^2_{d1} with the
/// Li-Martin transform x -> d1*x*(2*d2 + d1*x/3 + d1 - 2)/(2*d2 + 4*d1*x/3)
/// and evaluates the truncated chi-square tail there.
double f_to_chisq_approx(double t, double d1, double d2, const IntervalUnion& set);
double li_martin_transform(double x, double d1, double d2);

}  // namespace csieve

#include <cmath>
#include <limits>

#include "cluster_sieve/distributions.hpp"

namespace csieve {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of e^{-x} x^a / Gamma(a)
double log_gamma_prefix(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// sum_{n>=0} x^n / (a (a+1) ... (a+n)) * a, i.e. the series for P without the
// prefix / a.
double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum;
}

// Continued fraction for Q without the prefix (modified Lentz).
double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

double log1mexp(double x) {
  if (x >= 0.0) return kNegInf;
  return x > -M_LN2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_gamma_p(double a, double x) {
  require(a > 0.0, "incomplete gamma needs a > 0");
  if (x <= 0.0) return kNegInf;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_gamma_prefix(a, x) + std::log(gamma_series(a, x));
  return log1mexp(log_gamma_prefix(a, x) + std::log(gamma_cf(a, x)));
}

double log_gamma_q(double a, double x) {
  require(a > 0.0, "incomplete gamma needs a > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return kNegInf;
  if (x < a + 1.0) return log1mexp(log_gamma_prefix(a, x) + std::log(gamma_series(a, x)));
  return log_gamma_prefix(a, x) + std::log(gamma_cf(a, x));
}

LogBetaPair log_ibeta(double a, double b, double x, double y) {
  require(a > 0.0 && b > 0.0, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return {kNegInf, 0.0};
  if (y <= 0.0) return {0.0, kNegInf};
  const double front = a * std::log(x) + b * std::log(y) - log_beta_fn(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = front + std::log(beta_cf(a, b, x)) - std::log(a);
    return {lower, log1mexp(lower)};
  }
  const double upper = front + std::log(beta_cf(b, a, y)) - std::log(b);
  return {log1mexp(upper), upper};
}

}  // namespace csieve

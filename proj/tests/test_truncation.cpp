#include <doctest.h>

#include <random>

#include "cluster_sieve/truncation.hpp"
#include "oracles.hpp"

using namespace csieve;

namespace {

Matrix blobs(int n, int q, int K, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix X(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) X(i, j) = z(rng) + (j == 0 ? spread * (i % K) : 0.0);
  }
  return X;
}

Vector random_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> z;
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = z(rng);
  return v;
}

// Checks membership against the sign of f on a grid, skipping points too
// close to a root or to a set endpoint to call.
template <class F>
int check_sign_grid(const IntervalUnion& set, const F& f, double hi, int points) {
  int checked = 0;
  for (int s = 0; s <= points; ++s) {
    const double psi = hi * s / points;
    const double v = f(psi);
    if (std::abs(v) < 1e-9) continue;
    if (!set.is_empty() && set.distance_to_boundary(psi) < 1e-7) continue;
    CHECK(set.contains(psi) == (v <= 0.0));
    ++checked;
  }
  return checked;
}

}  // namespace

TEST_CASE("quadratic inequality examples") {
  CHECK(solve_quad_leq({1, 0, -1}) == IntervalUnion::closed(0, 1));
  CHECK(solve_quad_leq({1, -3, 2}) == IntervalUnion::closed(1, 2));
  CHECK(solve_quad_leq({0, 0, -1}) == IntervalUnion::half_line());
  CHECK(solve_quad_leq({0, 0, 1}).is_empty());
  CHECK(solve_quad_leq({0, 1, -2}) == IntervalUnion::closed(0, 2));
  CHECK(solve_quad_leq({-1, 0, 4}) == IntervalUnion({{2, kInf, true, false}}));
}

TEST_CASE("square-root inequality examples") {
  SqrtCoeffs linear;
  linear.lambda = {1, 0, 0, 0, -1};
  linear.r_star = 1.0;
  const auto a = solve_sqrt_leq(linear);
  REQUIRE(a.size() == 1);
  CHECK(a.intervals()[0].lo == 0.0);
  CHECK(a.intervals()[0].hi == doctest::Approx(1.0).epsilon(1e-12));

  SqrtCoeffs shifted;
  shifted.lambda = {0, 0, 0, 1, -2};
  shifted.r_star = 1.0;
  const auto b = solve_sqrt_leq(shifted);
  REQUIRE(b.size() == 1);
  CHECK(b.intervals()[0].lo == 0.0);
  CHECK(b.intervals()[0].hi == doctest::Approx(3.0).epsilon(1e-12));

  SqrtCoeffs never;
  never.lambda = {0, 0, 0, 0, 1};
  CHECK(solve_sqrt_leq(never).is_empty());
}

TEST_CASE("quadratic solver against a sign grid") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    QuadCoeffs c{z(rng), 4.0 * z(rng), 3.0 * z(rng)};
    if (trial % 10 == 0) c.a = 0.0;
    checked += check_sign_grid(solve_quad_leq(c), c, 20.0, 2000);
  }
  CHECK(checked > 500000);
}

TEST_CASE("square-root solver against a sign grid") {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> r(0.05, 20.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    SqrtCoeffs c;
    for (auto& l : c.lambda) l = z(rng);
    c.r_star = r(rng);
    if (trial % 7 == 0) c.lambda[2] = c.lambda[3] = 0.0;
    if (trial % 11 == 0) c.lambda[0] = 0.0;
    checked += check_sign_grid(solve_sqrt_leq(c), c, 30.0, 2000);
  }
  CHECK(checked > 500000);
}

TEST_CASE("square-root solver on norm differences") {
  // The shape met in practice: differences of two squared norms along the
  // same path.
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> r(0.1, 10.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const double rs = r(rng);
    const Vector a1 = random_vector(rng, 3), b1 = random_vector(rng, 3), c1 = random_vector(rng, 3);
    const Vector a2 = random_vector(rng, 3), b2 = random_vector(rng, 3);
    const Vector c2 = trial % 5 == 0 ? c1 : random_vector(rng, 3);
    const SqrtCoeffs g = sqrt_norm_coeffs(a1, b1, c1, rs) - sqrt_norm_coeffs(a2, b2, c2, rs);
    checked += check_sign_grid(solve_sqrt_leq(g), g, 40.0, 2000);
  }
  CHECK(checked > 500000);
}

TEST_CASE("coefficient identities") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> psi(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector d = random_vector(rng, 5), e = random_vector(rng, 5);
    const QuadCoeffs qc = quad_norm_coeffs(d, e);
    const Vector a = random_vector(rng, 4), b = random_vector(rng, 4), c = random_vector(rng, 4);
    const double rs = 0.5 + trial % 7;
    const SqrtCoeffs sc = sqrt_norm_coeffs(a, b, c, rs);
    for (int s = 0; s < 20; ++s) {
      const double p = psi(rng);
      const double direct_q = (p * d + e).squaredNorm();
      CHECK(std::abs(qc(p) - direct_q) <= 1e-8 * std::max(1.0, direct_q));
      const double direct_s = (std::sqrt(p) * a + std::sqrt(rs) * b + std::sqrt(p + rs) * c).squaredNorm();
      CHECK(std::abs(sc(p) - direct_s) <= 1e-8 * std::max(1.0, direct_s));
      CHECK(std::abs(sc.in_root(std::sqrt(p)) - sc(p)) <= 1e-10 * std::max(1.0, std::abs(sc(p))));
    }
  }
}

TEST_CASE("decompositions reproduce the data at the observed statistic") {
  const Matrix X = blobs(30, 2, 3, 3.0, 41);
  KMeansConfig cfg;
  cfg.K = 3;
  cfg.seed = 2;
  const auto trace = run_kmeans(DataMatrix(X), cfg);
  const auto part = trace.partition();
  const auto bundle = build_projection(part, all_pairs(3), 2);

  const auto known = decompose_known(X, bundle, 1.3);
  CHECK((known.at(known.statistic) - X).norm() < 1e-10);
  CHECK(known.statistic == doctest::Approx(apply_PE(bundle, X).norm() / 1.3).epsilon(1e-12));

  const auto unknown = decompose_unknown(X, part, bundle);
  CHECK((unknown.at(unknown.statistic) - X).norm() < 1e-10);
  const double expected = (apply_PE(bundle, X).squaredNorm() / bundle.d) /
                          (apply_P1(part, bundle.touched, X).squaredNorm() / bundle.d_star);
  CHECK(unknown.statistic == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("observed statistic lies in its truncation set") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Matrix X = blobs(24, 2, 3, seed % 2 ? 0.0 : 2.0, 50 + seed);
    KMeansConfig cfg;
    cfg.K = 3;
    cfg.seed = seed;
    KMeansTrace trace;
    try {
      trace = run_kmeans(DataMatrix(X), cfg);
    } catch (const Error&) {
      continue;
    }
    const auto part = trace.partition();
    const auto bundle = build_projection(part, all_pairs(3), 2);
    const auto known = decompose_known(X, bundle, 1.0);
    const auto s = known_sigma_truncation(known, trace);
    CHECK(s.distance_to_boundary(known.statistic) < kInf);
    CHECK((s.contains(known.statistic) || s.distance_to_boundary(known.statistic) < 1e-9));

    const auto unknown = decompose_unknown(X, part, bundle);
    const auto su = unknown_sigma_truncation(unknown, trace);
    CHECK((su.contains(unknown.statistic) || su.distance_to_boundary(unknown.statistic) < 1e-9 * unknown.statistic));

    const SelectionRule top = rule::TopG{1};
    const auto sel = selection_truncation_known(X, trace, build_projection(part, select_pairs(X, part, top).pairs, 2), 1.0, top);
    CHECK(sel.contains(apply_PE(build_projection(part, select_pairs(X, part, top).pairs, 2), X).norm()));
  }
}

TEST_CASE("known-sigma set is invariant to a common rescaling") {
  const Matrix X = blobs(30, 2, 3, 2.0, 61);
  KMeansConfig cfg;
  cfg.K = 3;
  cfg.seed = 7;
  const auto trace = run_kmeans(DataMatrix(X), cfg);
  const auto part = trace.partition();
  const auto bundle = build_projection(part, chain_pairs(3), 2);
  const auto s1 = known_sigma_truncation(X, trace, bundle, 1.0);
  const auto s2 = known_sigma_truncation(4.0 * X, trace, bundle, 4.0);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s2.intervals()[k].lo == doctest::Approx(s1.intervals()[k].lo).epsilon(1e-9));
    if (std::isinf(s1.intervals()[k].hi)) {
      CHECK(std::isinf(s2.intervals()[k].hi));
    } else {
      CHECK(s2.intervals()[k].hi == doctest::Approx(s1.intervals()[k].hi).epsilon(1e-9));
    }
  }
}

TEST_CASE("truncation sets agree with a replay on a grid") {
  int disagreements = 0;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Matrix X = blobs(18, 2, 3, 1.0, 70 + seed);
    KMeansConfig cfg;
    cfg.K = 3;
    cfg.seed = seed;
    KMeansTrace trace;
    try {
      trace = run_kmeans(DataMatrix(X), cfg);
    } catch (const Error&) {
      continue;
    }
    const auto pairs = all_pairs(3);
    const auto bundle = build_projection(trace.partition(), pairs, 2);
    const auto s = known_sigma_truncation(X, trace, bundle, 1.0);
    const auto path = oracle::known_path(X, trace.final_labels(), 3, pairs, 1.0);
    const auto su = unknown_sigma_truncation(X, trace, trace.partition(), bundle);
    const auto upath = oracle::unknown_path(X, trace.final_labels(), 3, pairs);
    for (int g = 1; g <= 300; ++g) {
      const double psi = 0.05 * g;
      if (s.distance_to_boundary(psi) > 1e-6) {
        disagreements += s.contains(psi) != oracle::clustering_event(path, trace, psi);
        ++checked;
      }
      if (su.distance_to_boundary(psi) > 1e-6) {
        disagreements += su.contains(psi) != oracle::clustering_event(upath, trace, psi);
        ++checked;
      }
    }
  }
  CHECK(checked > 3000);
  CHECK(disagreements == 0);
}

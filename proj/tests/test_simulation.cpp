#include <doctest.h>

#include <random>

#include "cluster_sieve/simulation.hpp"

using namespace csieve;

TEST_CASE("mean layouts") {
  SimConfig cfg;
  cfg.K = 4;
  cfg.q = 3;
  cfg.layout = means::KGon{2.0};
  const Matrix kgon = group_means(cfg);
  for (int k = 0; k < 4; ++k) {
    CHECK(kgon.row(k).norm() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(kgon(k, 2) == 0.0);
  }
  CHECK(kgon(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(kgon(1, 1) == doctest::Approx(2.0).epsilon(1e-14));

  cfg.layout = means::Horizontal{1.5};
  const Matrix h = group_means(cfg);
  for (int k = 0; k < 4; ++k) {
    CHECK(h(k, 0) == doctest::Approx(1.5 * k).epsilon(1e-14));
    CHECK(h(k, 1) == 0.0);
  }

  cfg.layout = means::Null{};
  CHECK(group_means(cfg).norm() == 0.0);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.test.rule = rule::Fixed{all_pairs(3)};
  cfg.n = 61;
  cfg.layout = means::Horizontal{1.0};
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.n = 60;
  CHECK_NOTHROW(validate(cfg));
  cfg.q = 1;
  cfg.layout = means::KGon{1.0};
  CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("generated data has the right means and spread") {
  SimConfig cfg;
  cfg.n = 3000;
  cfg.K = 3;
  cfg.sigma = 2.0;
  cfg.layout = means::Horizontal{4.0};
  const Matrix X = gen_data(cfg, 9);
  const int per = cfg.n / cfg.K;
  for (int k = 0; k < 3; ++k) {
    const Matrix block = X.middleRows(k * per, per);
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const double se = cfg.sigma / std::sqrt(static_cast<double>(per));
    CHECK(std::abs(mean(0) - 4.0 * k) < 4.0 * se);
    CHECK(std::abs(mean(1)) < 4.0 * se);
  }
  cfg.layout = means::Null{};
  const Matrix Z = gen_data(cfg, 10);
  const double var = (Z.rowwise() - Z.colwise().mean()).squaredNorm() / (Z.size() - 2.0);
  CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("seeds are reproducible and distinct") {
  CHECK(replicate_seed(1, 5) == replicate_seed(1, 5));
  CHECK(replicate_seed(1, 5) != replicate_seed(1, 6));
  CHECK(replicate_seed(1, 5) != replicate_seed(2, 5));
  CHECK(replicate_seed(1, 5, 0) != replicate_seed(1, 5, 1));
  SimConfig cfg;
  CHECK(gen_data(cfg, 3) == gen_data(cfg, 3));
  CHECK(gen_data(cfg, 3) != gen_data(cfg, 4));
}

TEST_CASE("replicates do not depend on the worker count") {
  SimConfig cfg;
  cfg.n = 30;
  cfg.replicates = 40;
  cfg.test.rule = rule::Fixed{all_pairs(3)};
  cfg.test.variance = variance::Known{1.0};
  const auto a = run_replicates(cfg);
  CHECK(a.size() == 40);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == run_replicate(cfg, i));
}

TEST_CASE("KS helpers") {
  CHECK(ks_uniform_statistic({0.5}) == doctest::Approx(0.5));
  CHECK(ks_uniform_statistic({0.25, 0.75}) == doctest::Approx(0.25));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  CHECK(ks_uniform_statistic(grid) == doctest::Approx(0.005));
  CHECK(ks_statistic(grid, [](double x) { return x; }) == doctest::Approx(0.005));
  CHECK(ks_pvalue(0.005, 100) == doctest::Approx(1.0));
  CHECK(ks_pvalue(0.3, 100) < 1e-6);
  // The 5% critical value of the Kolmogorov law is about 1.358 / sqrt(n).
  CHECK(ks_pvalue(1.358 / (std::sqrt(1000.0) + 0.12 + 0.11 / std::sqrt(1000.0)), 1000) ==
        doctest::Approx(0.05).epsilon(0.01));
  CHECK(ks_two_sample_statistic({0.1, 0.2}, {0.1, 0.2}) == 0.0);
  CHECK(ks_two_sample_statistic({0.1, 0.2}, {0.8, 0.9}) == 1.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u;
  std::vector<double> sample(2000);
  for (double& x : sample) x = u(rng);
  std::sort(sample.begin(), sample.end());
  CHECK(ks_pvalue(ks_uniform_statistic(sample), sample.size()) > 0.01);
}

TEST_CASE("null p-values are roughly uniform with fixed pairs") {
  SimConfig cfg;
  cfg.n = 30;
  cfg.replicates = 300;
  cfg.test.rule = rule::Fixed{all_pairs(3)};
  cfg.test.variance = variance::Known{1.0};
  const auto res = run_type1(cfg);
  CHECK(res.pvalues.size() + static_cast<std::size_t>(res.na_count) == 300);
  CHECK(std::is_sorted(res.pvalues.begin(), res.pvalues.end()));
  CHECK(res.ks_pvalue > 0.001);
}

TEST_CASE("power rows keep their bookkeeping") {
  SimConfig cfg;
  cfg.n = 30;
  cfg.replicates = 60;
  cfg.layout = means::Horizontal{0.0};
  cfg.test.rule = rule::Fixed{all_pairs(3)};
  cfg.test.variance = variance::Known{1.0};
  const auto rows = run_power(cfg, {0.0, 8.0});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.used + r.na_count == 60);
    CHECK(r.power >= 0.0);
    CHECK(r.power <= 1.0);
    CHECK(r.stderr_ == doctest::Approx(std::sqrt(r.power * (1 - r.power) / r.used)));
  }
  CHECK(rows[1].power > 0.9);
  CHECK(rows[0].power < 0.2);
}

TEST_CASE("zero separation behaves like the null design") {
  SimConfig null_cfg;
  null_cfg.n = 30;
  null_cfg.replicates = 300;
  null_cfg.test.rule = rule::Fixed{all_pairs(3)};
  null_cfg.test.variance = variance::Known{1.0};
  SimConfig flat = null_cfg;
  flat.layout = means::KGon{0.0};
  flat.master_seed = 77;
  const auto a = run_type1(null_cfg);
  const auto b = run_type1(flat);
  const double d = ks_two_sample_statistic(a.pvalues, b.pvalues);
  CHECK(ks_two_sample_pvalue(d, a.pvalues.size(), b.pvalues.size()) > 0.001);
}

TEST_CASE("Bonferroni procedure runs in simulation") {
  SimConfig cfg;
  cfg.n = 30;
  cfg.replicates = 20;
  cfg.procedure = SimTest::Bonferroni;
  cfg.test.rule = rule::Fixed{all_pairs(3)};
  cfg.test.variance = variance::Known{1.0};
  for (const auto& p : run_replicates(cfg)) {
    if (p) {
      CHECK(*p >= 0.0);
      CHECK(*p <= 1.0);
    }
  }
}

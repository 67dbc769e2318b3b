#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cluster_sieve/inference.hpp"

namespace csieve {

namespace means {
struct Null {};
/// mu_k = (k delta, 0, ..., 0)
struct Horizontal {
  double delta = 0.0;
};
/// mu_k = (delta cos(2 pi k / K), delta sin(2 pi k / K), 0, ..., 0)
struct KGon {
  double delta = 0.0;
};
}  // namespace means

using MeanLayout = std::variant<means::Null, means::Horizontal, means::KGon>;

enum class SimTest { Selective, Bonferroni };

struct SimConfig {
  int n = 60;
  int q = 2;
  int K = 3;
  double sigma = 1.0;
  MeanLayout layout = means::Null{};
  int replicates = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  /// Clustering, selection and variance settings. `data` is ignored and
  /// `kmeans.K` is overwritten with K.
  TestRequest test;
  SimTest procedure = SimTest::Selective;
  int max_iter = 50;
};

void validate(const SimConfig& cfg);

/// Derived seed for replicate `index`; independent of evaluation order.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

/// K x q matrix of group means.
Matrix group_means(const SimConfig& cfg);

/// n x q draw: n/K rows at each mean (remaining rows at the last one when K
/// does not divide n) plus N(0, sigma^2) noise.
Matrix gen_data(const SimConfig& cfg, std::uint64_t seed);

/// p-value of one replicate, or nullopt when the test is not available.
std::optional<double> run_replicate(const SimConfig& cfg, std::uint64_t index);

struct Type1Result {
  std::vector<double> pvalues;  // sorted ascending
  double ks_stat = 0.0;
  double ks_pvalue = 1.0;
  int na_count = 0;
};

Type1Result run_type1(const SimConfig& cfg);

struct PowerRow {
  double delta = 0.0;
  double power = 0.0;
  double stderr_ = 0.0;
  int na_count = 0;
  int used = 0;
};

/// One row per delta; cfg.layout's alternative family is kept and its delta
/// replaced.
std::vector<PowerRow> run_power(const SimConfig& cfg, const std::vector<double>& deltas);

/// All replicate p-values (nullopt for NA), in replicate order.
std::vector<std::optional<double>> run_replicates(const SimConfig& cfg);

// Kolmogorov-Smirnov helpers ----------------------------------------------

/// sup |F_n - F| for a sorted sample.
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf);
double ks_uniform_statistic(const std::vector<double>& sorted);
/// Asymptotic P(D_n >= d) with Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);
/// Two-sample statistic and asymptotic p-value.
double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);
double ks_two_sample_pvalue(double d, std::size_t n1, std::size_t n2);

/// Worker count: CLUSTER_SIEVE_THREADS if set, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) over a worker pool.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace csieve

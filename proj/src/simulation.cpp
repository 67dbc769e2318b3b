#include "cluster_sieve/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace csieve {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

MeanLayout with_delta(const MeanLayout& layout, double delta) {
  if (std::holds_alternative<means::Horizontal>(layout)) return means::Horizontal{delta};
  return means::KGon{delta};
}

}  // namespace

void validate(const SimConfig& cfg) {
  require(cfg.n >= 2 && cfg.q >= 1, "simulation needs n >= 2 and q >= 1");
  require(cfg.K >= 2 && cfg.K <= cfg.n, "simulation needs 2 <= K <= n");
  require(cfg.sigma > 0.0 && std::isfinite(cfg.sigma), "sigma must be positive");
  require(cfg.replicates >= 1, "replicates must be positive");
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "alpha must lie in (0, 1)");
  require(cfg.max_iter >= 1, "max_iter must be positive");
  if (const auto* h = std::get_if<means::Horizontal>(&cfg.layout)) {
    require(h->delta >= 0.0, "delta must be non-negative");
    require(cfg.n % cfg.K == 0, "structured designs need K to divide n");
  }
  if (const auto* g = std::get_if<means::KGon>(&cfg.layout)) {
    require(g->delta >= 0.0, "delta must be non-negative");
    require(cfg.q >= 2, "the K-gon design needs q >= 2");
    require(cfg.n % cfg.K == 0, "structured designs need K to divide n");
  }
  if (cfg.procedure == SimTest::Bonferroni) {
    require(std::holds_alternative<rule::Fixed>(cfg.test.rule), "Bonferroni needs a fixed pair set");
  }
  validate_rule(cfg.test.rule, cfg.K);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ index) ^ (stream * 0xd1b54a32d192ed03ULL));
}

Matrix group_means(const SimConfig& cfg) {
  Matrix mu = Matrix::Zero(cfg.K, cfg.q);
  if (const auto* h = std::get_if<means::Horizontal>(&cfg.layout)) {
    for (int k = 0; k < cfg.K; ++k) mu(k, 0) = k * h->delta;
  } else if (const auto* g = std::get_if<means::KGon>(&cfg.layout)) {
    for (int k = 0; k < cfg.K; ++k) {
      const double angle = 2.0 * M_PI * k / cfg.K;
      mu(k, 0) = g->delta * std::cos(angle);
      mu(k, 1) = g->delta * std::sin(angle);
    }
  }
  return mu;
}

Matrix gen_data(const SimConfig& cfg, std::uint64_t seed) {
  const Matrix mu = group_means(cfg);
  const int per = cfg.n / cfg.K;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  Matrix X(cfg.n, cfg.q);
  for (int i = 0; i < cfg.n; ++i) {
    const int k = std::min(i / per, cfg.K - 1);
    for (int j = 0; j < cfg.q; ++j) X(i, j) = mu(k, j) + noise(rng);
  }
  return X;
}

std::optional<double> run_replicate(const SimConfig& cfg, std::uint64_t index) {
  TestRequest req = cfg.test;
  req.data = gen_data(cfg, replicate_seed(cfg.master_seed, index, 0));
  req.kmeans.K = cfg.K;
  req.kmeans.max_iter = cfg.max_iter;
  req.kmeans.seed = replicate_seed(cfg.master_seed, index, 1);
  try {
    if (cfg.procedure == SimTest::Bonferroni) return test_bonferroni(req).p_value;
    return run_test(req).p_value;
  } catch (const Error& e) {
    if (e.not_available()) return std::nullopt;
    throw;
  }
}

std::vector<std::optional<double>> run_replicates(const SimConfig& cfg) {
  validate(cfg);
  std::vector<std::optional<double>> out(static_cast<std::size_t>(cfg.replicates));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = run_replicate(cfg, i); });
  return out;
}

Type1Result run_type1(const SimConfig& cfg) {
  Type1Result res;
  for (const auto& p : run_replicates(cfg)) {
    if (p) {
      res.pvalues.push_back(*p);
    } else {
      ++res.na_count;
    }
  }
  std::sort(res.pvalues.begin(), res.pvalues.end());
  if (!res.pvalues.empty()) {
    res.ks_stat = ks_uniform_statistic(res.pvalues);
    res.ks_pvalue = ks_pvalue(res.ks_stat, res.pvalues.size());
  }
  return res;
}

std::vector<PowerRow> run_power(const SimConfig& cfg, const std::vector<double>& deltas) {
  require(!std::holds_alternative<means::Null>(cfg.layout), "power studies need a structured mean layout");
  std::vector<PowerRow> rows;
  for (double delta : deltas) {
    SimConfig c = cfg;
    c.layout = with_delta(cfg.layout, delta);
    PowerRow row;
    row.delta = delta;
    int rejected = 0;
    for (const auto& p : run_replicates(c)) {
      if (!p) {
        ++row.na_count;
        continue;
      }
      ++row.used;
      if (*p <= cfg.alpha) ++rejected;
    }
    if (row.used > 0) {
      row.power = static_cast<double>(rejected) / row.used;
      row.stderr_ = std::sqrt(row.power * (1.0 - row.power) / row.used);
    }
    rows.push_back(row);
  }
  return rows;
}

double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_uniform_statistic(const std::vector<double>& sorted) {
  return ks_statistic(sorted, [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_two_sample_pvalue(double d, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
  return ks_pvalue(d, static_cast<std::size_t>(std::max(1.0, std::round(ne))));
}

int worker_count() {
  if (const char* env = std::getenv("CLUSTER_SIEVE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace csieve

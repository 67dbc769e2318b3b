#include "cluster_sieve/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cluster_sieve/inference.hpp"
#include "cluster_sieve/simulation.hpp"

#ifndef CLUSTER_SIEVE_VERSION
#define CLUSTER_SIEVE_VERSION "unknown"
#endif

namespace csieve::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw MalformedInput("line " + std::to_string(line) + ": not a finite number: '" + t + "'");
  }
  return v;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json interval_json(const IntervalUnion& set) {
  json arr = json::array();
  for (const auto& iv : set.intervals()) {
    arr.push_back({{"lo", iv.lo},
                   {"hi", std::isinf(iv.hi) ? json(nullptr) : json(iv.hi)},
                   {"lo_closed", iv.lo_closed},
                   {"hi_closed", iv.hi_closed}});
  }
  return arr;
}

json pairs_json(const std::vector<ClusterPair>& pairs) {
  json arr = json::array();
  for (const auto& [k, kp] : pairs) arr.push_back({k + 1, kp + 1});
  return arr;
}

std::string pairs_text(const std::vector<ClusterPair>& pairs) {
  std::string s;
  for (const auto& [k, kp] : pairs) {
    if (!s.empty()) s += ',';
    s += std::to_string(k + 1) + ':' + std::to_string(kp + 1);
  }
  return s;
}

SelectionRule parse_select(const std::string& spec, int K) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw MalformedInput("--select expects kind:value, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const double value = parse_double(spec.substr(colon + 1), 0);
  const auto as_count = [&]() {
    if (value != std::floor(value) || value < 1 || value > K * (K - 1) / 2) {
      throw MalformedInput("--select " + kind + " needs an integer g in [1, K(K-1)/2]");
    }
    return static_cast<int>(value);
  };
  if (value <= 0.0) throw MalformedInput("--select value must be positive");
  if (kind == "top") return rule::TopG{as_count()};
  if (kind == "bottom") return rule::BottomG{as_count()};
  if (kind == "below") return rule::ThresholdBelow{value};
  if (kind == "above") return rule::ThresholdAbove{value};
  throw MalformedInput("--select kind must be top, bottom, below or above");
}

std::string na_reason(const Error& e) { return std::string(to_string(e.kind())) + ": " + e.what(); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MalformedInput("cannot write " + path.string());
  f << text;
}

void write_run_record(const fs::path& dir, const std::string& command, const json& config,
                      const std::vector<std::string>& outputs, double wall_time) {
  json rec;
  rec["command"] = command;
  rec["config"] = config;
  rec["version"] = version_string();
  rec["wall_time_seconds"] = wall_time;
  rec["outputs"] = outputs;
  write_text(dir / "run_record.json", rec.dump(2) + "\n");
}

// test ----------------------------------------------------------------------

struct TestOptions {
  std::string file;
  int K = 2;
  std::optional<double> sigma;
  std::string sigma_est;
  bool unknown_sigma = false;
  std::string pairs;
  std::string select;
  bool account_selection = false;
  bool bonferroni = false;
  bool standardize = false;
  std::uint64_t seed = 1;
  int restarts = 1;
  int max_iter = 50;
  std::string format = "json";
  bool header = false;
  std::string out;
};

void check_test_flags(const TestOptions& o) {
  const int variance_flags = (o.sigma ? 1 : 0) + (o.sigma_est.empty() ? 0 : 1) + (o.unknown_sigma ? 1 : 0);
  if (variance_flags != 1) throw BadFlags("give exactly one of --sigma, --sigma-est, --unknown-sigma");
  if (!o.pairs.empty() && !o.select.empty()) throw BadFlags("--pairs and --select are mutually exclusive");
  if (o.account_selection && o.select.empty()) {
    throw BadFlags("--account-selection needs a data-dependent --select rule");
  }
  if (o.bonferroni && !o.select.empty()) throw BadFlags("--bonferroni works on a fixed --pairs set");
  if (o.bonferroni && o.unknown_sigma) throw BadFlags("--bonferroni needs a known or estimated sigma");
  if (!o.sigma_est.empty() && o.sigma_est != "sample" && o.sigma_est != "median") {
    throw MalformedInput("--sigma-est must be sample or median");
  }
  if (o.format != "json" && o.format != "csv") throw MalformedInput("--format must be json or csv");
  if (o.K < 2) throw MalformedInput("--k must be at least 2");
  if (o.restarts < 1) throw MalformedInput("--restarts must be at least 1");
  if (o.max_iter < 1) throw MalformedInput("--max-iter must be at least 1");
  if (o.sigma && !(*o.sigma > 0.0 && std::isfinite(*o.sigma))) throw MalformedInput("--sigma must be positive");
}

json test_config_json(const TestOptions& o) {
  json c;
  c["file"] = o.file;
  c["k"] = o.K;
  if (o.sigma) c["sigma"] = *o.sigma;
  if (!o.sigma_est.empty()) c["sigma_est"] = o.sigma_est;
  c["unknown_sigma"] = o.unknown_sigma;
  c["pairs"] = o.pairs;
  c["select"] = o.select;
  c["account_selection"] = o.account_selection;
  c["bonferroni"] = o.bonferroni;
  c["standardize"] = o.standardize;
  c["seed"] = o.seed;
  c["restarts"] = o.restarts;
  c["max_iter"] = o.max_iter;
  c["format"] = o.format;
  c["header"] = o.header;
  return c;
}

struct RestartOutcome {
  std::uint64_t seed = 0;
  std::optional<PValueResult> result;
  std::string reason;
};

json result_json(const PValueResult& r) {
  json j;
  j["statistic"] = r.statistic;
  j["df_num"] = r.df_num;
  j["df_den"] = r.df_den ? json(*r.df_den) : json(nullptr);
  j["p_value"] = r.p_value;
  j["method"] = std::string(to_string(r.method));
  j["truncation"] = interval_json(r.truncation);
  j["degenerate"] = r.degenerate;
  json d;
  d["evaluation_path"] = std::string(to_string(r.diagnostics.path));
  d["clamped"] = r.diagnostics.clamped;
  d["asymptotic_only"] = r.diagnostics.asymptotic_only;
  d["sigma_used"] = r.diagnostics.sigma_used ? json(*r.diagnostics.sigma_used) : json(nullptr);
  d["bonferroni_pair"] = r.diagnostics.bonferroni_pair ? pairs_json({*r.diagnostics.bonferroni_pair}).at(0) : json(nullptr);
  d["kmeans_iterations"] = r.diagnostics.kmeans_iterations;
  d["pairs"] = pairs_json(r.diagnostics.pairs);
  j["diagnostics"] = d;
  return j;
}

std::string render_test(const TestOptions& o, const std::vector<RestartOutcome>& runs) {
  std::vector<double> ps;
  const PValueResult* first = nullptr;
  std::string first_reason;
  for (const auto& r : runs) {
    if (r.result) {
      ps.push_back(r.result->p_value);
      if (!first) first = &*r.result;
    } else if (first_reason.empty()) {
      first_reason = r.reason;
    }
  }
  const int na_count = static_cast<int>(runs.size() - ps.size());
  double mean = 0.0;
  for (double p : ps) mean += p;
  if (!ps.empty()) mean /= static_cast<double>(ps.size());

  if (o.format == "json") {
    json j;
    j["version"] = version_string();
    if (!first) {
      j["status"] = "NA";
      j["reason"] = first_reason;
    } else {
      j["status"] = "ok";
      j["result"] = result_json(*first);
      j["p_value"] = mean;
    }
    j["restarts"] = static_cast<int>(runs.size());
    j["na_count"] = na_count;
    json per = json::array();
    for (const auto& r : runs) {
      per.push_back({{"seed", r.seed},
                     {"p_value", r.result ? json(r.result->p_value) : json(nullptr)},
                     {"reason", r.result ? json(nullptr) : json(r.reason)}});
    }
    j["runs"] = per;
    return j.dump(2) + "\n";
  }

  std::ostringstream s;
  s << "status,p_value,statistic,df_num,df_den,method,truncation,degenerate,evaluation_path,asymptotic_only,"
       "sigma_used,pairs,restarts,na_count,reason\n";
  if (!first) {
    s << "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA," << runs.size() << ',' << na_count << ',' << csv_field(first_reason)
      << "\n";
  } else {
    const auto& r = *first;
    s << "ok," << fmt(mean) << ',' << fmt(r.statistic) << ',' << r.df_num << ','
      << (r.df_den ? std::to_string(*r.df_den) : "NA") << ',' << to_string(r.method) << ','
      << csv_field(to_string(r.truncation)) << ',' << (r.degenerate ? "true" : "false") << ','
      << to_string(r.diagnostics.path) << ',' << (r.diagnostics.asymptotic_only ? "true" : "false") << ','
      << (r.diagnostics.sigma_used ? fmt(*r.diagnostics.sigma_used) : "NA") << ','
      << csv_field(pairs_text(r.diagnostics.pairs)) << ',' << runs.size() << ',' << na_count << ",\n";
  }
  return s.str();
}

int cmd_test(const TestOptions& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  check_test_flags(o);
  Matrix X = read_matrix_file(o.file, o.header);
  if (X.rows() < o.K) throw MalformedInput("fewer observations than clusters");
  if (o.standardize) X = standardize(X);

  TestRequest req;
  req.data = X;
  req.kmeans.K = o.K;
  req.kmeans.max_iter = o.max_iter;
  req.account_selection = o.account_selection;
  if (!o.select.empty()) {
    req.rule = parse_select(o.select, o.K);
  } else if (!o.pairs.empty()) {
    auto pairs = parse_pairs(o.pairs);
    try {
      validate_pairs(pairs, o.K);
    } catch (const Error& e) {
      throw MalformedInput(e.what());
    }
    req.rule = rule::Fixed{std::move(pairs)};
  } else {
    req.rule = rule::Fixed{all_pairs(o.K)};
  }
  if (o.sigma) {
    req.variance = variance::Known{*o.sigma};
  } else if (o.sigma_est == "sample") {
    req.variance = variance::PlugInSample{};
  } else if (o.sigma_est == "median") {
    req.variance = variance::PlugInMedian{};
  } else {
    req.variance = variance::Unknown{};
  }

  std::vector<RestartOutcome> runs;
  for (int r = 0; r < o.restarts; ++r) {
    RestartOutcome run;
    run.seed = o.restarts == 1 ? o.seed : replicate_seed(o.seed, static_cast<std::uint64_t>(r));
    req.kmeans.seed = run.seed;
    try {
      run.result = o.bonferroni ? test_bonferroni(req) : run_test(req);
    } catch (const Error& e) {
      if (!e.not_available()) throw MalformedInput(e.what());
      run.reason = na_reason(e);
    }
    runs.push_back(std::move(run));
  }

  const std::string text = render_test(o, runs);
  if (o.out.empty()) {
    out << text;
  } else {
    const fs::path path(o.out);
    write_text(path, text);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_record(path.has_parent_path() ? path.parent_path() : fs::path("."), "test", test_config_json(o),
                     {path.filename().string()}, wall);
  }
  return kExitOk;
}

// simulate --------------------------------------------------------------------

struct SimOptions {
  std::string study;
  int n = 60;
  int q = 2;
  int K = 3;
  double sigma = 1.0;
  std::string design = "null";
  double delta = 0.0;
  std::string deltas = "0,0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6";
  int replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string pairs;
  std::string select;
  bool account_selection = false;
  std::string variance = "known";
  bool bonferroni = false;
  int max_iter = 50;
  std::string out_dir = "sim_out";
};

json sim_config_json(const SimOptions& o) {
  return json{{"study", o.study},     {"n", o.n},
              {"q", o.q},             {"k", o.K},
              {"sigma", o.sigma},     {"design", o.design},
              {"delta", o.delta},     {"deltas", o.deltas},
              {"replicates", o.replicates}, {"alpha", o.alpha},
              {"seed", o.seed},       {"pairs", o.pairs},
              {"select", o.select},   {"account_selection", o.account_selection},
              {"variance", o.variance}, {"bonferroni", o.bonferroni},
              {"max_iter", o.max_iter}, {"out_dir", o.out_dir}};
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, 0));
  if (out.empty()) throw MalformedInput("empty list");
  return out;
}

SimConfig build_sim_config(const SimOptions& o) {
  if (!o.pairs.empty() && !o.select.empty()) throw BadFlags("--pairs and --select are mutually exclusive");
  if (o.account_selection && o.select.empty()) {
    throw BadFlags("--account-selection needs a data-dependent --select rule");
  }
  if (o.bonferroni && !o.select.empty()) throw BadFlags("--bonferroni works on a fixed --pairs set");
  if (o.bonferroni && o.variance == "unknown") throw BadFlags("--bonferroni needs a known or estimated sigma");
  if (o.study == "power" && o.design == "null") throw BadFlags("power studies need --design horizontal or kgon");

  SimConfig cfg;
  cfg.n = o.n;
  cfg.q = o.q;
  cfg.K = o.K;
  cfg.sigma = o.sigma;
  cfg.replicates = o.replicates;
  cfg.alpha = o.alpha;
  cfg.master_seed = o.seed;
  cfg.max_iter = o.max_iter;
  if (o.design == "null") {
    cfg.layout = means::Null{};
  } else if (o.design == "horizontal") {
    cfg.layout = means::Horizontal{o.delta};
  } else if (o.design == "kgon") {
    cfg.layout = means::KGon{o.delta};
  } else {
    throw MalformedInput("--design must be null, horizontal or kgon");
  }
  if (o.K < 2) throw MalformedInput("--k must be at least 2");
  if (!o.select.empty()) {
    cfg.test.rule = parse_select(o.select, o.K);
  } else if (!o.pairs.empty()) {
    cfg.test.rule = rule::Fixed{parse_pairs(o.pairs)};
  } else {
    cfg.test.rule = rule::Fixed{all_pairs(o.K)};
  }
  cfg.test.account_selection = o.account_selection;
  if (o.variance == "known") {
    cfg.test.variance = variance::Known{o.sigma};
  } else if (o.variance == "sample") {
    cfg.test.variance = variance::PlugInSample{};
  } else if (o.variance == "median") {
    cfg.test.variance = variance::PlugInMedian{};
  } else if (o.variance == "unknown") {
    cfg.test.variance = variance::Unknown{};
  } else {
    throw MalformedInput("--variance must be known, sample, median or unknown");
  }
  cfg.procedure = o.bonferroni ? SimTest::Bonferroni : SimTest::Selective;
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw MalformedInput(e.what());
  }
  return cfg;
}

int cmd_simulate(const SimOptions& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const SimConfig cfg = build_sim_config(o);
  const fs::path dir(o.out_dir);
  std::vector<std::string> outputs;

  if (o.study == "type1") {
    const auto raw = run_replicates(cfg);
    std::ostringstream pv;
    pv << "replicate,pvalue\n";
    std::vector<double> ps;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      pv << i << ',' << (raw[i] ? fmt(*raw[i]) : "NA") << '\n';
      if (raw[i]) ps.push_back(*raw[i]);
    }
    std::sort(ps.begin(), ps.end());
    const double ks = ps.empty() ? 0.0 : ks_uniform_statistic(ps);
    const double ksp = ps.empty() ? 1.0 : ks_pvalue(ks, ps.size());
    const int na = static_cast<int>(raw.size() - ps.size());
    int rejected = 0;
    for (double p : ps) rejected += p <= cfg.alpha ? 1 : 0;
    const double rate = ps.empty() ? 0.0 : static_cast<double>(rejected) / static_cast<double>(ps.size());

    std::ostringstream summary;
    summary << "ks_stat,ks_pvalue,na_count,replicates,rejection_rate,alpha\n"
            << fmt(ks) << ',' << fmt(ksp) << ',' << na << ',' << raw.size() << ',' << fmt(rate) << ','
            << fmt(cfg.alpha) << '\n';
    std::ostringstream qq;
    qq << "theoretical,empirical\n";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      qq << fmt((static_cast<double>(i) + 0.5) / static_cast<double>(ps.size())) << ',' << fmt(ps[i]) << '\n';
    }
    write_text(dir / "pvalues.csv", pv.str());
    write_text(dir / "summary.csv", summary.str());
    write_text(dir / "qq.csv", qq.str());
    outputs = {"pvalues.csv", "summary.csv", "qq.csv"};
    out << "type1: " << ps.size() << " p-values, na_count=" << na << ", ks_stat=" << fmt(ks)
        << ", ks_pvalue=" << fmt(ksp) << ", rejection_rate=" << fmt(rate) << "\n";
  } else {
    const auto rows = run_power(cfg, parse_list(o.deltas));
    std::ostringstream pw;
    pw << "delta,power,stderr,na_count,used\n";
    for (const auto& r : rows) {
      pw << fmt(r.delta) << ',' << fmt(r.power) << ',' << fmt(r.stderr_) << ',' << r.na_count << ',' << r.used
         << '\n';
      out << "delta=" << fmt(r.delta) << " power=" << fmt(r.power) << " (se " << fmt(r.stderr_)
          << ", na " << r.na_count << ")\n";
    }
    write_text(dir / "power.csv", pw.str());
    outputs = {"power.csv"};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_record(dir, "simulate " + o.study, sim_config_json(o), outputs, wall);
  return kExitOk;
}

}  // namespace

Matrix read_matrix(std::istream& in, bool header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) row.push_back(parse_double(field, lineno));
    if (!line.empty() && (line.back() == delim)) throw MalformedInput("line " + std::to_string(lineno) + ": trailing delimiter");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw MalformedInput("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                           " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw MalformedInput("need at least two observations");
  Matrix X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return X;
}

Matrix read_matrix_file(const std::string& path, bool header) {
  std::ifstream f(path);
  if (!f) throw MalformedInput("cannot open " + path);
  return read_matrix(f, header);
}

Matrix standardize(const Matrix& X) {
  if (X.rows() < 2) throw MalformedInput("standardizing needs at least two rows");
  Matrix Z = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().sum() / static_cast<double>(X.rows() - 1));
    if (!(sd > 0.0)) throw MalformedInput("column " + std::to_string(j + 1) + " is constant");
    Z.col(j) = (X.col(j).array() - mean) / sd;
  }
  return Z;
}

std::vector<ClusterPair> parse_pairs(const std::string& spec) {
  std::vector<ClusterPair> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw MalformedInput("pair '" + t + "' is not of the form k:k'");
    int a = 0;
    int b = 0;
    const std::string sa = trim(t.substr(0, colon));
    const std::string sb = trim(t.substr(colon + 1));
    const auto ra = std::from_chars(sa.data(), sa.data() + sa.size(), a);
    const auto rb = std::from_chars(sb.data(), sb.data() + sb.size(), b);
    if (ra.ec != std::errc() || ra.ptr != sa.data() + sa.size() || rb.ec != std::errc() ||
        rb.ptr != sb.data() + sb.size() || sa.empty() || sb.empty()) {
      throw MalformedInput("pair '" + t + "' is not of the form k:k'");
    }
    if (a < 1 || b < 1 || a == b) throw MalformedInput("pair '" + t + "' needs two distinct 1-based labels");
    out.emplace_back(std::min(a, b) - 1, std::max(a, b) - 1);
  }
  if (out.empty()) throw MalformedInput("--pairs is empty");
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string version_string() { return CLUSTER_SIEVE_VERSION; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective inference for differences in K-means cluster means", "cluster_sieve"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  TestOptions t;
  auto* test = app.add_subcommand("test", "Test whether the cluster means of a data file differ");
  test->add_option("file", t.file, "Comma- or tab-delimited numeric file")->required();
  test->add_option("--k", t.K, "Number of clusters")->capture_default_str();
  test->add_option("--sigma", t.sigma, "Known noise standard deviation");
  test->add_option("--sigma-est", t.sigma_est, "Plug-in estimate: sample or median");
  test->add_flag("--unknown-sigma", t.unknown_sigma, "Variance-free F test");
  test->add_option("--pairs", t.pairs, "Fixed pairs, e.g. \"1:2,2:3\" (default: all pairs)");
  test->add_option("--select", t.select, "Data-dependent pairs: top:g, bottom:g, below:t or above:t");
  test->add_flag("--account-selection", t.account_selection, "Condition on the selected pairs too");
  test->add_flag("--bonferroni", t.bonferroni, "Bonferroni-combined pairwise tests");
  test->add_flag("--standardize", t.standardize, "Centre and scale each column first");
  test->add_option("--seed", t.seed, "K-means initialization seed")->capture_default_str();
  test->add_option("--restarts", t.restarts, "Average the p-value over this many initializations")
      ->capture_default_str();
  test->add_option("--max-iter", t.max_iter, "Lloyd iteration cap")->capture_default_str();
  test->add_option("--format", t.format, "json or csv")->capture_default_str();
  test->add_flag("--header", t.header, "First line of the file is a header");
  test->add_option("--out", t.out, "Write the report here instead of stdout");

  SimOptions s;
  auto* sim = app.add_subcommand("simulate", "Type I error and power studies");
  sim->add_option("study", s.study, "type1 or power")->required()->check(CLI::IsMember({"type1", "power"}));
  sim->add_option("--n", s.n)->capture_default_str();
  sim->add_option("--q", s.q)->capture_default_str();
  sim->add_option("--k", s.K)->capture_default_str();
  sim->add_option("--sigma", s.sigma, "Noise standard deviation")->capture_default_str();
  sim->add_option("--design", s.design, "null, horizontal or kgon")->capture_default_str();
  sim->add_option("--delta", s.delta, "Signal strength for type1 runs")->capture_default_str();
  sim->add_option("--deltas", s.deltas, "Comma-separated grid for power runs")->capture_default_str();
  sim->add_option("--replicates", s.replicates)->capture_default_str();
  sim->add_option("--alpha", s.alpha)->capture_default_str();
  sim->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  sim->add_option("--pairs", s.pairs);
  sim->add_option("--select", s.select);
  sim->add_flag("--account-selection", s.account_selection);
  sim->add_option("--variance", s.variance, "known, sample, median or unknown")->capture_default_str();
  sim->add_flag("--bonferroni", s.bonferroni);
  sim->add_option("--max-iter", s.max_iter)->capture_default_str();
  sim->add_option("--out-dir", s.out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << version_string() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }

  try {
    if (test->parsed()) return cmd_test(t, out);
    return cmd_simulate(s, out);
  } catch (const BadFlags& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const MalformedInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
}

}  // namespace csieve::cli

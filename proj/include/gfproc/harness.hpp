#ifndef GFPROC_HARNESS_HPP_
#define GFPROC_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gfproc/farima.hpp"
#include "gfproc/fraclevy.hpp"
#include "gfproc/innovations.hpp"
#include "gfproc/pathsim.hpp"
#include "gfproc/regvar.hpp"
#include "gfproc/rng.hpp"
#include "gfproc/stats.hpp"

namespace gfproc {

struct ExperimentConfig {
  // [model]
  double gamma = 1.5;
  std::vector<double> theta{1.0};
  std::vector<double> phi{1.0};
  double alpha = 1.5;
  double p = 1.0;
  double c = 1.0;
  std::string perturbation = "none";  // none | power | log
  double pert_eps = 0.5;
  double pert_amp = 0.5;
  // [scaling]
  std::vector<double> a_grid{0.2, 0.1, 0.05, 0.025};
  std::size_t replicates = 100;
  double horizon_eps = 0.5;
  double horizon_multiplier = 1.0;
  std::size_t horizon_cap = 0;
  // [limit]
  std::size_t limit_paths = 10000;
  double t_max = 50.0;
  std::size_t grid_nodes = 2048;
  // [run]
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";

  Perturbation perturbation_kind() const {
    if (perturbation == "none") return Perturbation::kNone;
    if (perturbation == "power") return Perturbation::kPower;
    if (perturbation == "log") return Perturbation::kSlowlyVaryingLog;
    throw std::invalid_argument("unknown perturbation: " + perturbation);
  }

  QuantileModel make_model() const {
    return QuantileModel(alpha, c, p, perturbation_kind(), pert_eps, pert_amp);
  }
  GSpec make_gspec() const { return GSpec(gamma, theta, phi); }

  void validate() const {
    make_model();
    make_gspec();
    if (a_grid.empty()) throw std::invalid_argument("config: empty a_grid");
    for (std::size_t i = 0; i + 1 < a_grid.size(); ++i)
      if (!(a_grid[i] > a_grid[i + 1]))
        throw std::invalid_argument("config: a_grid must be strictly decreasing");
    for (double a : a_grid)
      if (!(a > 0.0)) throw std::invalid_argument("config: a_grid entries must be positive");
    if (replicates == 0) throw std::invalid_argument("config: replicates = 0");
    if (limit_paths == 0) throw std::invalid_argument("config: limit_paths = 0");
    if (!(t_max > 1.0)) throw std::invalid_argument("config: t_max <= 1");
    if (grid_nodes < 16) throw std::invalid_argument("config: grid_nodes < 16");
  }
};

namespace detail {

// shortest decimal that round-trips the double exactly
inline std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string fmt_list(const std::vector<double> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt_double(v[i]);
  }
  return s;
}

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string &s,
                                      const std::string &key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char *end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw std::invalid_argument("config: bad number in " + key + ": " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

inline std::string emit_config(const ExperimentConfig &c) {
  std::string s;
  s += "[model]\n";
  s += "gamma = " + detail::fmt_double(c.gamma) + "\n";
  s += "theta = " + detail::fmt_list(c.theta) + "\n";
  s += "phi = " + detail::fmt_list(c.phi) + "\n";
  s += "alpha = " + detail::fmt_double(c.alpha) + "\n";
  s += "p = " + detail::fmt_double(c.p) + "\n";
  s += "c = " + detail::fmt_double(c.c) + "\n";
  s += "perturbation = " + c.perturbation + "\n";
  s += "pert_eps = " + detail::fmt_double(c.pert_eps) + "\n";
  s += "pert_amp = " + detail::fmt_double(c.pert_amp) + "\n";
  s += "\n[scaling]\n";
  s += "a_grid = " + detail::fmt_list(c.a_grid) + "\n";
  s += "replicates = " + std::to_string(c.replicates) + "\n";
  s += "horizon_eps = " + detail::fmt_double(c.horizon_eps) + "\n";
  s += "horizon_multiplier = " + detail::fmt_double(c.horizon_multiplier) + "\n";
  s += "horizon_cap = " + std::to_string(c.horizon_cap) + "\n";
  s += "\n[limit]\n";
  s += "limit_paths = " + std::to_string(c.limit_paths) + "\n";
  s += "t_max = " + detail::fmt_double(c.t_max) + "\n";
  s += "grid_nodes = " + std::to_string(c.grid_nodes) + "\n";
  s += "\n[run]\n";
  s += "master_seed = " + std::to_string(c.master_seed) + "\n";
  s += "out_dir = " + c.out_dir + "\n";
  return s;
}

inline ExperimentConfig parse_config(const std::string &text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    auto num = [&] {
      char *end = nullptr;
      const double v = std::strtod(val.c_str(), &end);
      if (end == val.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad value for " + key + ": " + val);
      return v;
    };
    auto count = [&] { return static_cast<std::size_t>(num()); };
    const std::string full = section + "." + key;
    if (full == "model.gamma") c.gamma = num();
    else if (full == "model.theta") c.theta = detail::parse_list(val, key);
    else if (full == "model.phi") c.phi = detail::parse_list(val, key);
    else if (full == "model.alpha") c.alpha = num();
    else if (full == "model.p") c.p = num();
    else if (full == "model.c") c.c = num();
    else if (full == "model.perturbation") c.perturbation = val;
    else if (full == "model.pert_eps") c.pert_eps = num();
    else if (full == "model.pert_amp") c.pert_amp = num();
    else if (full == "scaling.a_grid") c.a_grid = detail::parse_list(val, key);
    else if (full == "scaling.replicates") c.replicates = count();
    else if (full == "scaling.horizon_eps") c.horizon_eps = num();
    else if (full == "scaling.horizon_multiplier") c.horizon_multiplier = num();
    else if (full == "scaling.horizon_cap") c.horizon_cap = count();
    else if (full == "limit.limit_paths") c.limit_paths = count();
    else if (full == "limit.t_max") c.t_max = num();
    else if (full == "limit.grid_nodes") c.grid_nodes = count();
    else if (full == "run.master_seed")
      c.master_seed = std::strtoull(val.c_str(), nullptr, 10);
    else if (full == "run.out_dir") c.out_dir = val;
    else
      throw std::invalid_argument("config: unknown key " + full);
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ------------------------------------------------------------------
// parallel execution

namespace detail {

// Runs fn(task_index) for indices [0, n_tasks) on `workers` threads; the
// work assignment is dynamic but results are keyed by index, so output
// does not depend on the worker count.
template <typename Fn>
inline void parallel_for(std::size_t n_tasks, std::size_t workers, Fn fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n_tasks); ++w)
    pool.emplace_back(body);
  for (auto &t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// ------------------------------------------------------------------
// experiment driver

struct AResult {
  double a = 0.0;
  std::size_t horizon = 0;
  std::vector<double> raw_sups;     // indexed by replicate
  std::vector<double> scaled_sups;  // same order
  double median_raw = 0.0;
  double median_scaled = 0.0;
  double q10 = 0.0, q90 = 0.0;
  double ks = std::numeric_limits<double>::quiet_NaN();
  std::size_t late_argmax = 0;  // replicates with argmax past warn_fraction
};

struct ExperimentResult {
  std::vector<AResult> per_a;
  std::vector<double> limit_sample;  // sorted
  SlopeFit slope;  // log median raw sup vs log a
  std::vector<std::string> warnings;
};

// Limit-sup sample of `paths` replicates; seeds derive from a_index = ~0
// so they never collide with the scaling replicates.
inline std::vector<double> sample_limit_sups(const ExperimentConfig &cfg,
                                             std::size_t workers,
                                             std::size_t *boundary_warns = nullptr) {
  const auto grid = make_limit_grid(cfg.t_max, cfg.grid_nodes);
  const double w_cut = choose_w_cut(cfg.gamma, cfg.alpha, cfg.t_max);
  std::vector<double> sups(cfg.limit_paths);
  std::vector<std::uint8_t> warns(cfg.limit_paths, 0);
  detail::parallel_for(cfg.limit_paths, workers, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.master_seed, ~std::uint64_t{0}, i));
    const LimitPath path =
        frac_levy_path(cfg.gamma, cfg.alpha, cfg.p, 1.0 - cfg.p, grid,
                       cfg.t_max, w_cut, rng);
    const LimitSup s = limit_sup(path);
    sups[i] = s.sup;
    warns[i] = s.boundary_warn ? 1 : 0;
  });
  if (boundary_warns) {
    std::size_t n = 0;
    for (auto w : warns) n += w;
    *boundary_warns = n;
  }
  std::sort(sups.begin(), sups.end());
  return sups;
}

inline ExperimentResult run_scaling_experiment(
    const ExperimentConfig &cfg, std::vector<double> limit_sample,
    std::size_t workers = 1) {
  cfg.validate();
  if (!limit_sample.empty() && cfg.replicates < 100)
    throw std::invalid_argument(
        "run_scaling_experiment: KS comparison needs replicates >= 100");
  std::sort(limit_sample.begin(), limit_sample.end());

  const GSpec spec = cfg.make_gspec();
  const QuantileModel base = cfg.make_model();
  const InnovationModel innov(base);
  const ScalingFns scaling(base);
  HorizonPolicy policy;
  policy.eps = cfg.horizon_eps;
  policy.multiplier = cfg.horizon_multiplier;
  policy.n_cap = cfg.horizon_cap;

  ExperimentResult result;
  result.limit_sample = std::move(limit_sample);
  result.per_a.resize(cfg.a_grid.size());
  std::size_t n_max = 1;
  for (std::size_t ai = 0; ai < cfg.a_grid.size(); ++ai) {
    auto &r = result.per_a[ai];
    r.a = cfg.a_grid[ai];
    r.horizon = horizon(policy, r.a, scaling);
    r.raw_sups.resize(cfg.replicates);
    r.scaled_sups.resize(cfg.replicates);
    n_max = std::max(n_max, r.horizon);
  }
  const CoeffTable coeffs = build_coeffs(spec, n_max);

  const std::size_t n_a = cfg.a_grid.size();
  std::vector<std::uint32_t> late(n_a * cfg.replicates, 0);
  detail::parallel_for(n_a * cfg.replicates, workers, [&](std::size_t task) {
    const std::size_t ai = task / cfg.replicates;
    const std::size_t rep = task % cfg.replicates;
    auto &r = result.per_a[ai];
    Rng rng(derive_seed(cfg.master_seed, ai, rep));
    const std::vector<double> path =
        simulate_path(coeffs, innov, r.horizon, rng);
    const PathSample sample = sup_statistic(path, coeffs, r.a);
    r.raw_sups[rep] = sample.sup;
    r.scaled_sups[rep] = scaled_sup(sample.sup, r.a, spec, scaling);
    if (double(sample.argmax) > policy.warn_fraction * double(r.horizon))
      late[task] = 1;
  });

  std::vector<double> log_a, log_med;
  for (std::size_t ai = 0; ai < n_a; ++ai) {
    auto &r = result.per_a[ai];
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep)
      r.late_argmax += late[ai * cfg.replicates + rep];
    std::vector<double> raw = r.raw_sups, scaled = r.scaled_sups;
    std::sort(raw.begin(), raw.end());
    std::sort(scaled.begin(), scaled.end());
    r.median_raw = quantile_of_sorted(raw, 0.5);
    r.median_scaled = quantile_of_sorted(scaled, 0.5);
    r.q10 = quantile_of_sorted(scaled, 0.1);
    r.q90 = quantile_of_sorted(scaled, 0.9);
    if (!result.limit_sample.empty()) {
      // The invariance principle behind the theorem normalizes by the
      // partial sum a g_[0,Lambda) and compares sup_{n>=0} (the limit
      // functional includes t = 0), so the distributional comparison uses
      // that normalizer and clamps at zero.
      const double lambda = scaling.k_inverse(1.0 / r.a);
      std::size_t li = static_cast<std::size_t>(lambda + 0.5);
      li = std::min(std::max<std::size_t>(li, 1), coeffs.size());
      const double norm = r.a * coeffs.G[li - 1];
      std::vector<double> comp(raw);
      for (auto &x : comp) x = std::max(x, 0.0) / norm;
      r.ks = ks_two_sample(comp, result.limit_sample);
    }
    if (r.median_raw > 0.0) {
      log_a.push_back(std::log(r.a));
      log_med.push_back(std::log(r.median_raw));
    }
    if (r.late_argmax * 10 > cfg.replicates)
      result.warnings.push_back("a = " + detail::fmt_double(r.a) +
                                ": argmax near horizon in > 10% of paths");
  }
  if (log_a.size() >= 3) {
    // Fit on the asymptotic end of the grid: the largest a values have the
    // smallest Lambda and their scaled medians are still far from the limit
    // law (at a = 0.2, Lambda = 125, the scaled median is ~4x below the
    // limit median), which contaminates the power-law slope. Use the
    // smallest-a half of the points, never fewer than three.
    const std::size_t n_fit = std::max<std::size_t>(3, log_a.size() / 2);
    if (n_fit < log_a.size()) {
      const std::size_t drop = log_a.size() - n_fit;
      log_a.erase(log_a.begin(), log_a.begin() + drop);
      log_med.erase(log_med.begin(), log_med.begin() + drop);
      result.warnings.push_back(
          "slope fit restricted to the " + std::to_string(n_fit) +
          " smallest a values (larger a pre-asymptotic)");
    }
    result.slope = fit_line(log_a, log_med);
  } else {
    result.warnings.push_back("slope fit skipped: fewer than 3 usable grid points");
  }
  return result;
}

// ------------------------------------------------------------------
// assumption checks

struct CheckEntry {
  std::string name;
  double value = 0.0;
  bool pass = true;
  std::string note;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  bool all_pass() const {
    for (const auto &e : entries)
      if (!e.pass) return false;
    return true;
  }
};

inline CheckReport run_condition_checks(const ExperimentConfig &cfg) {
  CheckReport report;
  const GSpec spec = cfg.make_gspec();
  const QuantileModel model = cfg.make_model();
  const bool exact = cfg.perturbation == "none";

  {
    const std::size_t n = 10000;
    const CoeffTable table = build_coeffs(spec, n + 1);
    CheckEntry e{"karamata_ratio", std::fabs(karamata_ratio(table, spec, n) - 1.0)};
    e.pass = e.value <= 1e-2;
    e.note = "|gamma G_n/(n g_{n-1}) - 1| at n = 10^4";
    report.entries.push_back(e);
    for (double delta : {0.1, 0.2, 0.3}) {
      const double s1 = check_hypMg(table, spec, delta, 1000);
      const double s2 = check_hypMg(table, spec, delta, 10000);
      CheckEntry h{"hypMg(delta=" + detail::fmt_double(delta) + ")", s2};
      h.pass = std::isfinite(s2) && s2 <= std::max(1.05 * s1, 1e-9);
      h.note = "statistic at n = 10^4 vs 10^3";
      report.entries.push_back(h);
    }
  }
  {
    const double kappa = 0.1;
    std::vector<double> t_grid;
    for (double t = 1e2; t <= 1e8; t *= 100.0) t_grid.push_back(t);
    const auto rv = check_rv_rate(model, kappa, t_grid);
    CheckEntry e{"rv_rate(kappa=0.1)", rv.back().second};
    const bool growing = rv.back().second > 2.0 * rv.front().second + 1e-9;
    e.pass = exact ? e.value <= 1e-6 : !growing;
    e.note = growing ? "statistic growing over the t-grid" : "statistic bounded";
    report.entries.push_back(e);

    std::vector<double> x_grid;
    for (double x = 1e2; x <= 1e8; x *= 100.0)
      x_grid.push_back(x * model.upper_tail_scale());
    const auto tf = check_tail_form(model, kappa, x_grid);
    CheckEntry f{"tail_form(kappa=0.1)", tf.back().second};
    const bool tf_growing = tf.back().second > 2.0 * tf.front().second + 1e-9;
    f.pass = exact ? f.value <= 1e-6 : !tf_growing;
    f.note = tf_growing ? "statistic growing over the x-grid" : "statistic bounded";
    report.entries.push_back(f);
  }
  {
    // tail balance: Fbar(x)/Fbar_*(x) -> p with decreasing deviation
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    bool decreasing = true;
    for (double x = 1e2; x <= 1e8; x *= 100.0) {
      const double dev =
          std::fabs(model.tail(x) / model.fstar_tail(x) - model.upper_weight());
      if (dev > prev + 1e-12) decreasing = false;
      prev = dev;
      last = dev;
    }
    CheckEntry e{"tail_balance", last};
    e.pass = decreasing && (exact ? last <= 1e-6 : last < 0.5);
    e.note = "|Fbar/Fbar_* - p| at x = 10^8 c";
    report.entries.push_back(e);
  }
  return report;
}

// ------------------------------------------------------------------
// output emission

inline void emit_outputs(const ExperimentResult &result,
                         const std::string &dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const std::string &name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out)
      throw std::runtime_error("emit_outputs: cannot write " +
                               (fs::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("scaling.csv");
    out << "a,median,q10,q90,ks,n_eff\n";
    for (const auto &r : result.per_a) {
      out << detail::fmt_double(r.a) << ',' << detail::fmt_double(r.median_scaled)
          << ',' << detail::fmt_double(r.q10) << ',' << detail::fmt_double(r.q90)
          << ',' << (std::isnan(r.ks) ? "nan" : detail::fmt_double(r.ks)) << ','
          << r.raw_sups.size() << '\n';
    }
  }
  {
    auto out = open("limit.csv");
    out << "q,value\n";
    if (!result.limit_sample.empty())
      for (int i = 0; i <= 100; ++i) {
        const double q = double(i) / 100.0;
        out << detail::fmt_double(q) << ','
            << detail::fmt_double(quantile_of_sorted(result.limit_sample, q))
            << '\n';
      }
  }
  {
    auto out = open("slope.txt");
    out << "slope = " << detail::fmt_double(result.slope.slope) << "\n"
        << "stderr = " << detail::fmt_double(result.slope.slope_se) << "\n"
        << "intercept = " << detail::fmt_double(result.slope.intercept) << "\n";
    for (const auto &w : result.warnings) out << "warning: " << w << "\n";
  }
  {
    auto out = open("scaling.dat");
    out << "# log10(a) log10(median_raw) median_scaled q10 q90\n";
    for (const auto &r : result.per_a) {
      if (!(r.median_raw > 0.0)) continue;
      out << detail::fmt_double(std::log10(r.a)) << ' '
          << detail::fmt_double(std::log10(r.median_raw)) << ' '
          << detail::fmt_double(r.median_scaled) << ' '
          << detail::fmt_double(r.q10) << ' ' << detail::fmt_double(r.q90)
          << '\n';
    }
  }
}

}  // namespace gfproc

#endif  // GFPROC_HARNESS_HPP_

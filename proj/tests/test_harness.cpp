#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "gfproc/harness.hpp"

using namespace gfproc;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.gamma = 1.5;
  cfg.alpha = 1.5;
  cfg.p = 1.0;
  cfg.a_grid = {0.6, 0.5, 0.4};
  cfg.replicates = 40;
  cfg.horizon_cap = 2000;
  cfg.limit_paths = 200;
  cfg.t_max = 5.0;
  cfg.grid_nodes = 64;
  cfg.master_seed = 77;
  return cfg;
}

}  // namespace

TEST_CASE("config round trip") {
  ExperimentConfig cfg;
  cfg.gamma = 1.25;
  cfg.theta = {1.0, 0.5};
  cfg.phi = {1.0, -0.2};
  cfg.alpha = 1.75;
  cfg.p = 0.6;
  cfg.c = 2.5;
  cfg.perturbation = "power";
  cfg.pert_eps = 0.25;
  cfg.pert_amp = 0.125;
  cfg.a_grid = {0.3, 0.1, 0.03, 0.01};
  cfg.replicates = 500;
  cfg.horizon_eps = 0.4;
  cfg.horizon_multiplier = 1.5;
  cfg.horizon_cap = 123456;
  cfg.limit_paths = 2500;
  cfg.t_max = 35.0;
  cfg.grid_nodes = 1024;
  cfg.master_seed = 987654321123456789ULL;
  cfg.out_dir = "results/run1";

  const auto parsed = parse_config(emit_config(cfg));
  CHECK(parsed.gamma == cfg.gamma);
  CHECK(parsed.theta == cfg.theta);
  CHECK(parsed.phi == cfg.phi);
  CHECK(parsed.alpha == cfg.alpha);
  CHECK(parsed.p == cfg.p);
  CHECK(parsed.c == cfg.c);
  CHECK(parsed.perturbation == cfg.perturbation);
  CHECK(parsed.pert_eps == cfg.pert_eps);
  CHECK(parsed.pert_amp == cfg.pert_amp);
  CHECK(parsed.a_grid == cfg.a_grid);
  CHECK(parsed.replicates == cfg.replicates);
  CHECK(parsed.horizon_eps == cfg.horizon_eps);
  CHECK(parsed.horizon_multiplier == cfg.horizon_multiplier);
  CHECK(parsed.horizon_cap == cfg.horizon_cap);
  CHECK(parsed.limit_paths == cfg.limit_paths);
  CHECK(parsed.t_max == cfg.t_max);
  CHECK(parsed.grid_nodes == cfg.grid_nodes);
  CHECK(parsed.master_seed == cfg.master_seed);
  CHECK(parsed.out_dir == cfg.out_dir);
  // emitted text is itself a fixed point
  CHECK(emit_config(parsed) == emit_config(cfg));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.a_grid = {0.1, 0.2};  // not decreasing
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.a_grid = {0.2, 0.1};
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(parse_config("[model]\nbogus_key = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[model]\ngamma\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[model\ngamma = 1\n"), std::invalid_argument);
  // comments and blank lines are fine
  CHECK_NOTHROW(parse_config("# comment\n\n[model]\ngamma = 1.5\n"));
}

TEST_CASE("slope fit recovers synthetic power laws") {
  std::vector<double> x, y;
  for (double a : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    x.push_back(std::log(a));
    y.push_back(-3.5 * std::log(a) + 2.0);
  }
  const auto fit = fit_line(x, y);
  CHECK(fit.slope == Catch::Approx(-3.5).margin(1e-12));
  CHECK(fit.intercept == Catch::Approx(2.0).margin(1e-12));
  CHECK(fit.slope_se == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("condition checks: exact Pareto pure FARIMA all pass") {
  ExperimentConfig cfg;
  const auto report = run_condition_checks(cfg);
  CHECK(report.all_pass());
  for (const auto &e : report.entries) {
    if (e.name.rfind("rv_rate", 0) == 0 || e.name.rfind("tail_form", 0) == 0)
      CHECK(e.value <= 1e-6);
  }
}

TEST_CASE("condition checks: log perturbation warns on the rate") {
  ExperimentConfig cfg;
  cfg.perturbation = "log";
  const auto report = run_condition_checks(cfg);
  bool rv_warned = false;
  for (const auto &e : report.entries)
    if (e.name.rfind("rv_rate", 0) == 0 && !e.pass) rv_warned = true;
  CHECK(rv_warned);
}

TEST_CASE("condition checks: bad Phi refuses before running") {
  ExperimentConfig cfg;
  cfg.phi = {1.0, -2.0};  // root 0.5 inside the unit disk
  CHECK_THROWS_AS(run_condition_checks(cfg), std::invalid_argument);
}

TEST_CASE("scaling experiment on the degenerate horizon and smoke values") {
  // tiny run without KS comparison
  auto cfg = tiny_config();
  const auto result = run_scaling_experiment(cfg, {}, 1);
  REQUIRE(result.per_a.size() == 3);
  for (const auto &r : result.per_a) {
    CHECK(r.raw_sups.size() == cfg.replicates);
    CHECK(r.q10 <= r.median_scaled);
    CHECK(r.median_scaled <= r.q90);
    CHECK(std::isnan(r.ks));
  }
}

TEST_CASE("worker-count invariance of every replicate") {
  auto cfg = tiny_config();
  const auto r1 = run_scaling_experiment(cfg, {}, 1);
  const auto r4 = run_scaling_experiment(cfg, {}, 4);
  REQUIRE(r1.per_a.size() == r4.per_a.size());
  for (std::size_t ai = 0; ai < r1.per_a.size(); ++ai) {
    CHECK(r1.per_a[ai].raw_sups == r4.per_a[ai].raw_sups);
    CHECK(r1.per_a[ai].scaled_sups == r4.per_a[ai].scaled_sups);
  }
  std::size_t w1 = 0, w3 = 0;
  const auto l1 = sample_limit_sups(cfg, 1, &w1);
  const auto l3 = sample_limit_sups(cfg, 3, &w3);
  CHECK(l1 == l3);
  CHECK(w1 == w3);
}

TEST_CASE("emit_outputs determinism and schemas") {
  namespace fs = std::filesystem;
  auto cfg = tiny_config();
  cfg.replicates = 100;
  const auto limit = sample_limit_sups(cfg, 2);
  const auto result = run_scaling_experiment(cfg, limit, 2);

  const fs::path dir1 = fs::temp_directory_path() / "gfp_out1";
  const fs::path dir2 = fs::temp_directory_path() / "gfp_out2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  emit_outputs(result, dir1.string());
  emit_outputs(result, dir2.string());
  for (const char *name : {"scaling.csv", "limit.csv", "slope.txt", "scaling.dat"})
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));

  const std::string scaling = slurp(dir1 / "scaling.csv");
  CHECK(scaling.rfind("a,median,q10,q90,ks,n_eff\n", 0) == 0);
  CHECK(slurp(dir1 / "limit.csv").rfind("q,value\n", 0) == 0);

  // empty result: header-only files
  const fs::path dir3 = fs::temp_directory_path() / "gfp_out3";
  fs::remove_all(dir3);
  emit_outputs(ExperimentResult{}, dir3.string());
  CHECK(slurp(dir3 / "scaling.csv") == "a,median,q10,q90,ks,n_eff\n");
  CHECK(slurp(dir3 / "limit.csv") == "q,value\n");
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  fs::remove_all(dir3);
}

TEST_CASE("degenerate stub stream gives sup = -a g_0") {
  // X identically 0: every S_n = 0, sup over n of -a G_n is at n = 1
  const GSpec spec(1.5);
  const auto table = build_coeffs(spec, 64);
  std::vector<double> zeros(64, 0.0);
  const auto path = simulate_path(table, zeros, 64);
  for (double a : {0.5, 0.1}) {
    const auto s = sup_statistic(path, table, a);
    CHECK(s.sup == Catch::Approx(-a * table.g[0]).margin(1e-14));
    CHECK(s.argmax == 1);
  }
}

TEST_CASE("heavy-traffic monotonicity of the median raw sup") {
  auto cfg = tiny_config();
  cfg.a_grid = {0.6, 0.3, 0.15};
  cfg.replicates = 200;
  cfg.horizon_cap = 4000;
  const auto result = run_scaling_experiment(cfg, {}, 2);
  // medians of the raw sup should rise as the drift a falls
  CHECK(result.per_a[0].median_raw <= result.per_a[1].median_raw);
  CHECK(result.per_a[1].median_raw <= result.per_a[2].median_raw);
}

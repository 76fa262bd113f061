#include "catch_amalgamated.hpp"
#include "gfproc/fraclevy.hpp"
#include "gfproc/stats.hpp"

using namespace gfproc;

TEST_CASE("point cloud law") {
  Rng rng(2718);
  const double t_max = 2.0, w_cut = 3.0;
  const std::size_t n_clouds = 1000;
  double count_mean = 0.0, w1_mean = 0.0;
  std::size_t w1_n = 0;
  std::vector<double> all_v;
  for (std::size_t i = 0; i < n_clouds; ++i) {
    const auto cloud = sample_points(t_max, w_cut, rng);
    count_mean += double(cloud.w.size());
    if (!cloud.w.empty()) {
      w1_mean += cloud.w.front();
      ++w1_n;
      for (double v : cloud.v) all_v.push_back(v);
    }
    for (std::size_t j = 1; j < cloud.w.size(); ++j)
      REQUIRE(cloud.w[j] > cloud.w[j - 1]);
  }
  count_mean /= double(n_clouds);
  const double lam = t_max * w_cut;  // Poisson area law
  CHECK(std::fabs(count_mean - lam) < 4.0 * std::sqrt(lam / double(n_clouds)));
  // W_1 ~ Exp(t_max); conditioning on W_1 <= w_cut barely shifts the mean
  w1_mean /= double(w1_n);
  CHECK(std::fabs(w1_mean - 1.0 / t_max) < 4.0 * (1.0 / t_max) / std::sqrt(double(w1_n)));
  // V uniform on [0, t_max]
  const double d = ks_one_sample(all_v, [t_max](double v) { return v / t_max; });
  CHECK(d < ks_one_sample_critical(all_v.size(), 0.01));
}

TEST_CASE("upsilon basics") {
  PointCloud cloud;
  cloud.t_max = 2.0;
  cloud.w_cut = 10.0;
  CHECK(upsilon(cloud, 0.0, 4.0, 1.5, 1.5) == 0.0);
  CHECK(upsilon(cloud, 1.0, 4.0, 1.5, 1.5) == 0.0);  // empty cloud
  cloud.v = {0.5};
  cloud.w = {2.0};
  // single point: (1 - 0.5)^{0.5} * 2^{-2/3}
  CHECK(upsilon(cloud, 1.0, 4.0, 1.5, 1.5) ==
        Catch::Approx(std::sqrt(0.5) * std::pow(2.0, -2.0 / 3.0)).epsilon(1e-14));
  // truncation: with m = 1, t W = 2 > 1 so the point is dropped
  CHECK(upsilon(cloud, 1.0, 1.0, 1.5, 1.5) == 0.0);
  // w_cut below m/t is a bias error
  CHECK_THROWS_AS(upsilon(cloud, 1.0, 100.0, 1.5, 1.5), std::domain_error);
}

TEST_CASE("closed-form oracles at the reference point") {
  CHECK(upsilon_mean(1.0, 4.0, 1.5, 1.5) ==
        Catch::Approx(2.0 * std::pow(4.0, 1.0 / 3.0)).epsilon(1e-14));
  CHECK(upsilon_mean(1.0, 4.0, 1.5, 1.5) == Catch::Approx(3.17480).epsilon(1e-5));
  CHECK(upsilon_mean(0.0, 4.0, 1.5, 1.5) == 0.0);
  CHECK(upsilon_mean(1.0, 1.0, 1.0, 1.8) ==
        Catch::Approx(1.8 / 0.8).epsilon(1e-14));
  CHECK(truncation_m2(1.0, 4.0, 1.5, 1.5) ==
        Catch::Approx(std::pow(4.0, -1.0 / 3.0) * 1.5).epsilon(1e-14));
  CHECK(truncation_m2(1.0, 4.0, 1.5, 1.5) == Catch::Approx(0.94494).epsilon(1e-5));
  // homogeneity in t
  const double ratio = truncation_m2(2.0, 4.0, 1.5, 1.5) /
                       truncation_m2(1.0, 4.0, 1.5, 1.5);
  CHECK(ratio == Catch::Approx(std::pow(2.0, 2.0 * (0.5 + 2.0 / 3.0))).epsilon(1e-12));
  // m -> infinity: residual variance vanishes
  CHECK(truncation_m2(1.0, 1e12, 1.5, 1.5) < 1e-3);
}

TEST_CASE("moment recursion base cases") {
  const auto m = moment_recursion(4, 1.0, 4.0, 1.5, 1.5);
  REQUIRE(m.size() == 3);  // M_2, M_3, M_4
  CHECK(m[0] == Catch::Approx(truncation_m2(1.0, 4.0, 1.5, 1.5)).epsilon(1e-14));
  // M_3 = I_3, M_4 = I_4 + 3 I_2^2
  const double i2 = residual_power_integral(2, 1.0, 4.0, 1.5, 1.5);
  const double i3 = residual_power_integral(3, 1.0, 4.0, 1.5, 1.5);
  const double i4 = residual_power_integral(4, 1.0, 4.0, 1.5, 1.5);
  CHECK(m[1] == Catch::Approx(i3).epsilon(1e-14));
  CHECK(m[2] == Catch::Approx(i4 + 3.0 * i2 * i2).epsilon(1e-14));
}

TEST_CASE("upsilon mean homogeneity matches the scaling lemma") {
  const double gamma = 1.5, alpha = 1.5, m = 4.0;
  const double lam = 2.0, t = 0.4;
  CHECK(std::pow(lam, gamma - 1.0 + 1.0 / alpha) * upsilon_mean(t, m, gamma, alpha) ==
        Catch::Approx(upsilon_mean(lam * t, m, gamma, alpha)).epsilon(1e-13));
}

TEST_CASE("self-similarity KS check at lambda = 1") {
  Rng rng(1234);
  const auto res = upsilon_scaling_check(1.5, 1.5, 4.0, 1.0, {0.3}, 2000, rng);
  REQUIRE(res.size() == 1);
  CHECK(res[0].second < ks_two_sample_critical(2000, 2000, 0.01));
}

TEST_CASE("limit path construction") {
  Rng rng(5150);
  const auto grid = make_limit_grid(10.0, 256);
  REQUIRE(grid.size() == 256);
  for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] >= grid[i - 1]);
  CHECK(grid.back() == Catch::Approx(10.0).epsilon(1e-12));

  const double w_cut = choose_w_cut(1.5, 1.5, 10.0);
  const auto path = frac_levy_path(1.5, 1.5, 1.0, 0.0, grid, 10.0, w_cut, rng);
  REQUIRE(path.values.size() == grid.size());
  CHECK(path.compensator_scale ==
        Catch::Approx(3.0 * std::pow(w_cut, 1.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(
      frac_levy_path(1.5, 1.5, 0.7, 0.2, grid, 10.0, w_cut, rng),
      std::invalid_argument);
}

TEST_CASE("small-jump completion has the residual variance") {
  Rng rng(3141);
  const double gamma = 1.5, alpha = 1.5, w_cut = 50.0;
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const std::size_t reps = 4000;
  std::vector<std::vector<double>> vals(grid.size(), std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<double> out(grid.size(), 0.0);
    detail::add_gaussian_remainder(grid, gamma, alpha, w_cut, 1.0, rng, out);
    for (std::size_t j = 0; j < grid.size(); ++j) vals[j][r] = out[j];
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto m = centered_moments(vals[j]);
    const double want =
        gamma * gamma * residual_tail_var(grid[j], w_cut, gamma, alpha);
    // gamma = 1.5 makes the squared kernel linear, so the midpoint rule is
    // exact and only Monte Carlo noise remains
    CHECK(std::fabs(m.mean) < 4.0 * std::sqrt(m.m2 / double(reps)));
    CHECK(m.m2 == Catch::Approx(want).epsilon(4.0 * std::sqrt(2.0 / double(reps))));
  }
}

TEST_CASE("compensation: Monte Carlo mean of the path is near zero") {
  Rng rng(8086);
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const double w_cut = 200.0;
  const std::size_t reps = 4000;
  std::vector<std::vector<double>> vals(grid.size(), std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    const auto path = frac_levy_path(1.5, 1.5, 0.6, 0.4, grid, 2.0, w_cut, rng);
    for (std::size_t j = 0; j < grid.size(); ++j) vals[j][r] = path.values[j];
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto m = centered_moments(vals[j]);
    const double se = std::sqrt(m.m2 / double(reps));
    CHECK(std::fabs(m.mean) < 4.0 * se);
  }
}

TEST_CASE("limit sup scan") {
  LimitPath path;
  path.gamma = 1.5;
  SECTION("degenerate zero path: sup 0 at t = 0") {
    path.grid = {0.5, 1.0};
    path.values = {0.0, 0.0};
    const auto s = limit_sup(path);
    // path - t^gamma < 0 everywhere, so the origin wins
    CHECK(s.sup == 0.0);
    CHECK(s.argmax_t == 0.0);
    CHECK_FALSE(s.boundary_warn);
  }
  SECTION("interior maximum and lower bound property") {
    path.grid = {0.5, 1.0, 1.5};
    path.values = {2.0, 1.0, 0.5};
    const auto s = limit_sup(path);
    CHECK(s.sup == Catch::Approx(2.0 - std::pow(0.5, 1.5)));
    CHECK(s.argmax_t == 0.5);
    for (std::size_t j = 0; j < path.grid.size(); ++j)
      CHECK(s.sup >= path.values[j] - std::pow(path.grid[j], 1.5));
  }
  SECTION("boundary warning fires in the last decile") {
    path.grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    path.values = {0, 0, 0, 0, 0, 0, 0, 0, 0, 5.0};
    const auto s = limit_sup(path);
    CHECK(s.boundary_warn);
  }
}

TEST_CASE("typical sup decreases in gamma") {
  // The ordering is for the bulk only: a single jump J > 1 contributes about
  // (gamma-1)^{gamma-1} J^gamma to the sup, which grows with gamma, so the
  // upper quantiles cross over. The median reflects the stronger t^gamma
  // drift and does decrease.
  Rng rng(909);
  const auto grid = make_limit_grid(5.0, 64);
  const std::size_t reps = 400;
  std::vector<double> lo(reps), hi(reps);
  const double w_lo = choose_w_cut(1.3, 1.5, 5.0);
  const double w_hi = choose_w_cut(1.8, 1.5, 5.0);
  for (std::size_t r = 0; r < reps; ++r) {
    lo[r] = limit_sup(frac_levy_path(1.3, 1.5, 1.0, 0.0, grid, 5.0, w_lo, rng)).sup;
    hi[r] = limit_sup(frac_levy_path(1.8, 1.5, 1.0, 0.0, grid, 5.0, w_hi, rng)).sup;
  }
  CHECK(sample_quantile(hi, 0.5) < sample_quantile(lo, 0.5));
}

TEST_CASE("choose_w_cut meets the 1% residual rule") {
  const double gamma = 1.5, alpha = 1.5, t_max = 50.0;
  const double w = choose_w_cut(gamma, alpha, t_max);
  const double sd = gamma * std::sqrt(residual_tail_var(t_max, w, gamma, alpha));
  const double mean = gamma * upsilon_mean(t_max, w * t_max, gamma, alpha);
  CHECK(sd <= 0.01 * mean);
}

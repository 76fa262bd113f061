#include "catch_amalgamated.hpp"
#include "gfproc/innovations.hpp"
#include "gfproc/stats.hpp"

using namespace gfproc;

namespace {
InnovationModel one_sided() { return InnovationModel(QuantileModel(1.5, 1.0, 1.0)); }
InnovationModel symmetric() { return InnovationModel(QuantileModel(1.5, 1.0, 0.5)); }
}  // namespace

TEST_CASE("centering shift closed form") {
  CHECK(one_sided().centering_shift() == Catch::Approx(3.0).epsilon(1e-14));
  CHECK(symmetric().centering_shift() == Catch::Approx(0.0).margin(1e-14));
  const InnovationModel skew(QuantileModel(1.5, 2.0, 0.75));
  CHECK(skew.centering_shift() == Catch::Approx(0.5 * 3.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("sampling: mean, tail fraction and PIT") {
  const auto model = one_sided();
  Rng rng(20240817);
  auto draw = model.sampler();
  const std::size_t n = 1000000;
  std::vector<double> xs(n);
  for (auto &x : xs) x = draw(rng);
  // centered law: self-normalized mean within 4 empirical SE of 0
  const auto mom = centered_moments(xs);
  CHECK(std::fabs(mom.mean) < 4.0 * std::sqrt(mom.m2 / double(n)));
  // tail fraction above the (1 - 1e-3) quantile
  const double q = model.quantile(1.0 - 1e-3);
  std::size_t above = 0;
  for (double x : xs)
    if (x > q) ++above;
  const double frac = double(above) / double(n);
  const double se = std::sqrt(1e-3 * (1.0 - 1e-3) / double(n));
  CHECK(std::fabs(frac - 1e-3) < 4.0 * se);
}

TEST_CASE("PIT: empirical CDF vs model CDF (two-sided)") {
  const auto model = symmetric();
  Rng rng(7);
  std::vector<double> xs(100000);
  for (auto &x : xs) x = model.sample(rng);
  const double d =
      ks_one_sample(xs, [&model](double x) { return model.cdf(x); });
  CHECK(d < ks_one_sample_critical(xs.size(), 0.01));
}

TEST_CASE("sampler agrees in law with the generic quantile route") {
  const auto model = symmetric();
  Rng r1(11), r2(11);
  auto fast = model.sampler();
  for (int i = 0; i < 1000; ++i) {
    const double a = fast(r1);
    const double b = model.quantile(1.0 - r2.uniform());
    CHECK(a == Catch::Approx(b).margin(1e-12));
  }
}

TEST_CASE("mu_plus closed forms and quadrature agreement") {
  const auto model = one_sided();
  CHECK(model.mu_plus(1.0, 1.0) == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(model.mu_plus(1e4, 10.0) == Catch::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(model.mu_plus(10.0, 20.0), std::domain_error);
  for (double v : {0.9, 0.5, 0.1, 1e-3})
    CHECK(model.upper_integral(v) ==
          Catch::Approx(model.upper_integral_numeric(v)).epsilon(1e-8));
  const auto two = symmetric();
  for (double v : {0.3, 0.6, 0.95})
    CHECK(two.upper_integral(v) ==
          Catch::Approx(two.upper_integral_numeric(v)).epsilon(1e-8));
}

TEST_CASE("mu_plus matches the asymptotic (alpha/(alpha-1)) m^{1-1/alpha}/k(n)") {
  const auto model = one_sided();
  const ScalingFns fns(model.base());
  const double m = 5.0;
  // exact for the unperturbed Pareto family, so the ratio is 1 at every n
  for (double n : {1e4, 1e6, 1e8}) {
    const double ratio = model.mu_plus(n, m) * fns.k(n) /
                         ((1.5 / 0.5) * std::pow(m, 1.0 - 1.0 / 1.5));
    CHECK(std::fabs(ratio - 1.0) <= 1e-12);
  }
}

TEST_CASE("decomposition of the two-point law") {
  const DiscreteLaw law({{-1.0, 0.5}, {1.0, 0.5}});
  const auto d = decompose_UL(law);
  CHECK(d.theta == Catch::Approx(0.25).epsilon(1e-14));
  CHECK(d.t1 == 1.0);
  CHECK(d.tau1 == Catch::Approx(0.25).epsilon(1e-13));
  CHECK(d.t2 == -1.0);
  CHECK(d.tau2 == Catch::Approx(0.25).epsilon(1e-13));
  CHECK(d.r == Catch::Approx(0.5).epsilon(1e-13));
  // F_U = F_L = the law itself
  for (double x : {-1.5, -1.0, 0.0, 0.5, 1.0, 2.0}) {
    CHECK(d.cdf_U(x) == Catch::Approx(law.cdf(x)).margin(1e-12));
    CHECK(d.cdf_L(x) == Catch::Approx(law.cdf(x)).margin(1e-12));
  }
  CHECK(std::fabs(d.mean_U()) <= 1e-10);
  CHECK(std::fabs(d.mean_L()) <= 1e-10);
}

TEST_CASE("decomposition of the symmetric Pareto model") {
  const auto model = symmetric();
  const auto d = decompose_UL(model);
  CHECK(d.r > 0.0);
  CHECK(d.r < 1.0);
  // reconstruction r F_U + (1-r) F_L = F
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double rebuilt = d.r * d.cdf_U(x) + (1.0 - d.r) * d.cdf_L(x);
    CHECK(rebuilt == Catch::Approx(model.cdf(x)).margin(1e-12));
  }
  // upper tail carried entirely by F_U beyond t1
  for (double x : {d.t1, 2.0 * d.t1, 10.0 * d.t1})
    CHECK(d.r * (1.0 - d.cdf_U(x)) ==
          Catch::Approx(model.tail(x)).margin(1e-12));
  CHECK(std::fabs(d.mean_U()) <= 1e-10);
  CHECK(std::fabs(d.mean_L()) <= 1e-10);
}

TEST_CASE("mgf bound on F_L") {
  const auto model = symmetric();
  const auto d = decompose_UL(model);
  // lhs -> 1 as lambda -> 0, convex with slope 0 at 0
  const auto pts = mgf_check(d, model, {1e-5, 1e-3, 1e-2, 5e-2});
  CHECK(pts[0].lhs == Catch::Approx(1.0).margin(1e-4));
  CHECK(pts[1].lhs >= pts[0].lhs - 1e-12);
  CHECK(pts[2].lhs >= pts[1].lhs);
  // slope at 0 vanishes: (lhs(lambda) - 1)/lambda -> 0
  CHECK(std::fabs(pts[1].lhs - 1.0) / pts[1].lambda <
        std::fabs(pts[2].lhs - 1.0) / pts[2].lambda);
  // bound holds at the small end with the tail constant read off the model
  CHECK(pts[1].lhs <= pts[1].rhs * (1.0 + 1e-9));
}

#ifndef GFPROC_PATHSIM_HPP_
#define GFPROC_PATHSIM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gfproc/farima.hpp"
#include "gfproc/fft.hpp"
#include "gfproc/innovations.hpp"
#include "gfproc/regvar.hpp"
#include "gfproc/rng.hpp"

namespace gfproc {

// One realized trajectory S_1..S_n of the moving-average process
// S_n = sum_{0 <= i < n} g_i X_{n-i}.
struct PathSample {
  std::vector<double> s;        // s[k] = S_{k+1}
  double a = 0.0;               // drift scale
  double sup = 0.0;             // max of S_n - a g_[0,n)
  std::size_t argmax = 1;       // 1-based, first index attaining the max
  std::uint64_t seed = 0;
};

// Exact discrete convolution of the coefficients with an innovation
// stream; direct quadratic evaluation below the crossover, block FFT
// convolution above.
inline std::vector<double> simulate_path(const CoeffTable &coeffs,
                                         const std::vector<double> &innovations,
                                         std::size_t n_max) {
  if (n_max > coeffs.size() || n_max > innovations.size())
    throw std::invalid_argument("simulate_path: n_max exceeds inputs");
  std::vector<double> g(coeffs.g.begin(), coeffs.g.begin() + n_max);
  std::vector<double> x(innovations.begin(), innovations.begin() + n_max);
  if (n_max <= (1u << 12)) return detail::convolve_prefix_direct(g, x);
  return detail::convolve_prefix_fft(g, x);
}

inline std::vector<double> simulate_path(const CoeffTable &coeffs,
                                         const InnovationModel &model,
                                         std::size_t n_max, Rng &rng) {
  if (n_max > coeffs.size())
    throw std::invalid_argument("simulate_path: n_max exceeds coefficients");
  auto draw = model.sampler();
  std::vector<double> x(n_max);
  for (auto &v : x) v = draw(rng);
  return simulate_path(coeffs, x, n_max);
}

// Scan maximum of S_n - a g_[0,n) over n = 1..n_max; ties broken by the
// first index attaining the maximum.
inline PathSample sup_statistic(std::vector<double> path,
                                const CoeffTable &coeffs, double a) {
  if (path.empty()) throw std::invalid_argument("sup_statistic: empty path");
  if (!(a >= 0.0)) throw std::invalid_argument("sup_statistic: a < 0");
  PathSample out;
  out.a = a;
  out.sup = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double v = path[k] - a * coeffs.G[k];
    if (v > out.sup) {
      out.sup = v;
      out.argmax = k + 1;
    }
  }
  out.s = std::move(path);
  return out;
}

// sup / (a g(1 - 1/k^<-(1/a))), the normalizer of the limit theorem.
inline double scaled_sup(double sup, double a, const GSpec &spec,
                         const ScalingFns &scaling) {
  if (!(a > 0.0)) throw std::domain_error("scaled_sup: a <= 0");
  const double lambda = scaling.k_inverse(1.0 / a);
  return sup / (a * spec.value_at(1.0 - 1.0 / lambda));
}

// Horizon policy: simulate up to C * Lambda^{1+eps} steps with
// Lambda = k^<-(1/a); n_cap bounds the horizon when the budget requires it.
struct HorizonPolicy {
  double eps = 0.5;
  double multiplier = 1.0;
  double warn_fraction = 0.9;
  std::size_t n_cap = 0;  // 0: uncapped
};

inline std::size_t horizon(const HorizonPolicy &policy, double a,
                           const ScalingFns &scaling) {
  const double lambda = scaling.k_inverse(1.0 / a);
  double h = policy.multiplier * std::pow(lambda, 1.0 + policy.eps);
  if (!(h < 9e18)) throw std::overflow_error("horizon: count overflow");
  // absorb inversion noise before ceiling so near-integer targets stay exact
  const double r = std::nearbyint(h);
  if (std::fabs(h - r) < 1e-6 * std::max(1.0, r)) h = r;
  std::size_t n = static_cast<std::size_t>(std::ceil(h));
  if (n == 0) n = 1;
  if (policy.n_cap > 0 && n > policy.n_cap) n = policy.n_cap;
  return n;
}

// Middle/extreme decomposition of a single S_n: innovations are split at
// the tail thresholds a_n < 0 < b_n into a standardized middle part and
// the upper/lower extreme sums. Components satisfy
//   S_n = middle + t_plus + t_minus + g_[0,n) * truncated_mean .
struct SplitResult {
  double middle = 0.0;     // sigma_n sum g_i Z_{n-i,n}
  double t_plus = 0.0;     // sum g_i X_{n-i} 1{X > b_n}
  double t_minus = 0.0;    // sum g_i X_{n-i} 1{X < a_n}
  double truncated_mean = 0.0;
  double sigma_n = 0.0;
  double drift = 0.0;      // g_[0,n) * truncated_mean
};

inline SplitResult middle_extreme_split(const std::vector<double> &innovations,
                                        const CoeffTable &coeffs,
                                        const InnovationModel &model,
                                        std::size_t n, double a_n, double b_n) {
  if (n == 0 || n > innovations.size() || n > coeffs.size())
    throw std::invalid_argument("middle_extreme_split: bad n");
  if (!(a_n < 0.0 && b_n > 0.0))
    throw std::invalid_argument("middle_extreme_split: thresholds must straddle 0");
  SplitResult r;
  // truncated mean: E X 1_[a_n, b_n] = A(a_n) - A(b_n) for the centered law
  r.truncated_mean =
      model.upper_mean_above(a_n) - model.upper_mean_above(b_n);
  // truncated second moment by quadrature over the quantile scale
  const double fa = model.cdf(a_n), fb = model.cdf(b_n);
  const double second = detail::integrate(
      [&model](double u) {
        const double x = model.quantile(u);
        return x * x;
      },
      fa, fb, 1e-12);
  r.sigma_n = std::sqrt(std::max(0.0, second - r.truncated_mean * r.truncated_mean));

  // every slot enters the middle part through the truncated, recentered
  // innovation X 1_[a,b] - mean, so S_n = middle + T+ + T- + G_n * mean
  double mid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = coeffs.g[i];
    const double x = innovations[n - 1 - i];  // X_{n-i}
    double truncated = 0.0;
    if (x > b_n)
      r.t_plus += gi * x;
    else if (x < a_n)
      r.t_minus += gi * x;
    else
      truncated = x;
    mid += gi * (truncated - r.truncated_mean);
  }
  r.middle = mid;
  r.drift = coeffs.partial_sum(n) * r.truncated_mean;
  return r;
}

// Chernoff bound on P{S_{L,n} > T g_[0,n)/k(Lambda)} with
// lambda = k(n) log(n) / g_[0,n) and phi(t) = r + (1-r) phi_L(t).
inline double chernoff_crossing_bound(const CoeffTable &coeffs,
                                      const Decomposition &decomp,
                                      const ScalingFns &scaling, std::size_t n,
                                      double big_t, double lambda_cap) {
  if (n < 2 || n > coeffs.size())
    throw std::invalid_argument("chernoff_crossing_bound: bad n");
  const double gn_sum = coeffs.partial_sum(n);
  const double lam = scaling.k(double(n)) * std::log(double(n)) / gn_sum;
  double log_phi_sum = 0.0;
  const double r = decomp.r;
  if (r < 1.0) {  // phi == 1 identically when there is no lower component
    for (std::size_t i = 0; i < n; ++i) {
      const double phi_l = decomp.mgf_L(lam * coeffs.g[i]);
      if (!std::isfinite(phi_l))
        throw std::domain_error("chernoff_crossing_bound: divergent mgf");
      log_phi_sum += std::log(r + (1.0 - r) * phi_l);
    }
  }
  const double exponent =
      -lam * big_t * gn_sum / scaling.k(lambda_cap) + log_phi_sum;
  return std::exp(exponent);
}

}  // namespace gfproc

#endif  // GFPROC_PATHSIM_HPP_

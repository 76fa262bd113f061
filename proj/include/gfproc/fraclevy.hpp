#ifndef GFPROC_FRACLEVY_HPP_
#define GFPROC_FRACLEVY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gfproc/rng.hpp"
#include "gfproc/stats.hpp"

namespace gfproc {

// Unit-intensity Poisson points on the strip [0, t_max] x [0, w_cut]:
// V_i uniform, W_i the cumulated exponential gaps of rate t_max, retained
// while W_i <= w_cut.
struct PointCloud {
  double t_max = 0.0;
  double w_cut = 0.0;
  std::vector<double> v;
  std::vector<double> w;  // strictly increasing
};

inline PointCloud sample_points(double t_max, double w_cut, Rng &rng) {
  if (!(t_max > 0.0 && w_cut > 0.0))
    throw std::invalid_argument("sample_points: nonpositive strip");
  PointCloud cloud;
  cloud.t_max = t_max;
  cloud.w_cut = w_cut;
  const std::size_t expect = static_cast<std::size_t>(t_max * w_cut * 1.1) + 16;
  cloud.v.reserve(expect);
  cloud.w.reserve(expect);
  double w = 0.0;
  for (;;) {
    w += -std::log(rng.uniform()) / t_max;
    if (w > w_cut) break;
    cloud.w.push_back(w);
    cloud.v.push_back(t_max * rng.uniform());
  }
  return cloud;
}

namespace detail {

// (d)^{gamma-1} with a fast path for the reference gamma = 1.5.
inline double frac_kernel(double d, double gamma_m1) {
  if (gamma_m1 == 0.5) return std::sqrt(d);
  return std::pow(d, gamma_m1);
}

}  // namespace detail

// Upsilon_Lambda(t) = sum (t - V_i)_+^{gamma-1} W_i^{-1/alpha} 1{t W_i <= m}.
inline double upsilon(const PointCloud &cloud, double t, double m, double gamma,
                      double alpha) {
  if (!(t >= 0.0 && t <= cloud.t_max))
    throw std::domain_error("upsilon: t outside the strip");
  if (t == 0.0) return 0.0;
  if (cloud.w_cut < m / t)
    throw std::domain_error("upsilon: w_cut below m/t, truncation bias");
  const double gm1 = gamma - 1.0;
  const double inv_alpha = 1.0 / alpha;
  const double w_hi = m / t;
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.w.size(); ++i) {
    if (cloud.w[i] > w_hi) break;  // W increasing
    const double d = t - cloud.v[i];
    if (d <= 0.0) continue;
    s += detail::frac_kernel(d, gm1) * std::pow(cloud.w[i], -inv_alpha);
  }
  return s;
}

// E Upsilon_Lambda(t) = t^{gamma-1+1/alpha}/gamma * m^{(alpha-1)/alpha}
//                       * alpha/(alpha-1).
inline double upsilon_mean(double t, double m, double gamma, double alpha) {
  if (!(t >= 0.0 && m > 0.0))
    throw std::domain_error("upsilon_mean: bad arguments");
  if (t == 0.0) return 0.0;
  return std::pow(t, gamma - 1.0 + 1.0 / alpha) / gamma *
         std::pow(m, (alpha - 1.0) / alpha) * alpha / (alpha - 1.0);
}

// Closed-form integral of (f_t - f_{Lambda,t})^j over the excluded region
// w > m/t:
//   t^{j(gamma-1)+1}/(j(gamma-1)+1) * alpha/(j-alpha) * (m/t)^{(alpha-j)/alpha}
inline double residual_power_integral(int j, double t, double m, double gamma,
                                      double alpha) {
  if (!(double(j) > alpha))
    throw std::domain_error("residual_power_integral: need j > alpha");
  const double e = double(j) * (gamma - 1.0) + 1.0;
  return std::pow(t, e) / e * alpha / (double(j) - alpha) *
         std::pow(m / t, (alpha - double(j)) / alpha);
}

// Variance of the compensated truncation residual (j = 2 case).
inline double truncation_m2(double t, double m, double gamma, double alpha) {
  if (!(alpha < 2.0) || !(gamma > 0.5))
    throw std::domain_error("truncation_m2: singular parameters");
  return residual_power_integral(2, t, m, gamma, alpha);
}

// Centered moments M_2..M_{p_max} of the compensated truncation residual
// through the Poisson moment identity
//   M_p = sum_{0 <= k <= p-2} C(p-1, k) I_{p-k} M_k ,  M_0 = 1, M_1 = 0.
inline std::vector<double> moment_recursion(int p_max, double t, double m,
                                            double gamma, double alpha) {
  if (p_max < 2) throw std::invalid_argument("moment_recursion: p_max < 2");
  std::vector<double> moments(p_max + 1, 0.0);
  moments[0] = 1.0;
  moments[1] = 0.0;
  for (int p = 2; p <= p_max; ++p) {
    double acc = 0.0;
    double binom = 1.0;  // C(p-1, k) built up incrementally
    for (int k = 0; k <= p - 2; ++k) {
      acc += binom * residual_power_integral(p - k, t, m, gamma, alpha) *
             moments[k];
      binom *= double(p - 1 - k) / double(k + 1);
    }
    moments[p] = acc;
  }
  return {moments.begin() + 2, moments.end()};
}

// One sample of the compensated truncation residual
//   int (f_t - f_{Lambda,t}) d(Pi - E Pi)
// from points in the band m/t < w <= cloud.w_cut; the part of the band
// beyond w_cut is returned separately by residual_band_mean/var so callers
// can complete the tail (it is asymptotically Gaussian).
inline double truncation_residual(const PointCloud &cloud, double t, double m,
                                  double gamma, double alpha) {
  if (!(t > 0.0 && t <= cloud.t_max))
    throw std::domain_error("truncation_residual: t outside the strip");
  const double w_lo = m / t;
  if (cloud.w_cut <= w_lo)
    throw std::domain_error("truncation_residual: w_cut inside kept region");
  const double gm1 = gamma - 1.0;
  const double inv_alpha = 1.0 / alpha;
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.w.size(); ++i) {
    if (cloud.w[i] <= w_lo) continue;
    const double d = t - cloud.v[i];
    if (d <= 0.0) continue;
    s += detail::frac_kernel(d, gm1) * std::pow(cloud.w[i], -inv_alpha);
  }
  // compensator of the band (m/t, w_cut]
  const double mean_band =
      upsilon_mean(t, cloud.w_cut * t, gamma, alpha) -
      upsilon_mean(t, m, gamma, alpha);
  return s - mean_band;
}

// Variance of the residual part beyond w_hi (for the Gaussian tail
// completion of Monte Carlo oracles).
inline double residual_tail_var(double t, double w_hi, double gamma,
                                double alpha) {
  return truncation_m2(t, w_hi * t, gamma, alpha);
}

// A fractional Levy stable path sampled exactly at grid nodes from
// truncated Poisson series; two independent one-sided clouds combined as
// p^{1/alpha} L^+ - q^{1/alpha} L~^+.
struct LimitPath {
  std::vector<double> grid;
  std::vector<double> values;
  double gamma = 0.0, alpha = 0.0, p = 1.0, q = 0.0;
  double w_cut = 0.0;
  double compensator_scale = 0.0;  // (alpha/(alpha-1)) w_cut^{(alpha-1)/alpha}
};

namespace detail {

inline void accumulate_one_sided(const PointCloud &cloud,
                                 const std::vector<double> &grid, double gamma,
                                 double alpha, double weight,
                                 std::vector<double> &out) {
  const double gm1 = gamma - 1.0;
  const double inv_alpha = 1.0 / alpha;
  const double comp =
      alpha / (alpha - 1.0) * std::pow(cloud.w_cut, (alpha - 1.0) / alpha);
  // points sorted by arrival time so each node only scans V_i < t
  const std::size_t npts = cloud.v.size();
  std::vector<std::pair<double, double>> pts(npts);
  for (std::size_t i = 0; i < npts; ++i)
    pts[i] = {cloud.v[i], std::pow(cloud.w[i], -inv_alpha)};
  std::sort(pts.begin(), pts.end());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid[j];
    if (t <= 0.0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < npts && pts[i].first < t; ++i)
      s += frac_kernel(t - pts[i].first, gm1) * pts[i].second;
    out[j] += weight * (gamma * s - std::pow(t, gamma) * comp);
  }
}

// Normal approximation of the omitted small jumps (w > w_cut): adds the
// Gaussian process weight_scale * gamma * sqrt(c2) * int_0^t (t-v)^{gamma-1}
// dB(v), c2 = int_{w_cut}^inf w^{-2/alpha} dw, so the completed path has the
// exact second-order structure at every t. Midpoint discretization over the
// grid cells; requires a nondecreasing grid.
inline void add_gaussian_remainder(const std::vector<double> &grid,
                                   double gamma, double alpha, double w_cut,
                                   double weight_scale, Rng &rng,
                                   std::vector<double> &out) {
  const double gm1 = gamma - 1.0;
  const double c2 = std::pow(w_cut, 1.0 - 2.0 / alpha) / (2.0 / alpha - 1.0);
  const double scale = weight_scale * gamma * std::sqrt(c2);
  const std::size_t n = grid.size();
  std::vector<double> mid(n), db(n);
  double lo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = grid[i];
    if (hi < lo) throw std::invalid_argument("add_gaussian_remainder: grid");
    mid[i] = 0.5 * (lo + hi);
    db[i] = hi > lo ? std::sqrt(hi - lo) * rng.normal() : 0.0;
    lo = hi;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double t = grid[j];
    double s = 0.0;
    for (std::size_t i = 0; i <= j; ++i)
      if (mid[i] < t && db[i] != 0.0)
        s += frac_kernel(t - mid[i], gm1) * db[i];
    out[j] += scale * s;
  }
}

}  // namespace detail

// Pick w_cut so that the omitted-jump residual standard deviation is at
// most rel_target of the series mean at the largest grid time.
inline double choose_w_cut(double gamma, double alpha, double t_max,
                           double rel_target = 0.01) {
  double w = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double sd =
        gamma * std::sqrt(residual_tail_var(t_max, w, gamma, alpha));
    const double mean = gamma * upsilon_mean(t_max, w * t_max, gamma, alpha);
    if (sd <= rel_target * mean) return w;
    w *= 1.5;
  }
  throw std::runtime_error("choose_w_cut: no admissible truncation found");
}

inline LimitPath frac_levy_path(double gamma, double alpha, double p, double q,
                                std::vector<double> grid, double t_max,
                                double w_cut, Rng &rng,
                                bool complete_small_jumps = true) {
  if (std::fabs(p + q - 1.0) > 1e-12 || p <= 0.0 || q < 0.0)
    throw std::invalid_argument("frac_levy_path: bad tail weights");
  for (double t : grid)
    if (t < 0.0 || t > t_max)
      throw std::invalid_argument("frac_levy_path: grid outside [0, t_max]");
  LimitPath path;
  path.gamma = gamma;
  path.alpha = alpha;
  path.p = p;
  path.q = q;
  path.w_cut = w_cut;
  path.compensator_scale =
      alpha / (alpha - 1.0) * std::pow(w_cut, (alpha - 1.0) / alpha);
  path.values.assign(grid.size(), 0.0);

  const PointCloud upper = sample_points(t_max, w_cut, rng);
  detail::accumulate_one_sided(upper, grid, gamma, alpha,
                               std::pow(p, 1.0 / alpha), path.values);
  if (q > 0.0) {
    const PointCloud lower = sample_points(t_max, w_cut, rng);
    detail::accumulate_one_sided(lower, grid, gamma, alpha,
                                 -std::pow(q, 1.0 / alpha), path.values);
  }
  if (complete_small_jumps) {
    const double weight_scale = std::sqrt(std::pow(p, 2.0 / alpha) +
                                          std::pow(q, 2.0 / alpha));
    detail::add_gaussian_remainder(grid, gamma, alpha, w_cut, weight_scale,
                                   rng, path.values);
  }
  path.grid = std::move(grid);
  return path;
}

// Grid-scan maximum of path(t) - t^gamma including the origin (value 0).
struct LimitSup {
  double sup = 0.0;
  double argmax_t = 0.0;
  bool boundary_warn = false;
};

inline LimitSup limit_sup(const LimitPath &path) {
  LimitSup out;  // t = 0 contributes 0
  std::size_t arg = 0;
  bool interior = true;
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    const double t = path.grid[j];
    const double v = path.values[j] - std::pow(t, path.gamma);
    if (v > out.sup) {
      out.sup = v;
      out.argmax_t = t;
      arg = j;
      interior = false;
    }
  }
  out.boundary_warn = !interior && arg >= (path.grid.size() * 9) / 10;
  return out;
}

// Default evaluation grid: geometric on [0.01, 1], linear above.
// Geometric refinement below t = 1 reaches t_min: the sup functional is
// a.s. positive only through excursions at ever smaller times, so the
// grid cutoff induces a spurious atom at zero of order t_min^{rho'} that
// must sit below the resolution 1/Lambda of any pre-limit comparison.
inline std::vector<double> make_limit_grid(double t_max,
                                           std::size_t nodes = 2048,
                                           double t_min = 1e-5) {
  if (nodes < 16) throw std::invalid_argument("make_limit_grid: too few nodes");
  if (!(t_min > 0.0 && t_min < 1.0 && t_max > 1.0))
    throw std::invalid_argument("make_limit_grid: need 0 < t_min < 1 < t_max");
  std::vector<double> grid;
  grid.reserve(nodes);
  const std::size_t geo = nodes / 2;
  const double ratio = std::pow(1.0 / t_min, 1.0 / double(geo - 1));
  double t = t_min;
  for (std::size_t i = 0; i < geo; ++i, t *= ratio) grid.push_back(std::min(t, 1.0));
  const std::size_t lin = nodes - geo;
  for (std::size_t i = 1; i <= lin; ++i)
    grid.push_back(1.0 + (t_max - 1.0) * double(i) / double(lin));
  return grid;
}

// Two-sample KS statistics for the self-similarity law
// Upsilon(lambda t) =d lambda^{gamma-1+1/alpha} Upsilon(t).
inline std::vector<std::pair<double, double>> upsilon_scaling_check(
    double gamma, double alpha, double m, double lambda,
    const std::vector<double> &t_grid, std::size_t replicates, Rng &rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling check: lambda <= 0");
  std::vector<std::pair<double, double>> out;
  const double scale = std::pow(lambda, gamma - 1.0 + 1.0 / alpha);
  for (double t : t_grid) {
    const double t_big = std::max(t, lambda * t);
    std::vector<double> left(replicates), right(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
      const PointCloud c1 = sample_points(t_big, m / (lambda * t) + 1.0, rng);
      left[r] = upsilon(c1, lambda * t, m, gamma, alpha);
      const PointCloud c2 = sample_points(t_big, m / t + 1.0, rng);
      right[r] = scale * upsilon(c2, t, m, gamma, alpha);
    }
    out.emplace_back(t, ks_two_sample(left, right));
  }
  return out;
}

}  // namespace gfproc

#endif  // GFPROC_FRACLEVY_HPP_

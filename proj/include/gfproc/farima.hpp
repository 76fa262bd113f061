#ifndef GFPROC_FARIMA_HPP_
#define GFPROC_FARIMA_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gfproc {

namespace detail {

// Durand-Kerner iteration; good enough for the low-degree AR/MA
// polynomials used here.
inline std::vector<std::complex<double>> poly_roots(
    const std::vector<double> &coeffs) {
  std::size_t deg = coeffs.size();
  while (deg > 1 && coeffs[deg - 1] == 0.0) --deg;
  if (deg <= 1) return {};
  const std::size_t d = deg - 1;
  std::vector<std::complex<double>> monic(d + 1);
  for (std::size_t i = 0; i <= d; ++i) monic[i] = coeffs[i] / coeffs[d];
  std::vector<std::complex<double>> roots(d);
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> acc(1.0, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    acc *= seed;
    roots[i] = acc;
  }
  for (int iter = 0; iter < 500; ++iter) {
    double step = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      std::complex<double> val(0.0, 0.0);
      for (std::size_t k = d + 1; k-- > 0;) val = val * roots[i] + monic[k];
      std::complex<double> den(1.0, 0.0);
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) den *= roots[i] - roots[j];
      const std::complex<double> delta = val / den;
      roots[i] -= delta;
      step = std::max(step, std::abs(delta));
    }
    if (step < 1e-13) break;
  }
  return roots;
}

inline double poly_eval(const std::vector<double> &coeffs, double x) {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
  return v;
}

}  // namespace detail

// g = (1 - x)^{-gamma} Theta(x) / Phi(x); polynomial coefficients in
// ascending order.
struct GSpec {
  double gamma;
  std::vector<double> theta{1.0};
  std::vector<double> phi{1.0};

  GSpec(double gamma_, std::vector<double> theta_ = {1.0},
        std::vector<double> phi_ = {1.0})
      : gamma(gamma_), theta(std::move(theta_)), phi(std::move(phi_)) {
    if (!(gamma > 0.0)) throw std::invalid_argument("GSpec: gamma <= 0");
    if (theta.empty() || phi.empty())
      throw std::invalid_argument("GSpec: empty polynomial");
    if (phi[0] == 0.0) throw std::invalid_argument("GSpec: Phi(0) = 0");
    if (detail::poly_eval(theta, 1.0) == 0.0)
      throw std::invalid_argument("GSpec: Theta(1) = 0");
    for (const auto &root : detail::poly_roots(phi))
      if (std::abs(root) <= 1.0 + 1e-9)
        throw std::invalid_argument("GSpec: Phi has a root inside the closed unit disk");
  }

  bool pure_fractional() const {
    return theta.size() == 1 && phi.size() == 1 && theta[0] == 1.0 &&
           phi[0] == 1.0;
  }

  // Closed-form evaluation on (0,1).
  double value_at(double x) const {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("GSpec: x outside (0,1)");
    return std::pow(1.0 - x, -gamma) * detail::poly_eval(theta, x) /
           detail::poly_eval(phi, x);
  }
};

// Taylor coefficients g_0..g_{n-1} of g at 0 and the partial sums
// G_k = g_[0,k). Sums are compensated: G_n grows like n^gamma and the
// o(n^{-delta}) diagnostics need the low-order digits.
struct CoeffTable {
  std::vector<double> g;
  std::vector<double> G;  // G[k-1] = g_0 + ... + g_{k-1}

  std::size_t size() const { return g.size(); }
  double partial_sum(std::size_t n) const {  // g_[0,n)
    if (n == 0 || n > G.size()) throw std::out_of_range("partial_sum");
    return G[n - 1];
  }
};

inline CoeffTable build_coeffs(const GSpec &spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("build_coeffs: n = 0");
  CoeffTable table;
  table.g.resize(n);
  table.G.resize(n);

  // binomial recursion for (1 - x)^{-gamma}
  std::vector<double> b(n);
  b[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i)
    b[i] = b[i - 1] * (double(i) - 1.0 + spec.gamma) / double(i);

  // multiply by Theta
  const auto &theta = spec.theta;
  const auto &phi = spec.phi;
  const bool trivial = theta.size() == 1 && phi.size() == 1;
  if (trivial) {
    const double scale = theta[0] / phi[0];
    for (std::size_t i = 0; i < n; ++i) table.g[i] = b[i] * scale;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const std::size_t jmax = std::min(theta.size() - 1, i);
      for (std::size_t j = 0; j <= jmax; ++j) acc += theta[j] * b[i - j];
      // divide by Phi through the induced recurrence
      const std::size_t kmax = std::min(phi.size() - 1, i);
      for (std::size_t k = 1; k <= kmax; ++k) acc -= phi[k] * table.g[i - k];
      table.g[i] = acc / phi[0];
    }
  }

  // Kahan partial sums
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = table.g[i] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    table.G[i] = sum;
  }
  return table;
}

// gamma * g_[0,n) / (n * g_{n-1}); tends to 1 by Karamata's theorem for
// power series.
inline double karamata_ratio(const CoeffTable &table, const GSpec &spec,
                             std::size_t n) {
  if (n == 0 || n > table.size()) throw std::out_of_range("karamata_ratio: n");
  const double gn = table.g[n - 1];
  if (gn == 0.0) throw std::domain_error("karamata_ratio: g_{n-1} = 0");
  return spec.gamma * table.partial_sum(n) / (double(n) * gn);
}

// n^delta * sup_{n^{1-delta} <= i <= n} |g_i/g_n - (i/n)^{gamma-1}|.
inline double check_hypMg(const CoeffTable &table, const GSpec &spec,
                          double delta, std::size_t n) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("check_hypMg: delta outside (0, 1/2)");
  if (n == 0 || n + 1 > table.size())
    throw std::out_of_range("check_hypMg: need coefficients up to g_n");
  const double gn = table.g[n];
  const double i_lo = std::pow(double(n), 1.0 - delta);
  double sup = 0.0;
  for (std::size_t i = std::size_t(i_lo); i <= n; ++i) {
    if (i == 0 || double(i) < i_lo) continue;
    const double dev = std::fabs(table.g[i] / gn -
                                 std::pow(double(i) / double(n), spec.gamma - 1.0));
    sup = std::max(sup, dev);
  }
  return std::pow(double(n), delta) * sup;
}

}  // namespace gfproc

#endif  // GFPROC_FARIMA_HPP_

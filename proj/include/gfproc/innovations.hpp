#ifndef GFPROC_INNOVATIONS_HPP_
#define GFPROC_INNOVATIONS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "gfproc/regvar.hpp"
#include "gfproc/rng.hpp"

namespace gfproc {

namespace detail {

// Adaptive Simpson with absolute tolerance.
template <class F>
double adaptive_simpson(F &&f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F &&f, double a, double b, double tol = 1e-10) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

// Centered innovation law: a QuantileModel with the explicit shift mu_c
// that makes the mean exactly zero. For the unperturbed two-sided Pareto
// family mu_c = (p - q) * alpha * c / (alpha - 1) in closed form.
class InnovationModel {
 public:
  explicit InnovationModel(QuantileModel model) : base_(std::move(model)) {
    const double alpha = base_.alpha();
    if (base_.perturbation() == Perturbation::kNone) {
      mu_c_ = (base_.upper_weight() - base_.lower_weight()) * alpha *
              base_.scale() / (alpha - 1.0);
    } else {
      mu_c_ = upper_integral(1.0);  // numeric mean of the base law
    }
  }

  const QuantileModel &base() const { return base_; }
  double alpha() const { return base_.alpha(); }
  double centering_shift() const { return mu_c_; }
  bool bounded_below() const { return base_.one_sided(); }
  double lower_endpoint() const { return base_.scale() - mu_c_; }

  // Centered quantile and CDF.
  double quantile(double u) const { return base_.quantile(u) - mu_c_; }
  double cdf(double x) const { return base_.cdf(x + mu_c_); }
  double tail(double x) const { return base_.tail(x + mu_c_); }
  double lower_tail(double x) const {  // P{-X > x}
    return base_.cdf(-x + mu_c_);
  }

  double sample(Rng &rng) const { return quantile(1.0 - rng.uniform()); }

  // Fast sampler for the Monte Carlo hot loop; falls back to the generic
  // quantile for perturbed models.
  std::function<double(Rng &)> sampler() const {
    const double alpha = base_.alpha();
    const double c = base_.scale();
    const double mu = mu_c_;
    if (base_.perturbation() == Perturbation::kNone && base_.one_sided()) {
      const double inv_alpha = 1.0 / alpha;
      return [c, mu, inv_alpha](Rng &rng) {
        return c * std::pow(rng.uniform(), -inv_alpha) - mu;
      };
    }
    if (base_.perturbation() == Perturbation::kNone) {
      const double p = base_.upper_weight();
      const double q = base_.lower_weight();
      const double inv_alpha = 1.0 / alpha;
      return [c, mu, p, q, inv_alpha](Rng &rng) {
        const double v = rng.uniform();  // v plays 1 - u
        if (v < p) return c * std::pow(v / p, -inv_alpha) - mu;
        return -c * std::pow((1.0 - v) / q, -inv_alpha) - mu;
      };
    }
    const QuantileModel base = base_;
    return [base, mu](Rng &rng) {
      return base.quantile(1.0 - rng.uniform()) - mu;
    };
  }

  // M(v) = integral_0^v F_base^<-(1-u) du: mean of the base law above its
  // (1-v)-quantile. Closed form for the unperturbed family, substitution +
  // adaptive quadrature otherwise.
  double upper_integral(double v) const {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("upper_integral: v outside [0,1]");
    if (v == 0.0) return 0.0;
    const double alpha = base_.alpha();
    const double aa = alpha / (alpha - 1.0);
    const double c = base_.scale();
    const double p = base_.upper_weight();
    const double q = base_.lower_weight();
    if (base_.perturbation() == Perturbation::kNone) {
      const double vp = std::min(v, p);
      double m = c * std::pow(p, 1.0 / alpha) * aa *
                 std::pow(vp, (alpha - 1.0) / alpha);
      if (v > p)
        m -= c * std::pow(q, 1.0 / alpha) * aa *
             (std::pow(q, (alpha - 1.0) / alpha) -
              std::pow(1.0 - v, (alpha - 1.0) / alpha));
      return m;
    }
    return upper_integral_numeric(v);
  }

  // Quadrature route for M(v); exposed so the closed form can be checked
  // against it.
  double upper_integral_numeric(double v) const {
    const double alpha = base_.alpha();
    const double p = base_.upper_weight();
    double total = 0.0;
    const double vp = std::min(v, p);
    {
      // u = z^r removes the u^{-1/alpha} singularity at the top quantile
      const double r = 2.0 * alpha / (alpha - 1.0) + 2.0;
      const auto &base = base_;
      total += detail::integrate(
          [&base, r](double z) {
            const double u = std::pow(z, r);
            if (u <= 0.0) return 0.0;
            return base.upper_quantile_tail(u) * r * std::pow(z, r - 1.0);
          },
          0.0, std::pow(vp, 1.0 / r), 1e-11);
    }
    if (v > p) {
      // lower branch: symmetric singularity at u -> 1
      const double q = base_.lower_weight();
      const double w_lo = 1.0 - v;  // in (0, q]
      const double r = 2.0 * alpha / (alpha - 1.0) + 2.0;
      const auto &base = base_;
      const double z_lo = std::pow(w_lo / q, 1.0 / r);
      total -= detail::integrate(
          [&base, r, q](double z) {
            const double w = q * std::pow(z, r);
            if (w <= 0.0) return 0.0;
            return -base.quantile(w) * q * r * std::pow(z, r - 1.0);
          },
          z_lo, 1.0, 1e-11);
    }
    return total;
  }

  // mu_n^+ = E[X 1{X > F^<-(1 - m/n)}] of the base (uncentered) law.
  double mu_plus(double n, double m) const {
    if (!(m > 0.0 && m <= n))
      throw std::domain_error("mu_plus: need 0 < m <= n");
    return upper_integral(m / n);
  }

  // A(t) = E[X 1{X > t}] of the centered law; decreasing on [0, inf),
  // increasing on (-inf, 0], with A(-inf) = A(+inf) = 0.
  double upper_mean_above(double t) const {
    const double v = base_.tail(t + mu_c_);
    return upper_integral(v) - mu_c_ * v;
  }

 private:
  QuantileModel base_;
  double mu_c_ = 0.0;
};

// Finite discrete law given by (point, mass) atoms.
struct DiscreteLaw {
  std::vector<std::pair<double, double>> atoms;  // sorted by point

  explicit DiscreteLaw(std::vector<std::pair<double, double>> a)
      : atoms(std::move(a)) {
    std::sort(atoms.begin(), atoms.end());
    double mass = 0.0, mean = 0.0;
    for (const auto &[x, m] : atoms) {
      if (m <= 0.0) throw std::invalid_argument("DiscreteLaw: mass <= 0");
      mass += m;
      mean += x * m;
    }
    if (std::fabs(mass - 1.0) > 1e-12)
      throw std::invalid_argument("DiscreteLaw: masses must sum to 1");
    if (std::fabs(mean) > 1e-12)
      throw std::invalid_argument("DiscreteLaw: law must be centered");
  }

  double cdf(double x) const {
    double f = 0.0;
    for (const auto &[xi, m] : atoms)
      if (xi <= x) f += m;
    return f;
  }
  double mass_at(double x) const {
    for (const auto &[xi, m] : atoms)
      if (xi == x) return m;
    return 0.0;
  }
  double upper_mean_above(double t) const {  // A(t)
    double a = 0.0;
    for (const auto &[xi, m] : atoms)
      if (xi > t) a += xi * m;
    return a;
  }
};

// Decomposition F = r F_U + (1-r) F_L with F_U bounded below and F_L
// bounded above, both centered. Cut points t_1, t_2 and atom masses
// tau_1, tau_2 as in the construction through A(t) and B(t); tau_2 solves
// B(t_2) + tau_2 t_2 = -theta (the variant that keeps tau_2 in
// [0, jump of F at t_2]).
struct Decomposition {
  double r = 0.0;
  double theta = 0.0;
  double t1 = 0.0, t2 = 0.0;
  double tau1 = 0.0, tau2 = 0.0;

  std::function<double(double)> cdf_F;     // the source law
  std::function<double(double)> cdf_U;
  std::function<double(double)> cdf_L;
  std::function<double(double)> mgf_L;     // moment generating fn of F_L
  std::function<double(void)> mean_U;      // numeric means, for checking
  std::function<double(void)> mean_L;
};

namespace detail {

inline Decomposition assemble_decomposition(
    std::function<double(double)> cdf, double theta, double t1, double tau1,
    double t2, double tau2) {
  Decomposition d;
  d.theta = theta;
  d.t1 = t1;
  d.tau1 = tau1;
  d.t2 = t2;
  d.tau2 = tau2;
  const double f_t2 = cdf(t2);
  const double f_0 = cdf(0.0);
  const double f_t1 = cdf(t1);
  d.r = (f_0 - f_t2) + (1.0 - f_t1) + tau1 + tau2;
  if (!(d.r > 0.0 && d.r < 1.0))
    throw std::domain_error("decompose: degenerate r");
  d.cdf_F = cdf;
  const double r = d.r;
  d.cdf_U = [cdf, t1, t2, tau1, tau2, f_t2, f_0, f_t1, r](double x) {
    double m = 0.0;
    if (x >= t2) m += tau2;
    if (x > t2) m += std::min(cdf(x), f_0) - f_t2;
    if (x >= t1) m += tau1;
    if (x > t1) m += cdf(x) - f_t1;
    return m / r;
  };
  const auto cdf_u = d.cdf_U;
  d.cdf_L = [cdf, cdf_u, r](double x) {
    return (cdf(x) - r * cdf_u(x)) / (1.0 - r);
  };
  return d;
}

}  // namespace detail

// Decomposition of a continuous innovation model. The cut points are
// located by bisection on A(t) = E[X 1{X > t}]; since theta = A(0)/2, the
// relation B(t) = A(t) - A(0) turns both cuts into A-level crossings at
// theta.
inline Decomposition decompose_UL(const InnovationModel &model) {
  if (model.bounded_below() && model.lower_endpoint() >= 0.0)
    throw std::domain_error("decompose_UL: law has no lower tail");
  const double a0 = model.upper_mean_above(0.0);
  const double theta = 0.5 * a0;

  // t1 on the positive side: A decreasing, A(0) = 2 theta
  double lo = 0.0, hi = 1.0;
  while (model.upper_mean_above(hi) >= theta) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (model.upper_mean_above(mid) >= theta ? lo : hi) = mid;
  }
  const double t1 = 0.5 * (lo + hi);

  // t2 on the negative side: A increasing towards A(0)
  double nlo = -1.0, nhi = 0.0;
  while (model.upper_mean_above(nlo) >= theta) nlo *= 2.0;
  for (int it = 0; it < 200 && nhi - nlo > 1e-14 * std::max(1.0, -nlo); ++it) {
    const double mid = 0.5 * (nlo + nhi);
    (model.upper_mean_above(mid) >= theta ? nhi : nlo) = mid;
  }
  const double t2 = 0.5 * (nlo + nhi);

  auto cdf = [model](double x) { return model.cdf(x); };
  Decomposition d =
      detail::assemble_decomposition(cdf, theta, t1, 0.0, t2, 0.0);

  const double r = d.r;
  const double f_t2 = model.cdf(t2);
  const double f_0 = model.cdf(0.0);
  const double f_t1 = model.cdf(t1);
  d.mgf_L = [model, r, f_t2, f_0, f_t1](double lam) {
    // exp(lam x) integrated over the (-inf, t2] and (0, t1] pieces of F
    auto g = [&model, lam](double u) {
      return std::exp(lam * model.quantile(u));
    };
    const double low = detail::integrate(g, 1e-300, f_t2, 1e-12);
    const double mid = detail::integrate(g, f_0, f_t1, 1e-12);
    return (low + mid) / (1.0 - r);
  };
  d.mean_U = [model, r, f_t2, f_0, t1]() {
    auto g = [&model](double u) { return model.quantile(u); };
    const double low = detail::integrate(g, f_t2, f_0, 1e-12);
    return (low + model.upper_mean_above(t1)) / r;
  };
  d.mean_L = [model, r, f_t2, f_0, f_t1]() {
    auto g = [&model](double u) { return model.quantile(u); };
    // lower piece: u in (0, f_t2]; substitution tames the quantile blowup
    const double alpha = model.alpha();
    const double rr = 2.0 * alpha / (alpha - 1.0) + 2.0;
    const double low = detail::integrate(
        [&model, rr, f_t2](double z) {
          const double u = f_t2 * std::pow(z, rr);
          if (u <= 0.0) return 0.0;
          return model.quantile(u) * f_t2 * rr * std::pow(z, rr - 1.0);
        },
        0.0, 1.0, 1e-12);
    const double mid = detail::integrate(g, f_0, f_t1, 1e-12);
    return (low + mid) / (1.0 - r);
  };
  return d;
}

// Decomposition of a finite discrete law, with atom splitting at the cut
// points.
inline Decomposition decompose_UL(const DiscreteLaw &law) {
  const double a0 = law.upper_mean_above(0.0);
  if (a0 <= 0.0) throw std::domain_error("decompose_UL: no positive part");
  const double theta = 0.5 * a0;

  // t1 = inf{t >= 0 : A(t) < theta}: A is a right-continuous step
  // function dropping across positive atoms, so the cut lands on the
  // first positive atom whose post-drop value is below theta.
  double t1 = 0.0, tau1 = 0.0;
  {
    bool found = false;
    for (const auto &[x, m] : law.atoms) {
      if (x <= 0.0) continue;
      if (law.upper_mean_above(x) < theta) {
        t1 = x;
        found = true;
        break;
      }
    }
    if (!found) throw std::domain_error("decompose_UL: t1 not found");
    const double a_t1 = law.upper_mean_above(t1);
    if (a_t1 < theta) tau1 = (theta - a_t1) / t1;
  }

  // t2 = sup{t : B(t) < -theta}; B(t) = A(t) - A(0)
  double t2 = 0.0, tau2 = 0.0;
  {
    bool found = false;
    for (auto it = law.atoms.rbegin(); it != law.atoms.rend(); ++it) {
      const double x = it->first;
      if (x >= 0.0) continue;
      // B just below x: all atoms in (x - , 0]... B(x-) includes atom at x
      const double b_at = law.upper_mean_above(x) - a0;       // B(x)
      const double b_below = b_at + x * it->second;           // B(x-)
      if (b_below < -theta) {
        t2 = x;
        found = true;
        if (b_at > -theta) tau2 = (-theta - b_at) / t2;
        break;
      }
    }
    if (!found) throw std::domain_error("decompose_UL: t2 not found");
  }

  auto cdf = [law](double x) { return law.cdf(x); };
  Decomposition d =
      detail::assemble_decomposition(cdf, theta, t1, tau1, t2, tau2);

  const double r = d.r;
  auto weight_L = [law, t1, t2, tau1, tau2](double x, double m) {
    double w = 0.0;
    if (x <= t2 || (x > 0.0 && x <= t1)) w = m;
    if (x == t2) w -= tau2;
    if (x == t1) w = m - tau1;
    return w;
  };
  d.mgf_L = [law, r, weight_L](double lam) {
    double s = 0.0;
    for (const auto &[x, m] : law.atoms) s += weight_L(x, m) * std::exp(lam * x);
    return s / (1.0 - r);
  };
  d.mean_L = [law, r, weight_L]() {
    double s = 0.0;
    for (const auto &[x, m] : law.atoms) s += weight_L(x, m) * x;
    return s / (1.0 - r);
  };
  d.mean_U = [law, r, weight_L]() {
    double s = 0.0;
    for (const auto &[x, m] : law.atoms) s += (m - weight_L(x, m)) * x;
    return s / r;
  };
  return d;
}

// Both sides of the moment-generating bound on F_L:
//   lhs = integral of exp(lambda x) dF_L,
//   rhs = 1 + D(1/lambda) * integral_0^inf (1 - e^{-u}) u^{-alpha} du,
// with D(t) = Fbar_{-X}(t) / (1 - r), the tail-dominance constant read off
// from the model's own lower tail at t = 1/lambda. The u-integral is
// Gamma(2 - alpha) / (alpha - 1).
struct MgfCheckPoint {
  double lambda;
  double lhs;
  double rhs;
};

inline std::vector<MgfCheckPoint> mgf_check(const Decomposition &decomp,
                                            const InnovationModel &model,
                                            const std::vector<double> &lambdas) {
  std::vector<MgfCheckPoint> out;
  out.reserve(lambdas.size());
  const double alpha = model.alpha();
  const double u_integral = std::tgamma(2.0 - alpha) / (alpha - 1.0);
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw std::domain_error("mgf_check: lambda <= 0");
    const double d_at = model.lower_tail(1.0 / lam) / (1.0 - decomp.r);
    MgfCheckPoint pt;
    pt.lambda = lam;
    pt.lhs = decomp.mgf_L(lam);
    pt.rhs = 1.0 + d_at * u_integral;
    out.push_back(pt);
  }
  return out;
}

}  // namespace gfproc

#endif  // GFPROC_INNOVATIONS_HPP_

#ifndef GFPROC_REGVAR_HPP_
#define GFPROC_REGVAR_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gfproc {

// Multiplicative perturbation of the exact Pareto quantile. Keeping the
// family closed (none / power / log) makes quantile and tail mutually
// consistent by construction: the tail is always the numeric inverse of the
// quantile.
enum class Perturbation { kNone, kPower, kSlowlyVaryingLog };

// Two-sided Pareto-type law with tail index alpha in (1,2), scale c and
// tail weights p + q = 1. The unperturbed law puts mass p on a Pareto(c,
// alpha) upper tail supported on [c, inf) and mass q on its mirror image;
// the quantile of each tail is c * s^{1/alpha} * psi(s) in the tail
// variable s (s = p/(1-u) upper, s = q/u lower), psi being the
// perturbation factor.
class QuantileModel {
 public:
  QuantileModel(double alpha, double scale, double p,
                Perturbation pert = Perturbation::kNone, double pert_eps = 0.0,
                double pert_amp = 0.0)
      : alpha_(alpha),
        scale_(scale),
        p_(p),
        q_(1.0 - p),
        pert_(pert),
        pert_eps_(pert_eps),
        pert_amp_(pert_amp) {
    if (!(alpha > 1.0 && alpha < 2.0))
      throw std::invalid_argument("QuantileModel: alpha must be in (1,2)");
    if (!(scale > 0.0)) throw std::invalid_argument("QuantileModel: scale <= 0");
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("QuantileModel: p must be in (0,1]");
    if (pert_ == Perturbation::kPower && !(pert_eps > 0.0 && pert_amp >= 0.0))
      throw std::invalid_argument("QuantileModel: bad power perturbation");
    verify_monotone();
  }

  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  double upper_weight() const { return p_; }
  double lower_weight() const { return q_; }
  bool one_sided() const { return q_ == 0.0; }
  Perturbation perturbation() const { return pert_; }

  // Effective upper-tail constant: Fbar(x) ~ (x/c_eff)^{-alpha}.
  double upper_tail_scale() const {
    return scale_ * std::pow(p_, 1.0 / alpha_);
  }

  // F^<-(1 - s) for a small upper-tail probability s in (0, p]; avoids the
  // precision loss of forming 1 - s when s is tiny.
  double upper_quantile_tail(double s) const {
    if (!(s > 0.0 && s <= p_))
      throw std::domain_error("upper_quantile_tail: s outside (0, p]");
    return tail_value(p_ / s);
  }

  // Caglad quantile F^<-(u) = inf{x : F(x) >= u}.
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
      throw std::domain_error("quantile: u outside (0,1)");
    if (u > q_) return tail_value(p_ / (1.0 - u));
    return -tail_value(q_ / u);
  }

  // Upper tail Fbar(x) = P{X > x}.
  double tail(double x) const {
    const double edge = scale_;  // psi(1) == 1, both branches meet |x| = c
    if (x >= edge) return p_ / invert_tail_value(x);
    if (x >= -edge) return p_;
    if (q_ == 0.0) return 1.0;  // one-sided: everything above the endpoint
    return 1.0 - q_ / invert_tail_value(-x);
  }

  double cdf(double x) const { return 1.0 - tail(x); }

  // Lower tail P{-X > x} = F(-x) for positive x.
  double lower_tail(double x) const {
    if (q_ == 0.0) return 0.0;
    if (x < scale_) return q_;
    return q_ / invert_tail_value(x);
  }

  // Tail of |X|: Fbar_*(x) = Fbar(x) + F(-x). Exact power law (x/c)^{-alpha}
  // in the unperturbed case, assembled from both tails otherwise.
  double fstar_tail(double x) const {
    if (x < scale_) return 1.0;
    if (pert_ == Perturbation::kNone) return std::pow(x / scale_, -alpha_);
    double t = p_ / invert_tail_value(x);
    if (q_ > 0.0) t += q_ / invert_tail_value(x);
    return t;
  }

  // F_*^<-(1 - 1/t): the space scale entering k.
  double fstar_quantile_tail(double t) const {
    if (!(t > 1.0)) throw std::domain_error("fstar_quantile_tail: t <= 1");
    if (pert_ == Perturbation::kNone)
      return scale_ * std::pow(t, 1.0 / alpha_);
    // invert fstar_tail by bisection; fstar_tail is decreasing in x
    const double target = 1.0 / t;
    double lo = scale_, hi = scale_ * 2.0;
    while (fstar_tail(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fstar_tail(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  // Quantile of one tail as a function of the tail variable s >= 1:
  // c * s^{1/alpha} * psi(s).
  double tail_value(double s) const {
    const double base = scale_ * std::pow(s, 1.0 / alpha_);
    switch (pert_) {
      case Perturbation::kNone:
        return base;
      case Perturbation::kPower:
        return base * (1.0 + pert_amp_ * std::pow(s, -pert_eps_));
      case Perturbation::kSlowlyVaryingLog:
        return base * (1.0 + std::log(s));
    }
    return base;
  }

  // Inverse of tail_value: given x >= tail_value(1), return s with
  // tail_value(s) = x.
  double invert_tail_value(double x) const {
    if (pert_ == Perturbation::kNone)
      return std::pow(x / scale_, alpha_);
    double lo = 1.0, hi = 2.0;
    while (tail_value(hi) < x) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_value(mid) < x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  void verify_monotone() const {
    double prev = tail_value(1.0);
    for (double s = 1.0; s < 1e12; s *= 1.3) {
      const double v = tail_value(s * 1.3);
      if (v < prev)
        throw std::invalid_argument(
            "QuantileModel: perturbed quantile is not monotone");
      prev = v;
    }
  }

  double alpha_, scale_, p_, q_;
  Perturbation pert_;
  double pert_eps_, pert_amp_;
};

// k = Id / F_*^<-(1 - 1/Id), regularly varying of index 1 - 1/alpha, and
// its numeric inverse through a cached monotone envelope.
class ScalingFns {
 public:
  explicit ScalingFns(const QuantileModel &model, double t_lo = 2.0,
                      double t_hi = 1e13, std::size_t nodes = 1024)
      : model_(model) {
    ts_.reserve(nodes);
    ks_.reserve(nodes);
    const double ratio = std::pow(t_hi / t_lo, 1.0 / double(nodes - 1));
    double t = t_lo;
    double running_max = 0.0;
    for (std::size_t i = 0; i < nodes; ++i, t *= ratio) {
      const double kv = k(t);
      running_max = std::max(running_max, kv);
      ts_.push_back(t);
      ks_.push_back(running_max);  // monotone envelope
    }
  }

  const QuantileModel &model() const { return model_; }

  double k(double t) const {
    if (!(t > 1.0)) throw std::domain_error("k: t <= 1");
    return t / model_.fstar_quantile_tail(t);
  }

  // k^<-(y): t with |k(t) - y| / y <= 1e-10, by bisection between cached
  // bracket nodes.
  double k_inverse(double y) const {
    if (!(y > 0.0)) throw std::domain_error("k_inverse: y <= 0");
    if (y < ks_.front() || y > ks_.back())
      throw std::range_error("k_inverse: y outside the cached increasing range");
    std::size_t lo = 0, hi = ks_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (ks_[mid] < y ? lo : hi) = mid;
    }
    double tlo = ts_[lo], thi = ts_[hi];
    for (int it = 0; it < 200 && thi - tlo > 1e-13 * thi; ++it) {
      const double mid = 0.5 * (tlo + thi);
      (k(mid) < y ? tlo : thi) = mid;
    }
    return 0.5 * (tlo + thi);
  }

 private:
  const QuantileModel &model_;
  std::vector<double> ts_, ks_;
};

// Statistic of the quantile-ratio rate condition:
//   t^kappa * sup_{t^-kappa <= lambda <= t^kappa}
//     |F^<-(1 - lambda/t) / F^<-(1 - 1/t) - lambda^{-1/alpha}| .
// The sup is taken over a 256-point geometric lambda grid, which
// lower-bounds the true sup; the tested families have monotone deviation
// profiles so this is enough for a divergence/convergence diagnostic.
inline std::vector<std::pair<double, double>> check_rv_rate(
    const QuantileModel &model, double kappa, const std::vector<double> &t_grid,
    std::size_t lambda_nodes = 256) {
  if (t_grid.empty()) throw std::invalid_argument("check_rv_rate: empty grid");
  if (!(kappa > 0.0)) throw std::invalid_argument("check_rv_rate: kappa <= 0");
  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  const double inv_alpha = 1.0 / model.alpha();
  for (double t : t_grid) {
    const double lam_lo = std::pow(t, -kappa);
    const double lam_hi = std::pow(t, kappa);
    const double denom = model.upper_quantile_tail(1.0 / t);
    const double ratio =
        std::pow(lam_hi / lam_lo, 1.0 / double(lambda_nodes - 1));
    double lam = lam_lo;
    double sup = 0.0;
    for (std::size_t i = 0; i < lambda_nodes; ++i, lam *= ratio) {
      const double dev = std::fabs(model.upper_quantile_tail(lam / t) / denom -
                                   std::pow(lam, -inv_alpha));
      sup = std::max(sup, dev);
    }
    out.emplace_back(t, std::pow(t, kappa) * sup);
  }
  return out;
}

// Statistic of the tail-form condition:
//   x^{kappa(alpha+1)} * |Fbar(x) * (x / c_eff)^alpha - 1| ,
// with c_eff the model's upper-tail constant.
inline std::vector<std::pair<double, double>> check_tail_form(
    const QuantileModel &model, double kappa, const std::vector<double> &x_grid) {
  if (x_grid.empty()) throw std::invalid_argument("check_tail_form: empty grid");
  std::vector<std::pair<double, double>> out;
  out.reserve(x_grid.size());
  const double alpha = model.alpha();
  const double c_eff = model.upper_tail_scale();
  for (double x : x_grid) {
    const double stat = std::pow(x, kappa * (alpha + 1.0)) *
                        std::fabs(model.tail(x) * std::pow(x / c_eff, alpha) -
                                  1.0);
    out.emplace_back(x, stat);
  }
  return out;
}

}  // namespace gfproc

#endif  // GFPROC_REGVAR_HPP_

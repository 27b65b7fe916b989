#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "confsel/data.hpp"
#include "confsel/error.hpp"
#include "confsel/glm.hpp"
#include "confsel/penalty.hpp"

namespace confsel {

// Outcome:   y_i ~ N(beta0_y + beta_d d_i + x_i'alpha, sigma2)
// Treatment: d_i ~ Bernoulli(expit(beta0_d + x_i'alpha))
// The same alpha enters both working models.

inline constexpr double sigma2_floor = 1e-12;

struct JointTerms {
  Vector resid;  // y - mu
  Vector pi;     // fitted treatment probabilities (unclamped)
  Vector xa;     // X alpha
  double rss = 0.0;
  double bern_nll = 0.0;
};

inline JointTerms joint_terms(const ParamVector& eta, const Dataset& ds) {
  if (static_cast<std::size_t>(eta.alpha.size()) != ds.r2())
    fail(ErrorKind::validation, "alpha length does not match the dataset");
  JointTerms t;
  t.xa = ds.x() * eta.alpha;
  t.resid = ds.y() - t.xa - Vector::Constant(ds.y().size(), eta.beta0_y) - eta.beta_d * ds.d();
  t.rss = t.resid.squaredNorm();
  const Vector lin = t.xa.array() + eta.beta0_d;
  t.pi.resize(lin.size());
  for (Eigen::Index i = 0; i < lin.size(); ++i) t.pi(i) = glm::expit(lin(i));
  t.bern_nll = -glm::bernoulli_loglik(ds.d(), lin);
  return t;
}

inline double gaussian_nll(double rss, double sigma2, std::size_t n) {
  return 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * sigma2) +
         rss / (2.0 * sigma2);
}

inline double nll(const ParamVector& eta, const Dataset& ds) {
  if (!(eta.sigma2 > 0.0)) fail(ErrorKind::parameter, "sigma2 must be > 0");
  const auto t = joint_terms(eta, ds);
  return gaussian_nll(t.rss, eta.sigma2, ds.n()) + t.bern_nll;
}

// Layout of the flat parameter/gradient vector.
struct EtaLayout {
  static constexpr Eigen::Index beta0_y = 0, beta_d = 1, beta0_d = 2, alpha0 = 3;
  static Eigen::Index sigma2(std::size_t r2) { return 3 + static_cast<Eigen::Index>(r2); }
  static Eigen::Index size(std::size_t r2) { return 4 + static_cast<Eigen::Index>(r2); }
};

inline Vector to_flat(const ParamVector& eta) {
  const auto r2 = static_cast<std::size_t>(eta.alpha.size());
  Vector v(EtaLayout::size(r2));
  v(EtaLayout::beta0_y) = eta.beta0_y;
  v(EtaLayout::beta_d) = eta.beta_d;
  v(EtaLayout::beta0_d) = eta.beta0_d;
  v.segment(EtaLayout::alpha0, eta.alpha.size()) = eta.alpha;
  v(EtaLayout::sigma2(r2)) = eta.sigma2;
  return v;
}

inline ParamVector from_flat(const Vector& v) {
  const auto r2 = static_cast<std::size_t>(v.size() - 4);
  ParamVector eta;
  eta.beta0_y = v(EtaLayout::beta0_y);
  eta.beta_d = v(EtaLayout::beta_d);
  eta.beta0_d = v(EtaLayout::beta0_d);
  eta.alpha = v.segment(EtaLayout::alpha0, static_cast<Eigen::Index>(r2));
  eta.sigma2 = v(EtaLayout::sigma2(r2));
  return eta;
}

// Gradient of nll with respect to (beta0_y, beta_d, beta0_d, alpha, sigma2).
inline Vector nll_gradient(const ParamVector& eta, const Dataset& ds) {
  if (!(eta.sigma2 > 0.0)) fail(ErrorKind::parameter, "sigma2 must be > 0");
  const auto t = joint_terms(eta, ds);
  const double s2 = eta.sigma2;
  const Vector r_s = t.resid / s2;
  const Vector score_d = ds.d() - t.pi;
  Vector g(EtaLayout::size(ds.r2()));
  g(EtaLayout::beta0_y) = -r_s.sum();
  g(EtaLayout::beta_d) = -r_s.dot(ds.d());
  g(EtaLayout::beta0_d) = -score_d.sum();
  g.segment(EtaLayout::alpha0, static_cast<Eigen::Index>(ds.r2())) =
      -(ds.x().transpose() * (r_s + score_d));
  g(EtaLayout::sigma2(ds.r2())) =
      0.5 * static_cast<double>(ds.n()) / s2 - t.rss / (2.0 * s2 * s2);
  return g;
}

// sigma2 <- RSS / n; floored at 1e-12 on an exact fit.
inline ParamVector profile_sigma2(const ParamVector& eta, const Dataset& ds,
                                  bool* floored = nullptr) {
  ParamVector out = eta;
  const double rss = joint_terms(eta, ds).rss;
  const double s2 = rss / static_cast<double>(ds.n());
  if (floored) *floored = !(s2 > sigma2_floor);
  out.sigma2 = s2 > sigma2_floor ? s2 : sigma2_floor;
  return out;
}

// nll + n sum_j nu_j p*(|alpha_j|); the beta block is never penalized.
inline double penalized_nll(const ParamVector& eta, const Dataset& ds, const PenaltyFn& penalty,
                            const Vector& nu) {
  if (static_cast<std::size_t>(nu.size()) != ds.r2())
    fail(ErrorKind::validation, "nu length does not match the dataset");
  return nll(eta, ds) + static_cast<double>(ds.n()) * weighted_penalty(penalty, nu, eta.alpha);
}

// Objective bound to one dataset; evaluation is const and thread-safe.
class JointObjective {
 public:
  explicit JointObjective(const Dataset& ds) : ds_(&ds) {}
  JointObjective(const Dataset& ds, PenaltyFn penalty, Vector nu)
      : ds_(&ds), penalty_(penalty), nu_(std::move(nu)) {}

  double value(const ParamVector& eta) const {
    return penalty_ ? penalized_nll(eta, *ds_, *penalty_, nu_) : nll(eta, *ds_);
  }

  // Smooth part plus the penalty derivative on nonzero alpha entries.
  Vector grad(const ParamVector& eta) const {
    Vector g = nll_gradient(eta, *ds_);
    if (penalty_) {
      const double n = static_cast<double>(ds_->n());
      for (Eigen::Index j = 0; j < eta.alpha.size(); ++j)
        if (eta.alpha(j) != 0.0)
          g(EtaLayout::alpha0 + j) += n * nu_(j) * penalty_->deriv(eta.alpha(j));
    }
    return g;
  }

 private:
  const Dataset* ds_;
  std::optional<PenaltyFn> penalty_;
  Vector nu_;
};

// ---------------------------------------------------------------------------
// Single-covariate Gaussian structural model X = e1, Z = a12 X + e2,
// Y = a13 X + a23 Z + e3 with standard-normal noises.

struct SemParams {
  double a12 = 0.0;
  double a13 = 0.0;
  double a23 = 0.0;
  double beta = 0.0;  // known outcome-on-treatment coefficient
};

// a13 + a12 a23 + a12 (1 - beta) with cov(x, x) = 1. It vanishes exactly when
// the confounding paths cancel; the joint score root is half of it.
inline double cancellation_alpha_star(double a12, double a13, double a23, double beta) {
  return a13 + a12 * a23 + a12 * (1.0 - beta);
}

struct ScoreEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Monte Carlo mean of the per-observation alpha-score of the unpenalized joint
// Gaussian objective -(y - beta z - alpha x)^2/2 - (z - alpha x)^2/2.
inline ScoreEstimate sem_joint_score(const SemParams& p, double alpha, std::size_t samples,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = nd(rng);
    const double z = p.a12 * x + nd(rng);
    const double y = p.a13 * x + p.a23 * z + nd(rng);
    const double s = x * (y - p.beta * z - alpha * x) + x * (z - alpha * x);
    const double delta = s - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (s - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

// Root of the population score above: the joint objective counts the x-x
// curvature once per working model.
inline double sem_joint_score_root(const SemParams& p) {
  return 0.5 * cancellation_alpha_star(p.a12, p.a13, p.a23, p.beta);
}

}  // namespace confsel

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "confsel/data.hpp"
#include "confsel/error.hpp"
#include "confsel/glm.hpp"
#include "confsel/joint_likelihood.hpp"
#include "confsel/penalty.hpp"

namespace confsel {

// Which smooth part the penalized optimizer minimizes.
//   joint     : Gaussian outcome + logistic treatment sharing alpha
//   outcome   : Gaussian outcome only (the "Y-fit" comparator)
//   treatment : logistic treatment only (the "PS-fit" comparator)
enum class ModelKind { joint, outcome, treatment };

struct OptimizerConfig {
  int max_iter = 200;
  double tol = 1e-6;         // relative objective change
  double zero_eps = 1e-8;
  double lqa_delta = 1e-8;
  std::vector<double> lambda_grid;  // empty: grid_size log-spaced points over [ratio lmax, lmax]
  int grid_size = 50;
  // Smallest grid lambda as a fraction of lmax. Unset: 1e-4 when n > r2 and
  // 0.05 otherwise; with r2 > n, GCV at smaller lambda prefers near-saturated
  // fits.
  std::optional<double> grid_ratio;
  double scad_a = 3.7;
  // The path stops once the effective dof exceeds this fraction of n.
  double max_dof_fraction = 0.5;
  // Boosting-weight ridge; unset means default_boosting_ridge(n, r2).
  std::optional<double> ridge_y, ridge_d;
  // A coordinate is pruned when its smooth gradient falls below this
  // fraction of the penalty slope (it is still on its way to zero).
  double prune_ratio = 0.99;
  int kkt_batch = 20;
  // Joint model only: unset profiles sigma2; a value holds it fixed.
  std::optional<double> joint_sigma2;

  void validate() const {
    if (!(tol > 0.0)) fail(ErrorKind::parameter, "tol must be > 0");
    if (!(zero_eps > 0.0)) fail(ErrorKind::parameter, "zero_eps must be > 0");
    if (!(lqa_delta > 0.0)) fail(ErrorKind::parameter, "lqa_delta must be > 0");
    if (max_iter < 1) fail(ErrorKind::parameter, "max_iter must be >= 1");
    if (grid_size < 1) fail(ErrorKind::parameter, "grid_size must be >= 1");
    if (grid_ratio && !(*grid_ratio > 0.0 && *grid_ratio <= 1.0))
      fail(ErrorKind::parameter, "grid_ratio must be in (0, 1]");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      if (!(lambda_grid[i] >= 0.0)) fail(ErrorKind::parameter, "lambda grid values must be >= 0");
      if (i > 0 && lambda_grid[i] > lambda_grid[i - 1])
        fail(ErrorKind::parameter, "lambda grid must be sorted descending");
    }
  }
};

struct FitResult {
  ParamVector eta;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // penalized objective after each accepted iteration
};

struct GcvValue {
  double gcv = 0.0;
  double dof = 0.0;
  double loss = 0.0;  // RSS (outcome scale) or deviance (treatment model)
  bool degenerate = false;
};

namespace detail {

class LqaEngine {
 public:
  LqaEngine(const Dataset& ds, ModelKind kind, const PenaltyFn& fn, const Vector& nu,
            const OptimizerConfig& cfg)
      : ds_(ds), kind_(kind), fn_(fn), nu_(nu), cfg_(cfg),
        has_out_(kind != ModelKind::treatment), has_trt_(kind != ModelKind::outcome),
        n_(static_cast<double>(ds.n())) {
    if (static_cast<std::size_t>(nu.size()) != ds.r2())
      fail(ErrorKind::validation, "nu length does not match the dataset");
    if (has_trt_) ds.require_both_arms();
  }

  // Unpenalized block fitted with alpha = 0.
  ParamVector null_state() const {
    ParamVector eta = ParamVector::zeros(ds_.r2());
    if (has_out_) {
      const Vector& y = ds_.y();
      const Vector& d = ds_.d();
      const double nt = d.sum();
      if (nt > 0.5 && nt < n_ - 0.5) {
        const double m1 = y.dot(d) / nt;
        const double m0 = (y.sum() - y.dot(d)) / (n_ - nt);
        eta.beta0_y = m0;
        eta.beta_d = m1 - m0;
      } else {
        eta.beta0_y = y.mean();
      }
    }
    if (has_trt_) {
      const double pbar = ds_.d().mean();
      eta.beta0_d = std::log(pbar / (1.0 - pbar));
    }
    if (has_out_) eta = profile_sigma2(eta, ds_);
    if (kind_ == ModelKind::joint && cfg_.joint_sigma2) eta.sigma2 = *cfg_.joint_sigma2;
    return eta;
  }

  // The outcome-only fit keeps sigma2 at its null-model value: with r2 > n the
  // profiled objective is unbounded below as the residuals vanish, and a
  // fixed scale turns it into penalized least squares with a rescaled lambda.
  bool profiles_sigma2() const { return kind_ == ModelKind::joint && !cfg_.joint_sigma2; }

  double null_sigma2() const {
    if (kind_ == ModelKind::joint && cfg_.joint_sigma2) return *cfg_.joint_sigma2;
    if (!null_sigma2_) null_sigma2_ = null_state().sigma2;
    return *null_sigma2_;
  }

  // Smooth-part gradient with respect to every alpha_j.
  Vector full_alpha_gradient(const ParamVector& eta) const {
    const auto st = state_terms(eta);
    Vector c = Vector::Zero(ds_.y().size());
    if (has_out_) c += st.resid / eta.sigma2;
    if (has_trt_) c += ds_.d() - st.pi;
    return -(ds_.x().transpose() * c);
  }

  double lambda_max() const {
    const ParamVector eta = null_state();
    const Vector g = full_alpha_gradient(eta);
    double lm = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j)
      if (nu_(j) > 0.0) lm = std::max(lm, std::abs(g(j)) / (n_ * nu_(j)));
    return lm;
  }

  FitResult fit(const ParamVector* warm) {
    FitResult res;
    ParamVector eta = warm ? *warm : null_state();
    if (static_cast<std::size_t>(eta.alpha.size()) != ds_.r2())
      fail(ErrorKind::validation, "warm start has the wrong dimension");
    if (!has_out_) eta.sigma2 = 1.0;
    if (!profiles_sigma2()) eta.sigma2 = null_sigma2();
    set_active_from(eta);
    double obj = objective(eta, eta.sigma2);
    res.objective_trace.push_back(obj);
    int it = 0;
    bool converged = false;
    while (it < cfg_.max_iter) {
      // Newton-LQA on the current active set.
      bool inner_converged = false;
      while (it < cfg_.max_iter) {
        ++it;
        const auto step = newton_step(eta, obj);
        if (!step) {
          inner_converged = true;
          break;
        }
        eta = step->first;
        const double prev = obj;
        freeze_small(eta);
        if (profiles_sigma2()) eta = profile_sigma2(eta, ds_);
        obj = objective(eta, eta.sigma2);
        res.objective_trace.push_back(obj);
        if (std::abs(prev - obj) <= cfg_.tol * std::max(1.0, std::abs(obj))) {
          inner_converged = true;
          break;
        }
      }
      if (!inner_converged) break;
      const bool pruned = prune_in_flight(eta);
      const bool added = admit_kkt_violators(eta);
      if (pruned || added) {
        if (profiles_sigma2()) eta = profile_sigma2(eta, ds_);
        obj = objective(eta, eta.sigma2);
        continue;
      }
      converged = true;
      break;
    }
    for (Eigen::Index j = 0; j < eta.alpha.size(); ++j)
      if (std::abs(eta.alpha(j)) < cfg_.zero_eps) eta.alpha(j) = 0.0;
    res.eta = eta;
    res.converged = converged;
    res.iterations = it;
    res.objective = objective(eta, eta.sigma2);
    return res;
  }

  // Penalized objective with sigma2 held fixed.
  double objective(const ParamVector& eta, double sigma2) const {
    const auto st = state_terms(eta);
    double v = 0.0;
    if (has_out_) v += gaussian_nll(st.rss, sigma2, ds_.n());
    if (has_trt_) v += st.bern_nll;
    return v + n_ * weighted_penalty(fn_, nu_, eta.alpha);
  }

  GcvValue gcv(const ParamVector& eta) const {
    GcvValue out;
    const auto st = state_terms(eta);
    out.loss = has_out_ ? st.rss : 2.0 * st.bern_nll;
    std::vector<Eigen::Index> A;
    for (Eigen::Index j = 0; j < eta.alpha.size(); ++j)
      if (eta.alpha(j) != 0.0) A.push_back(j);
    double dof = 0.0;
    if (!A.empty()) {
      const auto m = static_cast<Eigen::Index>(A.size());
      Matrix XA(ds_.x().rows(), m);
      for (Eigen::Index k = 0; k < m; ++k) XA.col(k) = ds_.x().col(A[static_cast<std::size_t>(k)]);
      Matrix G = Matrix::Zero(m, m);
      G.selfadjointView<Eigen::Lower>().rankUpdate(XA.transpose());
      G = G.selfadjointView<Eigen::Lower>();
      Matrix Hs = G;
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto j = A[static_cast<std::size_t>(k)];
        Hs(k, k) += n_ * nu_(j) * fn_.lqa_weight(eta.alpha(j), cfg_.lqa_delta);
      }
      Eigen::LDLT<Matrix> ldlt(Hs);
      if (ldlt.info() != Eigen::Success) {
        out.degenerate = true;
        out.dof = static_cast<double>(m);
      } else {
        dof = ldlt.solve(G).trace();
      }
    }
    if (!out.degenerate) out.dof = dof;
    if (out.degenerate || out.dof >= n_ - 1e-9) {
      out.degenerate = true;
      out.gcv = std::numeric_limits<double>::infinity();
      return out;
    }
    const double shrink = 1.0 - out.dof / n_;
    out.gcv = (out.loss / n_) / (shrink * shrink);
    return out;
  }

 private:
  struct Terms {
    Vector resid, pi, w;
    double rss = 0.0;
    double bern_nll = 0.0;
  };

  Terms state_terms(const ParamVector& eta) const {
    Terms t;
    Vector xa = Vector::Zero(ds_.y().size());
    for (Eigen::Index j = 0; j < eta.alpha.size(); ++j)
      if (eta.alpha(j) != 0.0) xa.noalias() += eta.alpha(j) * ds_.x().col(j);
    if (has_out_) {
      t.resid = ds_.y() - xa - Vector::Constant(xa.size(), eta.beta0_y) - eta.beta_d * ds_.d();
      t.rss = t.resid.squaredNorm();
    }
    if (has_trt_) {
      const Vector lin = xa.array() + eta.beta0_d;
      t.pi.resize(lin.size());
      t.w.resize(lin.size());
      for (Eigen::Index i = 0; i < lin.size(); ++i) {
        t.pi(i) = glm::expit(lin(i));
        t.w(i) = t.pi(i) * (1.0 - t.pi(i));
      }
      t.bern_nll = -glm::bernoulli_loglik(ds_.d(), lin);
    }
    return t;
  }

  bool always_active(Eigen::Index j) const { return nu_(j) == 0.0 || fn_.lambda() == 0.0; }

  void set_active_from(const ParamVector& eta) {
    active_.clear();
    for (Eigen::Index j = 0; j < eta.alpha.size(); ++j)
      if (eta.alpha(j) != 0.0 || always_active(j)) active_.push_back(j);
    rebuild_xa();
  }

  void rebuild_xa() {
    const auto m = static_cast<Eigen::Index>(active_.size());
    XA_.resize(ds_.x().rows(), m);
    for (Eigen::Index k = 0; k < m; ++k) XA_.col(k) = ds_.x().col(active_[static_cast<std::size_t>(k)]);
  }

  Eigen::Index n_unpen() const { return (has_out_ ? 2 : 0) + (has_trt_ ? 1 : 0); }

  // One damped Newton-LQA step with sigma2 fixed. nullopt when no descent
  // direction improves the objective (converged to rounding level).
  std::optional<std::pair<ParamVector, double>> newton_step(const ParamVector& eta, double obj) const {
    const Eigen::Index k = n_unpen();
    const auto m = static_cast<Eigen::Index>(active_.size());
    const Eigen::Index dim = k + m;
    const auto st = state_terms(eta);
    const Vector& d = ds_.d();
    const double s2 = eta.sigma2;
    const Eigen::Index nr = d.size();

    Vector g = Vector::Zero(dim);
    Matrix H = Matrix::Zero(dim, dim);
    Vector c = Vector::Zero(nr);  // per-row curvature on X alpha
    Vector e = Vector::Zero(nr);  // per-row residual weight on X alpha
    Eigen::Index at = 0;
    if (has_out_) {
      const Vector r = st.resid / s2;
      g(0) = -r.sum();
      g(1) = -r.dot(d);
      const double sd = d.sum();
      H(0, 0) = n_ / s2;
      H(0, 1) = H(1, 0) = sd / s2;
      H(1, 1) = d.squaredNorm() / s2;
      if (m > 0) {
        const Vector x1 = XA_.transpose() * Vector::Ones(nr) / s2;
        const Vector xd = XA_.transpose() * d / s2;
        H.block(0, k, 1, m) = x1.transpose();
        H.block(1, k, 1, m) = xd.transpose();
      }
      c.array() += 1.0 / s2;
      e += r;
      at = 2;
    }
    if (has_trt_) {
      const Vector sc = d - st.pi;
      g(at) = -sc.sum();
      H(at, at) = st.w.sum();
      if (m > 0) H.block(at, k, 1, m) = (XA_.transpose() * st.w).transpose();
      c += st.w;
      e += sc;
    }
    if (m > 0) {
      g.tail(m) = -(XA_.transpose() * e);
      const Matrix Xc = XA_.array().colwise() * c.array().sqrt();
      Matrix Haa = Matrix::Zero(m, m);
      Haa.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
      H.bottomRightCorner(m, m) = Haa.selfadjointView<Eigen::Lower>();
      for (Eigen::Index q = 0; q < m; ++q) {
        const auto j = active_[static_cast<std::size_t>(q)];
        const double wq = n_ * nu_(j) * fn_.lqa_weight(eta.alpha(j), cfg_.lqa_delta);
        H(k + q, k + q) += wq;
        g(k + q) += wq * eta.alpha(j);
      }
    }
    H.bottomLeftCorner(m, k) = H.topRightCorner(k, m).transpose();

    Vector delta;
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() == Eigen::Success) {
      delta = -llt.solve(g);
    } else {
      Eigen::LDLT<Matrix> ldlt(H);
      if (ldlt.info() != Eigen::Success)
        fail(ErrorKind::numerical, "singular Newton system in the penalized fit");
      delta = -ldlt.solve(g);
    }
    if (!delta.allFinite()) fail(ErrorKind::numerical, "non-finite Newton step");

    double t = 1.0;
    for (int h = 0; h <= 30; ++h) {
      ParamVector cand = apply(eta, delta, t);
      const double v = objective(cand, s2);
      if (std::isfinite(v) && v <= obj) return std::make_pair(std::move(cand), v);
      t *= 0.5;
    }
    // No improvement even for tiny steps: a genuine increase means trouble.
    const double v_small = objective(apply(eta, delta, std::ldexp(1.0, -30)), s2);
    if (v_small - obj > 1e-9 * std::max(1.0, std::abs(obj)))
      fail(ErrorKind::numerical, "penalized objective increases after 30 step halvings");
    return std::nullopt;
  }

  ParamVector apply(const ParamVector& eta, const Vector& delta, double t) const {
    ParamVector out = eta;
    Eigen::Index at = 0;
    if (has_out_) {
      out.beta0_y += t * delta(0);
      out.beta_d += t * delta(1);
      at = 2;
    }
    if (has_trt_) out.beta0_d += t * delta(at);
    const Eigen::Index k = n_unpen();
    for (std::size_t q = 0; q < active_.size(); ++q)
      out.alpha(active_[q]) += t * delta(k + static_cast<Eigen::Index>(q));
    return out;
  }

  void freeze_small(ParamVector& eta) {
    std::vector<Eigen::Index> keep;
    bool changed = false;
    for (const auto j : active_) {
      const double a = eta.alpha(j);
      const bool tiny = std::abs(a) < cfg_.zero_eps ||
                        nu_(j) * fn_.lqa_weight(a, cfg_.lqa_delta) > 1.0 / cfg_.zero_eps;
      if (tiny && !always_active(j)) {
        eta.alpha(j) = 0.0;
        changed = true;
      } else {
        keep.push_back(j);
      }
    }
    if (changed) {
      active_ = std::move(keep);
      rebuild_xa();
    }
  }

  bool prune_in_flight(ParamVector& eta) {
    if (active_.empty()) return false;
    const Vector g = full_alpha_gradient(eta);
    std::vector<Eigen::Index> keep;
    bool changed = false;
    for (const auto j : active_) {
      const double slope = n_ * nu_(j) * fn_.deriv_abs(std::abs(eta.alpha(j)));
      if (!always_active(j) && slope > 0.0 && std::abs(g(j)) < cfg_.prune_ratio * slope) {
        eta.alpha(j) = 0.0;
        changed = true;
      } else {
        keep.push_back(j);
      }
    }
    if (changed) {
      active_ = std::move(keep);
      rebuild_xa();
    }
    return changed;
  }

  // Frozen coordinates whose smooth gradient exceeds the penalty slope at 0
  // re-enter at the one-dimensional soft-thresholded Newton value.
  bool admit_kkt_violators(ParamVector& eta) {
    const Vector g = full_alpha_gradient(eta);
    std::vector<char> is_active(static_cast<std::size_t>(eta.alpha.size()), 0);
    for (const auto j : active_) is_active[static_cast<std::size_t>(j)] = 1;
    struct Cand {
      Eigen::Index j;
      double ratio;
    };
    std::vector<Cand> viol;
    const double lam0 = fn_.deriv_abs(0.0);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (is_active[static_cast<std::size_t>(j)]) continue;
      const double slope = n_ * nu_(j) * lam0;
      if (std::abs(g(j)) > slope * (1.0 + 1e-9) + 1e-12)
        viol.push_back({j, slope > 0 ? std::abs(g(j)) / slope : std::numeric_limits<double>::infinity()});
    }
    if (viol.empty()) return false;
    std::sort(viol.begin(), viol.end(), [](const Cand& a, const Cand& b) {
      return a.ratio != b.ratio ? a.ratio > b.ratio : a.j < b.j;
    });
    if (viol.size() > static_cast<std::size_t>(cfg_.kkt_batch)) viol.resize(static_cast<std::size_t>(cfg_.kkt_batch));
    const auto st = state_terms(eta);
    Vector c = Vector::Zero(ds_.y().size());
    if (has_out_) c.array() += 1.0 / eta.sigma2;
    if (has_trt_) c += st.w;
    for (const auto& v : viol) {
      const auto j = v.j;
      const double h = ds_.x().col(j).cwiseAbs2().dot(c);
      const double slope = n_ * nu_(j) * lam0;
      const double mag = (std::abs(g(j)) - slope) / std::max(h, 1e-12);
      eta.alpha(j) = g(j) > 0 ? -mag : mag;
      active_.push_back(j);
    }
    std::sort(active_.begin(), active_.end());
    rebuild_xa();
    return true;
  }

  const Dataset& ds_;
  ModelKind kind_;
  PenaltyFn fn_;
  const Vector& nu_;
  const OptimizerConfig& cfg_;
  bool has_out_, has_trt_;
  double n_;
  std::vector<Eigen::Index> active_;
  Matrix XA_;
  mutable std::optional<double> null_sigma2_;
};

}  // namespace detail

// Penalized fit at one lambda; `warm` seeds the iterate.
inline FitResult fit_penalized_full(const Dataset& ds, ModelKind kind, const PenaltyFn& fn,
                                    const Vector& nu, const OptimizerConfig& cfg,
                                    const ParamVector* warm = nullptr) {
  cfg.validate();
  detail::LqaEngine eng(ds, kind, fn, nu, cfg);
  return eng.fit(warm);
}

inline ParamVector fit_penalized(const Dataset& ds, PenaltyFamily family, double lambda,
                                 const Vector& nu, const OptimizerConfig& cfg = {}) {
  const PenaltyFn fn(family, lambda, cfg.scad_a);
  return fit_penalized_full(ds, ModelKind::joint, fn, nu, cfg).eta;
}

inline double lambda_max(const Dataset& ds, ModelKind kind, const Vector& nu,
                         const OptimizerConfig& cfg = {}) {
  const PenaltyFn fn(PenaltyFamily::lasso, 1.0);
  return detail::LqaEngine(ds, kind, fn, nu, cfg).lambda_max();
}

inline GcvValue gcv(const Dataset& ds, const ParamVector& eta, ModelKind kind, const PenaltyFn& fn,
                    const Vector& nu, const OptimizerConfig& cfg = {}) {
  return detail::LqaEngine(ds, kind, fn, nu, cfg).gcv(eta);
}

inline std::vector<double> default_lambda_grid(double lmax, int size, double ratio) {
  std::vector<double> grid;
  if (size <= 1) return {lmax};
  for (int i = 0; i < size; ++i)
    grid.push_back(lmax * std::pow(ratio, static_cast<double>(i) / (size - 1)));
  return grid;
}

// Warm-started lambda path with GCV choice of lambda.
inline SelectionResult select_path(const Dataset& ds, ModelKind kind, PenaltyFamily family,
                                   const Vector& nu, const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty()) {
    const double ratio = cfg.grid_ratio.value_or(ds.n() > ds.r2() ? 1e-4 : 0.05);
    grid = default_lambda_grid(lambda_max(ds, kind, nu, cfg), cfg.grid_size, ratio);
  }
  SelectionResult out;
  out.nu = nu;
  double best = std::numeric_limits<double>::infinity();
  std::optional<ParamVector> warm;
  const double n = static_cast<double>(ds.n());
  for (const double lam : grid) {
    const PenaltyFn fn(family, lam, cfg.scad_a);
    FitResult fr;
    try {
      fr = fit_penalized_full(ds, kind, fn, nu, cfg, warm ? &*warm : nullptr);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numerical) throw;
      out.gcv_path.push_back({lam, std::numeric_limits<double>::infinity(), 0.0, true, 0});
      break;
    }
    out.iterations += fr.iterations;
    const GcvValue g = gcv(ds, fr.eta, kind, fn, nu, cfg);
    const std::size_t s = fr.eta.support().size();
    // fits past the dof budget are near-interpolating and not eligible
    const bool over = g.dof > cfg.max_dof_fraction * n || static_cast<double>(s) >= n - 1.0;
    out.gcv_path.push_back({lam, g.gcv, g.dof, g.degenerate || over, s});
    if (!g.degenerate && !over && g.gcv < best) {
      best = g.gcv;
      out.eta_hat = fr.eta;
      out.lambda_hat = lam;
      out.converged = fr.converged;
    }
    if (g.degenerate || over) break;
    warm = fr.eta;
  }
  if (!std::isfinite(best))
    fail(ErrorKind::selection, "every lambda on the grid is degenerate; supply a grid with larger lambda values");
  out.selected = out.eta_hat.support();
  return out;
}

inline Vector joint_boosting_nu(const Dataset& ds, const OptimizerConfig& cfg,
                                const Matrix* gram = nullptr) {
  const double ry = cfg.ridge_y.value_or(default_boosting_ridge(ds.n(), ds.r2()));
  const double rd = cfg.ridge_d.value_or(default_boosting_ridge(ds.n(), ds.r2()));
  return boosting_weights_fit(ds, ry, rd, gram).nu;
}

// Joint-likelihood selection with boosting weights computed once on `ds`.
inline SelectionResult select(const Dataset& ds, PenaltyFamily family, const OptimizerConfig& cfg = {}) {
  const Vector nu = joint_boosting_nu(ds, cfg);
  return select_path(ds, ModelKind::joint, family, nu, cfg);
}

inline SelectionResult fit_outcome_only(const Dataset& ds, PenaltyFamily family,
                                        const OptimizerConfig& cfg = {}) {
  return select_path(ds, ModelKind::outcome, family, Vector::Ones(static_cast<Eigen::Index>(ds.r2())), cfg);
}

inline SelectionResult fit_treatment_only(const Dataset& ds, PenaltyFamily family,
                                          const OptimizerConfig& cfg = {}) {
  return select_path(ds, ModelKind::treatment, family, Vector::Ones(static_cast<Eigen::Index>(ds.r2())), cfg);
}

}  // namespace confsel

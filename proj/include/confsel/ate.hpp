#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "confsel/data.hpp"
#include "confsel/error.hpp"
#include "confsel/glm.hpp"
#include "confsel/parallel.hpp"
#include "confsel/penalty.hpp"
#include "confsel/selector.hpp"

namespace confsel {

struct DrFit {
  double theta = 0.0;
  Vector gamma;   // intercept, then coefficients of `used` (then pi terms)
  Vector s;       // d - pi_hat
  Vector pi_hat;
  IndexSet used;  // selected columns that survived the collinearity check
  std::vector<std::string> warnings;
  double max_score = 0.0;  // max_j |x_j'(d - pi_hat)| over the propensity design
};

struct DrOptions {
  // Adds pi_hat, pi_hat^2, ... up to this degree to the outcome regression.
  int pi_terms = 0;
  // > 0: under separation the propensity is refitted with this ridge on the
  // covariate block (with a warning) instead of failing.
  double separation_ridge = 0.0;
};

namespace detail {

// Greedy column drop by pivoted QR; returns kept positions into `cols`.
inline std::vector<std::size_t> independent_columns(const Matrix& base, const Matrix& cols) {
  Matrix Z(base.rows(), base.cols() + cols.cols());
  Z << base, cols;
  // scale columns so the rank threshold is unit-free
  Vector nrm = Z.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    if (nrm(j) > 0) Z.col(j) /= nrm(j);
  Eigen::ColPivHouseholderQR<Matrix> qr(Z);
  qr.setThreshold(1e-9);
  const auto rank = qr.rank();
  std::vector<char> keep(static_cast<std::size_t>(Z.cols()), 0);
  for (Eigen::Index i = 0; i < rank; ++i)
    keep[static_cast<std::size_t>(qr.colsPermutation().indices()(i))] = 1;
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < cols.cols(); ++j)
    if (keep[static_cast<std::size_t>(base.cols() + j)]) out.push_back(static_cast<std::size_t>(j));
  return out;
}

}  // namespace detail

// Propensity fit on the selected covariates, S = D - pi_hat, then least
// squares of Y on (1, S, X_selected); theta is the coefficient of S.
inline DrFit dr_estimate(const Dataset& ds, const IndexSet& selected, const DrOptions& opt = {}) {
  ds.require_both_arms();
  const auto n = static_cast<Eigen::Index>(ds.n());
  for (auto j : selected)
    if (j >= ds.r2()) fail(ErrorKind::validation, "selected index out of range");
  Matrix Xs(n, static_cast<Eigen::Index>(selected.size()));
  for (std::size_t k = 0; k < selected.size(); ++k)
    Xs.col(static_cast<Eigen::Index>(k)) = ds.x().col(static_cast<Eigen::Index>(selected[k]));

  DrFit fit;
  const Matrix ones = Matrix::Ones(n, 1);
  const auto keep = detail::independent_columns(ones, Xs);
  if (keep.size() < selected.size()) {
    std::string dropped;
    std::size_t q = 0;
    for (std::size_t k = 0; k < selected.size(); ++k) {
      if (q < keep.size() && keep[q] == k) {
        ++q;
        continue;
      }
      if (!dropped.empty()) dropped += ", ";
      dropped += ds.names()[selected[k]];
    }
    fit.warnings.push_back("collinear selected columns dropped: " + dropped);
  }
  for (auto k : keep) fit.used.push_back(selected[k]);
  const auto m = static_cast<Eigen::Index>(fit.used.size());
  if (m + 2 >= n) fail(ErrorKind::rank, "too many selected covariates for the sample size");

  Matrix P(n, 1 + m);
  P.col(0).setOnes();
  for (Eigen::Index k = 0; k < m; ++k)
    P.col(1 + k) = ds.x().col(static_cast<Eigen::Index>(fit.used[static_cast<std::size_t>(k)]));
  LogisticFit ps;
  try {
    ps = logistic_irls(P, ds.d(), 0.0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::divergence || !(opt.separation_ridge > 0.0)) throw;
    ps = logistic_irls(P, ds.d(), opt.separation_ridge);
    fit.warnings.push_back("propensity separated; refitted with ridge " + std::to_string(opt.separation_ridge));
  }
  fit.pi_hat = ps.fitted_probs;
  fit.s = ds.d() - fit.pi_hat;
  fit.max_score = (P.transpose() * fit.s).cwiseAbs().maxCoeff();

  const Eigen::Index extra = std::max(0, opt.pi_terms);
  Matrix O(n, 2 + m + extra);
  O.col(0).setOnes();
  O.col(1) = fit.s;
  O.middleCols(2, m) = P.rightCols(m);
  for (Eigen::Index q = 0; q < extra; ++q) O.col(2 + m + q) = fit.pi_hat.array().pow(static_cast<double>(q + 1));
  Eigen::ColPivHouseholderQR<Matrix> qr(O);
  qr.setThreshold(1e-10);
  if (qr.rank() < O.cols()) fail(ErrorKind::rank, "outcome design is rank deficient");
  const Vector coef = qr.solve(ds.y());
  fit.theta = coef(1);
  fit.gamma.resize(coef.size() - 1);
  fit.gamma << coef(0), coef.tail(coef.size() - 2);
  return fit;
}

// alpha entries with |alpha_j| <= 1/sqrt(n) set to 0; the beta block stays.
inline ParamVector threshold_eta(const ParamVector& eta, std::size_t n) {
  if (n < 1) fail(ErrorKind::parameter, "threshold_eta needs n >= 1");
  ParamVector out = eta;
  const double cut = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < out.alpha.size(); ++j)
    if (std::abs(out.alpha(j)) <= cut) out.alpha(j) = 0.0;
  return out;
}

struct BootstrapOptions {
  int B = 100;
  std::uint64_t seed = 20240101;
  int workers = 1;
  bool percentile_ci = false;
  ModelKind kind = ModelKind::joint;
  DrOptions dr;
};

inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Bootstrap around an existing full-data selection: each replicate refits
// the penalized estimator at the full-data lambda with recomputed weights,
// thresholds alpha at 1/sqrt(n), and re-runs the DR stage.
inline AteEstimate bootstrap_from_selection(const Dataset& ds, const SelectionResult& sel,
                                            PenaltyFamily family, const OptimizerConfig& cfg,
                                            const BootstrapOptions& bo) {
  if (bo.B < 2) fail(ErrorKind::parameter, "bootstrap needs B >= 2");
  const DrFit point = dr_estimate(ds, sel.selected, bo.dr);
  const auto n = ds.n();
  const bool dual = ds.r2() > n;
  Matrix gram;
  if (dual && bo.kind == ModelKind::joint) {
    gram.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    gram.selfadjointView<Eigen::Lower>().rankUpdate(ds.x());
    gram = gram.selfadjointView<Eigen::Lower>();
  }
  const PenaltyFn fn(family, sel.lambda_hat, cfg.scad_a);
  std::vector<double> thetas(static_cast<std::size_t>(bo.B), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> ok(static_cast<std::size_t>(bo.B), 0);

  parallel_for(static_cast<std::size_t>(bo.B), bo.workers, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(bo.seed, 0xB007, b));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::vector<std::size_t> idx(n);
      for (auto& i : idx) i = pick(rng);
      const Dataset rs = ds.rows(idx);
      if (!rs.both_arms()) continue;
      try {
        Vector nu;
        if (bo.kind == ModelKind::joint) {
          Matrix gb;
          if (dual) {
            gb.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t r = 0; r < n; ++r)
              for (std::size_t c = 0; c < n; ++c)
                gb(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    gram(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
          }
          nu = joint_boosting_nu(rs, cfg, dual ? &gb : nullptr);
        } else {
          nu = sel.nu;
        }
        const FitResult fr = fit_penalized_full(rs, bo.kind, fn, nu, cfg, &sel.eta_hat);
        const ParamVector th = threshold_eta(fr.eta, n);
        const DrFit f = dr_estimate(rs, th.support(), bo.dr);
        thetas[b] = f.theta;
        ok[b] = 1;
      } catch (const Error&) {
        // counted as a failed replicate
      }
      return;
    }
  });

  AteEstimate est;
  est.theta_hat = point.theta;
  est.gamma_hat = point.gamma;
  est.selected = sel.selected;
  est.lambda_hat = sel.lambda_hat;
  for (std::size_t b = 0; b < thetas.size(); ++b) {
    if (ok[b]) est.boot_thetas.push_back(thetas[b]);
    else ++est.n_boot_failed;
  }
  est.n_boot = static_cast<int>(est.boot_thetas.size());
  if (est.n_boot < 2) fail(ErrorKind::numerical, "bootstrap produced fewer than two estimates");
  est.sd_tb = sample_sd(est.boot_thetas);
  if (bo.percentile_ci) {
    est.ci_lo = quantile(est.boot_thetas, 0.025);
    est.ci_hi = quantile(est.boot_thetas, 0.975);
  } else {
    est.ci_lo = est.theta_hat - 1.96 * est.sd_tb;
    est.ci_hi = est.theta_hat + 1.96 * est.sd_tb;
  }
  return est;
}

// Full pipeline on (already standardized) data: select, DR estimate, bootstrap.
inline AteEstimate thresholded_bootstrap(const Dataset& ds, PenaltyFamily family,
                                         const OptimizerConfig& cfg, int B, std::uint64_t seed,
                                         int workers = 1) {
  const SelectionResult sel = select(ds, family, cfg);
  BootstrapOptions bo;
  bo.B = B;
  bo.seed = seed;
  bo.workers = workers;
  return bootstrap_from_selection(ds, sel, family, cfg, bo);
}

}  // namespace confsel

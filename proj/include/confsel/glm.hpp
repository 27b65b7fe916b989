#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "confsel/data.hpp"
#include "confsel/error.hpp"

namespace confsel {

struct LinearFit {
  Vector coef;  // intercept first
  Vector residuals;
  double rss = 0.0;
};

struct LogisticFit {
  Vector coef;  // intercept first
  Vector fitted_probs;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace glm {

inline constexpr double prob_clamp = 1e-12;

inline double expit(double t) {
  if (t >= 0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
inline double log1pexp(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Bernoulli log-likelihood with clamped probabilities.
inline double bernoulli_loglik(const Vector& d, const Vector& eta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double p = std::clamp(expit(eta(i)), prob_clamp, 1.0 - prob_clamp);
    ll += d(i) > 0.5 ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

struct RidgeSolution {
  Vector c;  // unpenalized block
  Vector b;  // penalized block
};

// min_{c,b} sum_i w_i (y_i - U_i c - X_i b)^2 + ridge * ||b||^2
//
// Primal normal equations when X has at most n columns (or ridge == 0);
// otherwise the n x n dual system with (X X' + ridge/W) and the unpenalized
// block profiled by GLS. `gram`, when given, must equal X X'.
inline RidgeSolution ridge_ls(const Matrix& U, const Matrix& X, const Vector& y,
                              const Vector* w, double ridge, const Matrix* gram = nullptr) {
  const Eigen::Index n = y.size();
  const Eigen::Index k = U.cols();
  const Eigen::Index p = X.cols();
  if (U.rows() != n || X.rows() != n)
    fail(ErrorKind::validation, "design rows do not match response length");
  if (!(ridge >= 0.0)) fail(ErrorKind::parameter, "ridge must be >= 0");
  const Vector sw = w ? Vector(w->cwiseSqrt()) : Vector(Vector::Ones(n));

  RidgeSolution out;
  if (ridge == 0.0 || p <= n) {
    Matrix Z(n, k + p);
    Z.leftCols(k) = sw.asDiagonal() * U;
    Z.rightCols(p) = sw.asDiagonal() * X;
    const Vector yw = sw.cwiseProduct(y);
    Vector coef;
    if (ridge == 0.0) {
      if (k + p > n)
        fail(ErrorKind::rank, "rank-deficient design: " + std::to_string(k + p) +
                                  " columns, " + std::to_string(n) + " rows, ridge 0");
      Eigen::ColPivHouseholderQR<Matrix> qr(Z);
      qr.setThreshold(1e-10);
      if (qr.rank() < k + p)
        fail(ErrorKind::rank, "rank-deficient design (rank " + std::to_string(qr.rank()) + " of " +
                                  std::to_string(k + p) + "); use ridge > 0");
      coef = qr.solve(yw);
    } else {
      Matrix A = Matrix::Zero(k + p, k + p);
      A.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
      A = A.selfadjointView<Eigen::Lower>();
      A.diagonal().tail(p).array() += ridge;
      const Vector rhs = Z.transpose() * yw;
      Eigen::LLT<Matrix> llt(A);
      if (llt.info() != Eigen::Success) {
        Eigen::LDLT<Matrix> ldlt(A);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
          fail(ErrorKind::rank, "singular ridge normal equations");
        coef = ldlt.solve(rhs);
      } else {
        coef = llt.solve(rhs);
      }
    }
    out.c = coef.head(k);
    out.b = coef.tail(p);
    return out;
  }

  // Dual: b = Xw' M^{-1} (yw - Uw c), M = Xw Xw' + ridge I.
  Matrix M(n, n);
  if (gram) {
    M = sw.asDiagonal() * (*gram) * sw.asDiagonal();
  } else {
    const Matrix Xw = sw.asDiagonal() * X;
    M.setZero();
    M.selfadjointView<Eigen::Lower>().rankUpdate(Xw);
    M = M.selfadjointView<Eigen::Lower>();
  }
  M.diagonal().array() += ridge;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) fail(ErrorKind::rank, "singular dual ridge system");
  const Matrix Uw = sw.asDiagonal() * U;
  const Vector yw = sw.cwiseProduct(y);
  const Vector Miy = llt.solve(yw);
  if (k > 0) {
    const Matrix MiU = llt.solve(Uw);
    const Matrix G = Uw.transpose() * MiU;
    Eigen::LDLT<Matrix> gl(G);
    out.c = gl.solve(Uw.transpose() * Miy);
    const Vector resid = Miy - MiU * out.c;
    out.b = X.transpose() * sw.cwiseProduct(resid);
  } else {
    out.c = Vector(0);
    out.b = X.transpose() * sw.cwiseProduct(Miy);
  }
  return out;
}

struct LogisticOptions {
  int max_iter = 100;
  double rel_tol = 1e-10;
  int max_halvings = 30;
  const Matrix* gram = nullptr;  // X X' for the dual path
  const Vector* init_c = nullptr;
  const Vector* init_b = nullptr;
};

// Penalized Newton (IRLS) for logit P(D=1) = U c + X b, penalty (ridge/2)||b||^2.
inline RidgeSolution logistic_ridge(const Matrix& U, const Matrix& X, const Vector& d, double ridge,
                                    LogisticFit* diag, const LogisticOptions& opt = {}) {
  const Eigen::Index n = d.size();
  const double n_treated = d.sum();
  if (n_treated < 0.5 || n_treated > static_cast<double>(n) - 0.5)
    fail(ErrorKind::degenerate, "logistic fit needs both treatment arms");
  if (ridge == 0.0 && U.cols() + X.cols() >= n)
    fail(ErrorKind::rank, "logistic design has >= n columns; use ridge > 0");

  RidgeSolution cur;
  cur.c = opt.init_c ? *opt.init_c : Vector::Zero(U.cols());
  cur.b = opt.init_b ? *opt.init_b : Vector::Zero(X.cols());
  if (!opt.init_c && U.cols() > 0) {
    // intercept-only start
    const double pbar = n_treated / static_cast<double>(n);
    cur.c(0) = std::log(pbar / (1.0 - pbar));
  }
  auto linpred = [&](const RidgeSolution& s) {
    Vector e = U * s.c;
    if (X.cols() > 0) e.noalias() += X * s.b;
    return e;
  };
  auto objective = [&](const Vector& e, const RidgeSolution& s) {
    return bernoulli_loglik(d, e) - 0.5 * ridge * s.b.squaredNorm();
  };
  Vector eta = linpred(cur);
  double obj = objective(eta, cur);
  bool converged = false;
  bool separated = false;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Vector pi(n), w(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pi(i) = expit(eta(i));
      w(i) = std::max(pi(i) * (1.0 - pi(i)), 1e-12);
      z(i) = eta(i) + (d(i) - pi(i)) / w(i);
    }
    const RidgeSolution target = ridge_ls(U, X, z, &w, ridge, opt.gram);
    double t = 1.0;
    RidgeSolution next;
    Vector eta_next;
    double obj_next = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      next.c = cur.c + t * (target.c - cur.c);
      next.b = cur.b + t * (target.b - cur.b);
      eta_next = linpred(next);
      obj_next = objective(eta_next, next);
      if (obj_next >= obj - 1e-12 * std::abs(obj)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const double change = std::abs(obj_next - obj) / std::max(std::abs(obj), 1e-300);
    cur = std::move(next);
    eta = std::move(eta_next);
    obj = obj_next;
    if (ridge == 0.0 && eta.cwiseAbs().maxCoeff() > 50.0) {
      separated = true;
      break;
    }
    if (change < opt.rel_tol) {
      // score, including the ridge term
      Vector resid(n);
      for (Eigen::Index i = 0; i < n; ++i) resid(i) = d(i) - expit(eta(i));
      double score = U.cols() > 0 ? (U.transpose() * resid).cwiseAbs().maxCoeff() : 0.0;
      if (X.cols() > 0)
        score = std::max(score, (X.transpose() * resid - ridge * cur.b).cwiseAbs().maxCoeff());
      if (score < 1e-10 * static_cast<double>(n) || change == 0.0) {
        converged = true;
        ++it;
        break;
      }
    }
  }
  // An unconverged fit with fitted probabilities at the clamp is separation.
  if (ridge == 0.0 && (separated || (!converged && eta.cwiseAbs().maxCoeff() > 25.0)))
    fail(ErrorKind::divergence,
         "logistic fit diverges (complete or quasi-complete separation); refit with ridge > 0");
  if (diag) {
    diag->fitted_probs.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      diag->fitted_probs(i) = std::clamp(expit(eta(i)), prob_clamp, 1.0 - prob_clamp);
    diag->loglik = bernoulli_loglik(d, eta);
    diag->converged = converged;
    diag->iterations = it;
  }
  return cur;
}

}  // namespace glm

// Least squares (or ridge) of y on `design`; the first column is the
// intercept and is never penalized.
inline LinearFit ols(const Matrix& design, const Vector& y, double ridge = 0.0) {
  if (design.rows() != y.size()) fail(ErrorKind::validation, "rows(design) != length(y)");
  if (design.cols() == 0) fail(ErrorKind::validation, "empty design");
  if (ridge == 0.0 && design.cols() > design.rows())
    fail(ErrorKind::rank, "rank-deficient design: more columns than rows with ridge 0");
  const Matrix U = design.leftCols(1);
  const Matrix X = design.rightCols(design.cols() - 1);
  const auto sol = glm::ridge_ls(U, X, y, nullptr, ridge);
  LinearFit fit;
  fit.coef.resize(design.cols());
  fit.coef << sol.c, sol.b;
  fit.residuals = y - design * fit.coef;
  fit.rss = fit.residuals.squaredNorm();
  return fit;
}

// Logistic regression of d on `design` by Newton/IRLS with step-halving;
// first column is the unpenalized intercept.
inline LogisticFit logistic_irls(const Matrix& design, const Vector& d, double ridge = 0.0) {
  if (design.rows() != d.size()) fail(ErrorKind::validation, "rows(design) != length(d)");
  if (design.cols() == 0) fail(ErrorKind::validation, "empty design");
  const Matrix U = design.leftCols(1);
  const Matrix X = design.rightCols(design.cols() - 1);
  LogisticFit fit;
  const auto sol = glm::logistic_ridge(U, X, d, ridge, &fit);
  fit.coef.resize(design.cols());
  fit.coef << sol.c, sol.b;
  return fit;
}

}  // namespace confsel

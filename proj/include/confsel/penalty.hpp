#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "confsel/data.hpp"
#include "confsel/error.hpp"
#include "confsel/glm.hpp"

namespace confsel {

// Unweighted penalty p*_lambda(|t|); boosting weights multiply it per
// coordinate.
class PenaltyFn {
 public:
  PenaltyFn(PenaltyFamily family, double lambda, double a = 3.7)
      : family_(family), lambda_(lambda), a_(a) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      fail(ErrorKind::parameter, "penalty lambda must be finite and >= 0");
    if (family == PenaltyFamily::scad && !(a > 2.0))
      fail(ErrorKind::parameter, "SCAD shape a must exceed 2 (got " + std::to_string(a) + ")");
  }

  PenaltyFamily family() const { return family_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }

  double value(double t) const {
    const double u = std::abs(t);
    if (family_ == PenaltyFamily::lasso) return lambda_ * u;
    const double l = lambda_;
    if (u <= l) return l * u;
    if (u <= a_ * l) return (2.0 * a_ * l * u - u * u - l * l) / (2.0 * (a_ - 1.0));
    return (a_ + 1.0) * l * l / 2.0;
  }

  // p'(t) for t != 0; odd in t.
  double deriv(double t) const {
    const double s = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
    return s * deriv_abs(std::abs(t));
  }

  // p'(u) for u >= 0; at u = 0 this is the right limit (= lambda).
  double deriv_abs(double u) const {
    if (family_ == PenaltyFamily::lasso) return lambda_;
    const double l = lambda_;
    if (u <= l) return l;
    return std::max(a_ * l - u, 0.0) / (a_ - 1.0);
  }

  // Diagonal entry of the local quadratic approximation, p'(|t|)/(|t|+delta).
  double lqa_weight(double t, double delta) const {
    const double u = std::abs(t);
    return deriv_abs(u) / (u + delta);
  }

 private:
  PenaltyFamily family_;
  double lambda_;
  double a_;
};

inline PenaltyFn lasso_penalty(double lambda) { return PenaltyFn(PenaltyFamily::lasso, lambda); }
inline PenaltyFn scad_penalty(double lambda, double a = 3.7) {
  return PenaltyFn(PenaltyFamily::scad, lambda, a);
}
inline PenaltyFn make_penalty(const PenaltySpec& s) { return PenaltyFn(s.family, s.lambda, s.scad_a); }

// sum_j nu_j p*(|alpha_j|)
inline double weighted_penalty(const PenaltyFn& fn, const Vector& nu, const Vector& alpha) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < alpha.size(); ++j)
    if (alpha(j) != 0.0) total += nu(j) * fn.value(alpha(j));
  return total;
}

// ---------------------------------------------------------------------------
// Boosting weights nu_j = 1 / (|a_Y,j| (1 + |a_D,j|)).

inline constexpr double nu_floor_eps = 1e-4;

// 1e-3 n when r2 >= n, else 0.
inline double default_boosting_ridge(std::size_t n, std::size_t r2) {
  return r2 >= n ? 1e-3 * static_cast<double>(n) : 0.0;
}

inline double boosting_weight(double alpha_y, double alpha_d, double eps = nu_floor_eps) {
  return 1.0 / (std::max(std::abs(alpha_y), eps) * (1.0 + std::abs(alpha_d)));
}

struct BoostingFit {
  Vector nu;
  Vector alpha_y;  // X-block of ridge/OLS of Y on (1, D, X)
  Vector alpha_d;  // X-block of ridge logistic of D on (1, X)
  double ridge_d = 0.0;  // ridge actually used for alpha_d
};

// `gram`, when supplied, is X X' and enables the dual solvers for r2 > n.
inline BoostingFit boosting_weights_fit(const Dataset& ds, double ridge_y, double ridge_d,
                                        const Matrix* gram = nullptr) {
  const auto n = static_cast<Eigen::Index>(ds.n());
  ds.require_both_arms();
  Matrix U(n, 2);
  U.col(0).setOnes();
  U.col(1) = ds.d();
  const bool dual = ds.x().cols() > n;
  Matrix local_gram;
  if (dual && !gram) {
    local_gram.setZero(n, n);
    local_gram.selfadjointView<Eigen::Lower>().rankUpdate(ds.x());
    local_gram = local_gram.selfadjointView<Eigen::Lower>();
    gram = &local_gram;
  }
  BoostingFit out;
  out.alpha_y = glm::ridge_ls(U, ds.x(), ds.y(), nullptr, ridge_y, dual ? gram : nullptr).b;
  glm::LogisticOptions lo;
  lo.gram = dual ? gram : nullptr;
  const Matrix U1 = Matrix::Ones(n, 1);
  LogisticFit diag;
  out.ridge_d = ridge_d;
  try {
    out.alpha_d = glm::logistic_ridge(U1, ds.x(), ds.d(), ridge_d, &diag, lo).b;
  } catch (const Error& e) {
    // separation in the unpenalized treatment fit: fall back to a small ridge
    if (e.kind() != ErrorKind::divergence || ridge_d > 0.0) throw;
    out.ridge_d = 1e-3 * static_cast<double>(n);
    out.alpha_d = glm::logistic_ridge(U1, ds.x(), ds.d(), out.ridge_d, &diag, lo).b;
  }
  out.nu.resize(out.alpha_y.size());
  for (Eigen::Index j = 0; j < out.nu.size(); ++j)
    out.nu(j) = boosting_weight(out.alpha_y(j), out.alpha_d(j));
  return out;
}

inline Vector boosting_weights(const Dataset& ds, double ridge_y, double ridge_d) {
  return boosting_weights_fit(ds, ridge_y, ridge_d).nu;
}

// ---------------------------------------------------------------------------
// Property checks for the penalty conditions.

struct PenaltyReport {
  bool zero_at_origin = true;
  bool nonnegative = true;
  bool symmetric = true;
  bool monotone = true;
  bool p1 = true;
  // sqrt(n) * max_{|t| >= t0} p'_{lambda_n}(t) along lambda_n = c / sqrt(n)
  std::vector<std::pair<double, double>> p2_sequence;
  bool p2 = false;
  // inf_{t in (0, B_n)} nu_n(t) p'_{lambda_n}(t), nu_n(t) = 1/t, B_n = n^{-3/4}
  std::vector<std::pair<double, double>> p3_sequence;
  bool p3 = false;
  bool flat_tail = false;  // derivative vanishes beyond a*lambda
  std::vector<std::string> violations;
};

inline PenaltyReport check_penalty_conditions(const PenaltyFn& fn, const std::vector<double>& grid,
                                              double t0 = 0.5, double tol = 1e-12) {
  PenaltyReport r;
  if (fn.value(0.0) != 0.0) {
    r.zero_at_origin = false;
    r.violations.push_back("value(0) != 0");
  }
  std::vector<double> pos;
  for (double t : grid) {
    if (t == 0.0) continue;
    const double v = fn.value(t), vm = fn.value(-t);
    if (v < 0.0 && r.nonnegative) {
      r.nonnegative = false;
      r.violations.push_back("negative value at t=" + std::to_string(t));
    }
    if (std::abs(v - vm) > tol * std::max(1.0, std::abs(v)) && r.symmetric) {
      r.symmetric = false;
      r.violations.push_back("asymmetric at t=" + std::to_string(t));
    }
    pos.push_back(std::abs(t));
  }
  std::sort(pos.begin(), pos.end());
  for (std::size_t i = 1; i < pos.size(); ++i) {
    if (fn.value(pos[i]) + tol * std::max(1.0, fn.value(pos[i])) < fn.value(pos[i - 1])) {
      r.monotone = false;
      r.violations.push_back("decreasing between " + std::to_string(pos[i - 1]) + " and " +
                             std::to_string(pos[i]));
      break;
    }
  }
  r.p1 = r.zero_at_origin && r.nonnegative && r.symmetric && r.monotone;

  // P2 surrogate
  const double c = std::max(fn.lambda(), 1e-3);
  const double ns[] = {1e2, 1e4, 1e6, 1e8, 1e10};
  for (double n : ns) {
    const PenaltyFn fn_n(fn.family(), c / std::sqrt(n), fn.a());
    double mx = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double t = t0 * std::pow(10.0, 2.0 * k / 400.0);  // [t0, 100 t0]
      mx = std::max(mx, std::abs(fn_n.deriv(t)));
    }
    r.p2_sequence.emplace_back(n, std::sqrt(n) * mx);
  }
  r.p2 = r.p2_sequence.back().second < 1e-8 * std::max(1.0, r.p2_sequence.front().second);
  if (!r.p2) r.violations.push_back("P2: sqrt(n) max p'(t), |t|>=t0, does not vanish");

  // P3 surrogate
  for (double n : ns) {
    const PenaltyFn fn_n(fn.family(), c / std::sqrt(n), fn.a());
    const double bn = std::pow(n, -0.75);
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 200; ++k) {
      const double t = bn * std::pow(10.0, -3.0 * k / 200.0);  // (1e-3 B_n, B_n]
      mn = std::min(mn, fn_n.deriv_abs(t) / t);
    }
    r.p3_sequence.emplace_back(n, mn);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < r.p3_sequence.size(); ++i)
    increasing = increasing && r.p3_sequence[i].second > r.p3_sequence[i - 1].second;
  r.p3 = increasing && r.p3_sequence.back().second > 10.0 * r.p3_sequence.front().second;
  if (!r.p3) r.violations.push_back("P3: weighted derivative near 0 stays bounded");

  if (fn.family() == PenaltyFamily::scad && fn.lambda() > 0.0) {
    r.flat_tail = true;
    for (int k = 0; k <= 100; ++k) {
      const double t = fn.a() * fn.lambda() * (1.0 + k / 10.0);
      if (fn.deriv(t) != 0.0) r.flat_tail = false;
    }
  }
  return r;
}

}  // namespace confsel

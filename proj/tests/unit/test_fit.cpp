// Penalized optimizer, GCV path, DR estimator and bootstrap.

#include <gtest/gtest.h>

#include <random>

#include "confsel/confsel.hpp"

using namespace confsel;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no confsel::Error thrown";
  return ErrorKind::numerical;
}

// Small confounded sample: x1 drives both d and y, x2 only y.
Dataset confounded(std::size_t n, std::size_t r2, std::uint64_t seed, double theta = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u;
  Matrix x(n, r2);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = nd(rng);
  Vector d(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d(ii) = u(rng) < glm::expit(0.8 * x(ii, 0)) ? 1.0 : 0.0;
    y(ii) = theta * d(ii) + 1.5 * x(ii, 0) + 1.0 * x(ii, 1) + nd(rng);
  }
  return Dataset(y, d, x, Dataset::default_names(r2));
}

}  // namespace

// ---- optimizer

TEST(Optimizer, LambdaZeroMatchesUnpenalizedMle) {
  const Dataset ds = confounded(200, 3, 1);
  const Vector nu = Vector::Ones(3);
  const FitResult lqa = fit_penalized_full(ds, ModelKind::joint, lasso_penalty(0.0), nu, {});
  ASSERT_TRUE(lqa.converged);
  // Independent oracle: Newton on the profiled objective via the analytic
  // gradient and a finite-difference Hessian.
  ParamVector eta = lqa.eta;
  const JointObjective obj(ds);
  eta = profile_sigma2(eta, ds);
  const Vector g = nll_gradient(eta, ds);
  // Stationarity of the unpenalized NLL in every coordinate.
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-4 * static_cast<double>(ds.n()));
  // Perturbations cannot lower the objective.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  const double f0 = obj.value(eta);
  for (int k = 0; k < 50; ++k) {
    Vector v = to_flat(eta);
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (j != EtaLayout::size(3) - 1) v(j) += 1e-3 * nd(rng);
    EXPECT_GE(obj.value(profile_sigma2(from_flat(v), ds)), f0 - 1e-8);
  }
}

TEST(Optimizer, LargeLambdaGivesNullFit) {
  const Dataset ds = confounded(150, 4, 3);
  const Vector nu = Vector::Ones(4);
  const double lmax = lambda_max(ds, ModelKind::joint, nu);
  const FitResult f = fit_penalized_full(ds, ModelKind::joint, lasso_penalty(1.01 * lmax), nu, {});
  EXPECT_TRUE(f.eta.support().empty());
  EXPECT_NEAR(f.eta.beta0_d, std::log(ds.d().mean() / (1.0 - ds.d().mean())), 1e-6);
  // Outcome block: OLS of y on (1, d).
  Matrix design(ds.n(), 2);
  design << Matrix::Ones(static_cast<Eigen::Index>(ds.n()), 1), ds.d();
  const LinearFit o = ols(design, ds.y());
  EXPECT_NEAR(f.eta.beta0_y, o.coef(0), 1e-6);
  EXPECT_NEAR(f.eta.beta_d, o.coef(1), 1e-6);
  // Just below lmax something enters.
  const FitResult g = fit_penalized_full(ds, ModelKind::joint, lasso_penalty(0.9 * lmax), nu, {});
  EXPECT_FALSE(g.eta.support().empty());
}

TEST(Optimizer, ObjectiveTraceNonincreasing) {
  const Dataset ds = confounded(120, 20, 4);
  const Vector nu = Vector::Ones(20);
  const FitResult f = fit_penalized_full(ds, ModelKind::joint, scad_penalty(0.05), nu, {});
  for (std::size_t k = 1; k < f.objective_trace.size(); ++k)
    EXPECT_LE(f.objective_trace[k], f.objective_trace[k - 1] + 1e-9);
}

TEST(Optimizer, OutcomeOnlyLambdaZeroIsOls) {
  const Dataset ds = confounded(100, 3, 5);
  OptimizerConfig cfg;
  cfg.lambda_grid = {0.0};
  const SelectionResult s = fit_outcome_only(ds, PenaltyFamily::lasso, cfg);
  Matrix design(100, 5);
  design << Matrix::Ones(100, 1), ds.d(), ds.x();
  const LinearFit o = ols(design, ds.y());
  EXPECT_NEAR(s.eta_hat.beta_d, o.coef(1), 1e-6);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s.eta_hat.alpha(j), o.coef(2 + j), 1e-6);
}

TEST(Optimizer, TreatmentOnlyLambdaZeroIsLogistic) {
  const Dataset ds = confounded(300, 2, 6);
  OptimizerConfig cfg;
  cfg.lambda_grid = {0.0};
  const SelectionResult s = fit_treatment_only(ds, PenaltyFamily::scad, cfg);
  Matrix design(300, 3);
  design << Matrix::Ones(300, 1), ds.x();
  const LogisticFit l = logistic_irls(design, ds.d());
  EXPECT_NEAR(s.eta_hat.beta0_d, l.coef(0), 1e-5);
  EXPECT_NEAR(s.eta_hat.alpha(0), l.coef(1), 1e-5);
  EXPECT_NEAR(s.eta_hat.alpha(1), l.coef(2), 1e-5);
}

TEST(Optimizer, BadConfigRejected) {
  OptimizerConfig cfg;
  cfg.lambda_grid = {0.1, 0.2};
  EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::parameter);
  cfg = {};
  cfg.grid_ratio = 0.0;
  EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::parameter);
}

// ---- GCV and path

TEST(Gcv, InterceptOnlyLimit) {
  const Dataset ds = confounded(80, 3, 7);
  const Vector nu = Vector::Ones(3);
  const double lmax = lambda_max(ds, ModelKind::outcome, nu);
  const FitResult f = fit_penalized_full(ds, ModelKind::outcome, lasso_penalty(2 * lmax), nu, {});
  const GcvValue g = gcv(ds, f.eta, ModelKind::outcome, lasso_penalty(2 * lmax), nu);
  EXPECT_DOUBLE_EQ(g.dof, 0.0);
  EXPECT_NEAR(g.gcv, joint_terms(f.eta, ds).rss / 80.0, 1e-12);
}

TEST(Gcv, PerfectFitGivesZero) {
  Matrix x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  const Vector d = (Vector(6) << 0, 1, 0, 1, 0, 1).finished();
  const Vector y = 2.0 * x.col(0) + 3.0 * d;
  const Dataset ds(y, d, x, {"x1"});
  ParamVector eta = ParamVector::zeros(1);
  eta.beta_d = 3.0;
  eta.alpha(0) = 2.0;
  const GcvValue g = gcv(ds, eta, ModelKind::outcome, scad_penalty(0.1), Vector::Ones(1));
  EXPECT_DOUBLE_EQ(g.gcv, 0.0);
  EXPECT_NEAR(g.dof, 1.0, 1e-12);  // SCAD flat beyond a lambda: no shrinkage
}

TEST(Gcv, DofSaturatedIsDegenerate) {
  const Dataset ds = confounded(5, 6, 8);
  ParamVector eta = ParamVector::zeros(6);
  eta.alpha.setConstant(10.0);
  const GcvValue g = gcv(ds, eta, ModelKind::outcome, scad_penalty(0.01), Vector::Ones(6));
  EXPECT_TRUE(g.degenerate);
}

TEST(Path, SelectsTrueSignalLowDim) {
  const Dataset raw = confounded(400, 10, 9);
  const auto [ds, sc] = standardize(raw);
  const SelectionResult s = select(ds, PenaltyFamily::scad);
  EXPECT_NE(std::find(s.selected.begin(), s.selected.end(), 0u), s.selected.end());
  EXPECT_LE(s.selected.size(), 5u);
  EXPECT_FALSE(s.gcv_path.empty());
  bool found = false;
  for (const auto& p : s.gcv_path) found = found || p.lambda == s.lambda_hat;
  EXPECT_TRUE(found);
}

TEST(Path, AllDegenerateIsSelectionError) {
  const Dataset ds = confounded(8, 12, 10);
  OptimizerConfig cfg;
  cfg.lambda_grid = {0.0};
  EXPECT_EQ(kind_of([&] { fit_outcome_only(ds, PenaltyFamily::lasso, cfg); }), ErrorKind::selection);
}

TEST(Path, BoostingPenalizesTreatmentOnlyCovariates) {
  // x3 drives d only; its weight must exceed that of the shared confounder.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u;
  const int n = 500;
  Matrix x(n, 3);
  Vector d(n), y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = nd(rng);
    d(i) = u(rng) < glm::expit(0.7 * x(i, 0) + 1.0 * x(i, 2)) ? 1.0 : 0.0;
    y(i) = d(i) + 1.0 * x(i, 0) + 0.8 * x(i, 1) + nd(rng);
  }
  const Vector nu = joint_boosting_nu(Dataset(y, d, x, Dataset::default_names(3)), {});
  EXPECT_GT(nu(2), 5.0 * nu(0));
  EXPECT_GT(nu(2), 5.0 * nu(1));
}

// ---- DR estimator

TEST(Dr, ScoreOrthogonality) {
  const Dataset ds = confounded(300, 4, 12);
  const DrFit f = dr_estimate(ds, {0, 1, 3});
  EXPECT_LT(f.max_score, 1e-8 * 300);
  EXPECT_NEAR(f.s.sum(), 0.0, 1e-8 * 300);
}

TEST(Dr, EmptySelectionIsDifferenceInMeans) {
  const Dataset ds = confounded(100, 2, 13);
  const DrFit f = dr_estimate(ds, {});
  double m1 = 0, m0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < 100; ++i) {
    if (ds.d()(i) == 1.0) {
      m1 += ds.y()(i);
      n1 += 1;
    } else {
      m0 += ds.y()(i);
    }
  }
  EXPECT_NEAR(f.theta, m1 / n1 - m0 / (100 - n1), 1e-10);
}

TEST(Dr, RecoversEffectWithConfounderAdjusted) {
  double acc = 0.0;
  for (int r = 0; r < 20; ++r) acc += dr_estimate(confounded(400, 3, 100 + r, 2.0), {0, 1}).theta;
  EXPECT_NEAR(acc / 20.0, 2.0, 0.06);
}

TEST(Dr, CollinearColumnDroppedWithWarning) {
  Dataset base = confounded(100, 2, 14);
  Matrix x(100, 3);
  x << base.x(), 2.0 * base.x().col(0);
  const Dataset ds(base.y(), base.d(), x, Dataset::default_names(3));
  const DrFit f = dr_estimate(ds, {0, 1, 2});
  EXPECT_EQ(f.used.size(), 2u);
  EXPECT_FALSE(f.warnings.empty());
}

TEST(Dr, SingleArmRejected) {
  const Dataset base = confounded(20, 2, 15);
  const Dataset ds(base.y(), Vector::Ones(20), base.x(), base.names());
  EXPECT_EQ(kind_of([&] { dr_estimate(ds, {0}); }), ErrorKind::degenerate);
}

TEST(Dr, SeparationPropagatesOrRidges) {
  Matrix x(8, 1);
  x << -4, -3, -2, -1, 1, 2, 3, 4;
  const Vector d = (Vector(8) << 0, 0, 0, 0, 1, 1, 1, 1).finished();
  const Vector y = x.col(0) + d;
  const Dataset ds(y, d, x, {"x1"});
  EXPECT_EQ(kind_of([&] { dr_estimate(ds, {0}); }), ErrorKind::divergence);
  DrOptions opt;
  opt.separation_ridge = 1e-2;
  const DrFit f = dr_estimate(ds, {0}, opt);
  EXPECT_FALSE(f.warnings.empty());
  EXPECT_TRUE(std::isfinite(f.theta));
}

TEST(Threshold, Examples) {
  ParamVector a = ParamVector::zeros(2);
  a.alpha << 0.05, 0.2;
  const ParamVector t = threshold_eta(a, 100);
  EXPECT_DOUBLE_EQ(t.alpha(0), 0.0);
  EXPECT_DOUBLE_EQ(t.alpha(1), 0.2);
  ParamVector b = ParamVector::zeros(1);
  b.alpha << 0.6;
  EXPECT_DOUBLE_EQ(threshold_eta(b, 4).alpha(0), 0.6);
  ParamVector c = ParamVector::zeros(3);
  c.alpha << 0.0, 0.3, -0.01;
  EXPECT_EQ(threshold_eta(c, 25).support(), IndexSet{1});
}

TEST(Bootstrap, DeterministicAndWorkerInvariant) {
  const auto [ds, sc] = standardize(confounded(150, 6, 16));
  const SelectionResult sel = select(ds, PenaltyFamily::scad);
  BootstrapOptions bo;
  bo.B = 12;
  bo.seed = 99;
  const AteEstimate a = bootstrap_from_selection(ds, sel, PenaltyFamily::scad, {}, bo);
  bo.workers = 3;
  const AteEstimate b = bootstrap_from_selection(ds, sel, PenaltyFamily::scad, {}, bo);
  EXPECT_EQ(a.boot_thetas, b.boot_thetas);
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_GT(a.sd_tb, 0.0);
  EXPECT_EQ(a.n_boot + a.n_boot_failed, 12);
  EXPECT_LT(a.ci_lo, a.theta_hat);
  EXPECT_GT(a.ci_hi, a.theta_hat);
}

TEST(Bootstrap, NeedsTwoReplicates) {
  const auto [ds, sc] = standardize(confounded(60, 3, 17));
  const SelectionResult sel = select(ds, PenaltyFamily::lasso);
  BootstrapOptions bo;
  bo.B = 1;
  EXPECT_EQ(kind_of([&] { bootstrap_from_selection(ds, sel, PenaltyFamily::lasso, {}, bo); }),
            ErrorKind::parameter);
}

TEST(Bootstrap, QuantileAndSd) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.0), 1.0);
  EXPECT_NEAR(sample_sd({1, 2, 3, 4}), std::sqrt(5.0 / 3.0), 1e-15);
}

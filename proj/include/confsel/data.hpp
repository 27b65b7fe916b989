#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "confsel/error.hpp"

namespace confsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<std::size_t>;  // sorted ascending

// Observational sample z_i = (y_i, d_i, x_i). Immutable once built; the
// constructor enforces the shape and label invariants.
class Dataset {
 public:
  Dataset() = default;

  Dataset(Vector y, Vector d, Matrix x, std::vector<std::string> names,
          std::string outcome_name = "y", std::string treatment_name = "d")
      : y_(std::move(y)),
        d_(std::move(d)),
        x_(std::move(x)),
        names_(std::move(names)),
        outcome_name_(std::move(outcome_name)),
        treatment_name_(std::move(treatment_name)) {
    validate();
  }

  // Default covariate names x1..xr.
  static std::vector<std::string> default_names(std::size_t r2) {
    std::vector<std::string> out;
    out.reserve(r2);
    for (std::size_t j = 0; j < r2; ++j) out.push_back("x" + std::to_string(j + 1));
    return out;
  }

  const Vector& y() const { return y_; }
  const Vector& d() const { return d_; }
  const Matrix& x() const { return x_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& outcome_name() const { return outcome_name_; }
  const std::string& treatment_name() const { return treatment_name_; }
  std::size_t n() const { return static_cast<std::size_t>(y_.size()); }
  std::size_t r2() const { return static_cast<std::size_t>(x_.cols()); }

  // Rows removed by listwise deletion at load time.
  std::size_t rows_dropped() const { return rows_dropped_; }
  Dataset& with_rows_dropped(std::size_t k) {
    rows_dropped_ = k;
    return *this;
  }

  std::size_t n_treated() const {
    return static_cast<std::size_t>((d_.array() > 0.5).count());
  }
  bool both_arms() const {
    const std::size_t t = n_treated();
    return t > 0 && t < n();
  }
  void require_both_arms() const {
    if (!both_arms())
      fail(ErrorKind::degenerate, "treatment has a single arm (" +
                                      std::to_string(n_treated()) + " of " +
                                      std::to_string(n()) + " treated)");
  }

  // Rows picked by index (with repetition), e.g. a bootstrap resample.
  Dataset rows(const std::vector<std::size_t>& idx) const {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Vector y(m), d(m);
    Matrix x(m, x_.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto src = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]);
      y(i) = y_(src);
      d(i) = d_(src);
      x.row(i) = x_.row(src);
    }
    return Dataset(std::move(y), std::move(d), std::move(x), names_, outcome_name_,
                   treatment_name_);
  }

 private:
  void validate() const {
    if (y_.size() == 0) fail(ErrorKind::validation, "dataset has no rows");
    if (d_.size() != y_.size() || x_.rows() != y_.size())
      fail(ErrorKind::validation, "length(y), length(d) and rows(x) differ");
    if (static_cast<std::size_t>(x_.cols()) != names_.size())
      fail(ErrorKind::validation, "columns(x) != number of covariate names");
    for (Eigen::Index i = 0; i < d_.size(); ++i)
      if (d_(i) != 0.0 && d_(i) != 1.0)
        fail(ErrorKind::validation,
             "treatment value at row " + std::to_string(i + 1) + " is not 0/1");
    std::unordered_set<std::string> seen;
    for (const auto& nm : names_)
      if (!seen.insert(nm).second) fail(ErrorKind::schema, "duplicate covariate name '" + nm + "'");
    if (!y_.allFinite() || !x_.allFinite())
      fail(ErrorKind::data, "dataset contains non-finite values");
  }

  Vector y_, d_;
  Matrix x_;
  std::vector<std::string> names_;
  std::string outcome_name_ = "y";
  std::string treatment_name_ = "d";
  std::size_t rows_dropped_ = 0;
};

// eta = (beta-block, alpha-block). The sparsity pattern is read off alpha
// itself, so mask and storage cannot disagree.
struct ParamVector {
  double beta0_y = 0.0;  // outcome intercept
  double beta_d = 0.0;   // treatment coefficient in the outcome model
  double beta0_d = 0.0;  // treatment-model intercept
  Vector alpha;          // shared covariate coefficients
  double sigma2 = 1.0;   // outcome noise variance

  static ParamVector zeros(std::size_t r2) {
    ParamVector p;
    p.alpha = Vector::Zero(static_cast<Eigen::Index>(r2));
    return p;
  }

  IndexSet support() const {
    IndexSet s;
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
      if (alpha(j) != 0.0) s.push_back(static_cast<std::size_t>(j));
    return s;
  }
};

enum class PenaltyFamily { lasso, scad };

inline const char* to_string(PenaltyFamily f) {
  return f == PenaltyFamily::lasso ? "lasso" : "scad";
}

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::scad;
  double lambda = 0.0;
  double scad_a = 3.7;
  Vector nu;  // per-coordinate boosting weights

  void validate(std::size_t r2) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      fail(ErrorKind::parameter, "lambda must be finite and >= 0");
    if (family == PenaltyFamily::scad && !(scad_a > 2.0))
      fail(ErrorKind::parameter, "SCAD shape a must exceed 2");
    if (static_cast<std::size_t>(nu.size()) != r2)
      fail(ErrorKind::parameter, "nu has length " + std::to_string(nu.size()) +
                                     ", expected " + std::to_string(r2));
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      if (!std::isfinite(nu(j)) || nu(j) < 0.0)
        fail(ErrorKind::parameter, "nu must be finite and >= 0");
  }
};

struct GcvPoint {
  double lambda = 0.0;
  double gcv = 0.0;
  double dof = 0.0;
  bool degenerate = false;
  std::size_t support_size = 0;
};

struct SelectionResult {
  ParamVector eta_hat;
  IndexSet selected;
  double lambda_hat = 0.0;
  std::vector<GcvPoint> gcv_path;
  bool converged = false;
  int iterations = 0;
  Vector nu;  // weights used while fitting (all ones for comparators)
};

struct AteEstimate {
  double theta_hat = 0.0;
  double sd_tb = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n_boot = 0;          // replicates that produced an estimate
  int n_boot_failed = 0;   // replicates skipped (single arm or solver failure)
  Vector gamma_hat;        // intercept then selected-covariate coefficients
  IndexSet selected;
  double lambda_hat = 0.0;
  std::vector<double> boot_thetas;
};

// Centering/scaling record; coefficients fitted on the standardized scale map
// back through it.
struct Scaling {
  Vector mean;
  Vector sd;

  // alpha on the original scale
  Vector unscale_alpha(const Vector& alpha_std) const {
    return alpha_std.cwiseQuotient(sd);
  }
  // Intercept shift when moving from standardized to original covariates.
  double intercept_shift(const Vector& alpha_std) const {
    return -(alpha_std.cwiseQuotient(sd)).dot(mean);
  }
};

inline std::pair<Dataset, Scaling> standardize(const Dataset& ds) {
  const auto n = static_cast<double>(ds.n());
  if (ds.n() < 2) fail(ErrorKind::degenerate, "standardize needs at least two rows");
  Scaling sc;
  sc.mean = ds.x().colwise().mean().transpose();
  Matrix xs = ds.x().rowwise() - sc.mean.transpose();
  sc.sd = (xs.colwise().squaredNorm() / (n - 1.0)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < sc.sd.size(); ++j) {
    const double scale = std::max(1.0, std::abs(sc.mean(j)));
    if (!(sc.sd(j) > 1e-12 * scale))
      fail(ErrorKind::degenerate,
           "covariate '" + ds.names()[static_cast<std::size_t>(j)] + "' is constant");
  }
  xs.array().rowwise() /= sc.sd.transpose().array();
  Dataset out(ds.y(), ds.d(), std::move(xs), ds.names(), ds.outcome_name(),
              ds.treatment_name());
  out.with_rows_dropped(ds.rows_dropped());
  return {std::move(out), std::move(sc)};
}

inline Dataset unstandardize(const Dataset& ds, const Scaling& sc) {
  Matrix x = ds.x();
  x.array().rowwise() *= sc.sd.transpose().array();
  x.rowwise() += sc.mean.transpose();
  Dataset out(ds.y(), ds.d(), std::move(x), ds.names(), ds.outcome_name(),
              ds.treatment_name());
  out.with_rows_dropped(ds.rows_dropped());
  return out;
}

inline IndexSet nonzero_support(const Vector& v) {
  IndexSet s;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v(j) != 0.0) s.push_back(static_cast<std::size_t>(j));
  return s;
}

}  // namespace confsel

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "confsel/ate.hpp"
#include "confsel/data.hpp"
#include "confsel/error.hpp"
#include "confsel/parallel.hpp"
#include "confsel/selector.hpp"

namespace confsel {

// ---------------------------------------------------------------------------
// Scenarios. Covariate indices are 0-based in code and 1-based (x1, x2, ...)
// in files and reports.

struct Term {
  std::size_t index = 0;
  double weight = 0.0;
};

// sum_over_abs : coef * (sum_k w_k x_k) / (1 + sum_k v_k |x_k|)
// exp_ratio    : coef * exp(sum_k w_k x_k) / exp(sum_k v_k |x_k|)
struct NonlinearTerm {
  enum class Kind { sum_over_abs, exp_ratio };
  Kind kind = Kind::sum_over_abs;
  double coef = 1.0;
  std::vector<Term> num;
  std::vector<Term> den;

  double eval(const double* x) const {
    double a = 0.0, b = 0.0;
    for (const auto& t : num) a += t.weight * x[t.index];
    for (const auto& t : den) b += t.weight * std::abs(x[t.index]);
    return kind == Kind::sum_over_abs ? coef * a / (1.0 + b) : coef * std::exp(a) / std::exp(b);
  }

  bool operator==(const NonlinearTerm& o) const {
    auto same = [](const std::vector<Term>& p, const std::vector<Term>& q) {
      if (p.size() != q.size()) return false;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i].index != q[i].index || p[i].weight != q[i].weight) return false;
      return true;
    };
    return kind == o.kind && coef == o.coef && same(num, o.num) && same(den, o.den);
  }
};

struct Scenario {
  std::string name;
  std::size_t n = 300;
  std::size_t r2 = 550;
  double x_mean = 1.0;
  double x_spread = 2.0;  // variance, or SD when spread_is_sd
  std::map<std::size_t, double> d_linear;
  std::vector<NonlinearTerm> d_nonlinear;
  std::map<std::size_t, double> y_linear;
  std::vector<NonlinearTerm> y_nonlinear;
  double y_spread = 2.0;  // variance, or SD when spread_is_sd
  double theta_true = 1.0;
  bool spread_is_sd = false;
  IndexSet true_support;

  double x_sd() const { return spread_is_sd ? x_spread : std::sqrt(x_spread); }
  double y_sd() const { return spread_is_sd ? y_spread : std::sqrt(y_spread); }

  static std::set<std::size_t> indices(const std::map<std::size_t, double>& lin,
                                       const std::vector<NonlinearTerm>& nl) {
    std::set<std::size_t> s;
    for (const auto& [j, c] : lin)
      if (c != 0.0) s.insert(j);
    for (const auto& t : nl) {
      for (const auto& q : t.num) s.insert(q.index);
      for (const auto& q : t.den) s.insert(q.index);
    }
    return s;
  }
  std::set<std::size_t> treatment_indices() const { return indices(d_linear, d_nonlinear); }
  std::set<std::size_t> outcome_indices() const { return indices(y_linear, y_nonlinear); }

  void validate() const {
    if (n < 4) fail(ErrorKind::validation, "scenario n must be >= 4");
    if (r2 < 1) fail(ErrorKind::validation, "scenario r2 must be >= 1");
    if (!(x_spread > 0.0) || !(y_spread > 0.0))
      fail(ErrorKind::validation, "scenario spreads must be > 0");
    auto check = [&](const std::set<std::size_t>& s) {
      if (!s.empty() && *s.rbegin() >= r2)
        fail(ErrorKind::validation, "scenario references x" + std::to_string(*s.rbegin() + 1) +
                                        " beyond r2=" + std::to_string(r2));
    };
    check(treatment_indices());
    check(outcome_indices());
    // confounders are a subset of the outcome predictors
    const auto y = outcome_indices();
    const IndexSet expect(y.begin(), y.end());
    if (true_support != expect)
      fail(ErrorKind::validation, "true_support must equal the outcome-model covariates");
  }

  bool operator==(const Scenario& o) const = default;
};

inline bool operator==(const Term& a, const Term& b) { return a.index == b.index && a.weight == b.weight; }

inline Scenario finalize(Scenario s) {
  const auto y = s.outcome_indices();
  s.true_support.assign(y.begin(), y.end());
  return s;
}

// Scenario 1: confounder x1, outcome predictors x2-x4, instruments x6-x8.
inline Scenario scenario_s1(std::size_t n = 300, std::size_t r2 = 550) {
  Scenario s;
  s.name = "s1";
  s.n = n;
  s.r2 = r2;
  s.x_mean = 1.0;
  s.x_spread = 2.0;
  s.d_linear = {{0, 0.5}, {5, 0.5}, {6, -0.5}, {7, -0.5}};
  s.y_linear = {{0, 2.0}, {1, 0.5}, {2, 5.0}, {3, 5.0}};
  s.y_spread = 2.0;
  s.theta_true = 1.0;
  return finalize(s);
}

// Scenario 2: adds x2 as a weak confounder.
inline Scenario scenario_s2(std::size_t n = 300, std::size_t r2 = 550) {
  Scenario s = scenario_s1(n, r2);
  s.name = "s2";
  s.d_linear = {{0, 0.5}, {1, 1.0}, {5, 0.5}, {6, -0.5}, {7, -0.5}};
  s.y_linear = {{0, 2.0}, {1, 0.2}, {2, 5.0}, {3, 5.0}};
  return finalize(s);
}

// Treatment model nonlinear in x8..x10 (linear working model misspecified).
inline Scenario scenario_appf1(std::size_t n = 500, std::size_t r2 = 550) {
  Scenario s;
  s.name = "appF1";
  s.n = n;
  s.r2 = r2;
  s.x_mean = 0.0;
  s.x_spread = 2.0;
  s.d_linear = {{0, 0.1}, {1, 1.0}};
  NonlinearTerm t;
  t.kind = NonlinearTerm::Kind::sum_over_abs;
  t.coef = 0.7;
  t.num = {{9, 1.0}, {8, 1.0}};
  t.den = {{7, 1.0}};
  s.d_nonlinear = {t};
  s.y_linear = {{0, 0.5}, {1, 0.1}, {2, 2.0}, {3, 2.0}};
  s.y_spread = 2.0;
  return finalize(s);
}

// Outcome model nonlinear in x1..x4 (linear working model misspecified).
inline Scenario scenario_appf2(std::size_t n = 500, std::size_t r2 = 550) {
  Scenario s;
  s.name = "appF2";
  s.n = n;
  s.r2 = r2;
  s.x_mean = 0.0;
  s.x_spread = 2.0;
  s.d_linear = {{0, 1.0}, {1, -1.0}, {7, -0.1}, {8, -1.0}, {9, 1.0}};
  s.y_linear = {{7, 2.0}};
  NonlinearTerm t;
  t.kind = NonlinearTerm::Kind::exp_ratio;
  t.coef = 2.0;
  t.num = {{2, 0.2}, {3, 0.2}};
  t.den = {{0, 0.2}, {1, 0.2}};
  s.y_nonlinear = {t};
  s.y_spread = 2.0;
  return finalize(s);
}

inline Scenario named_scenario(const std::string& name, std::size_t n, std::size_t r2) {
  if (name == "s1") return scenario_s1(n, r2);
  if (name == "s2") return scenario_s2(n, r2);
  if (name == "appF1") return scenario_appf1(n, r2);
  if (name == "appF2") return scenario_appf2(n, r2);
  fail(ErrorKind::validation, "unknown scenario '" + name + "' (expected s1, s2, appF1, appF2)");
}

inline double linear_part(const std::map<std::size_t, double>& lin, const std::vector<NonlinearTerm>& nl,
                          const double* x) {
  double v = 0.0;
  for (const auto& [j, c] : lin) v += c * x[j];
  for (const auto& t : nl) v += t.eval(x);
  return v;
}

// Treatment logit and outcome mean without the treatment effect.
inline double scenario_logit(const Scenario& s, const double* x) {
  return linear_part(s.d_linear, s.d_nonlinear, x);
}
inline double scenario_mean(const Scenario& s, const double* x) {
  return linear_part(s.y_linear, s.y_nonlinear, x);
}

// Draws one dataset; a draw with a single treatment arm is regenerated with
// the next sub-seed.
inline Dataset generate(const Scenario& s, std::uint64_t seed, int* regenerations = nullptr) {
  s.validate();
  const auto n = static_cast<Eigen::Index>(s.n);
  const auto p = static_cast<Eigen::Index>(s.r2);
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, 0x5CE4, attempt));
    std::normal_distribution<double> nx(s.x_mean, s.x_sd());
    std::normal_distribution<double> ne(0.0, s.y_sd());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // row-major fill so row i depends only on the stream position
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(n, p);
    Vector d(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = nx(rng);
      const double* row = x.row(i).data();
      d(i) = unif(rng) < glm::expit(scenario_logit(s, row)) ? 1.0 : 0.0;
      y(i) = s.theta_true * d(i) + scenario_mean(s, row) + ne(rng);
    }
    const double nt = d.sum();
    if (nt < 0.5 || nt > static_cast<double>(n) - 0.5) continue;
    if (regenerations) *regenerations = static_cast<int>(attempt);
    return Dataset(std::move(y), std::move(d), Matrix(x), Dataset::default_names(s.r2));
  }
  fail(ErrorKind::degenerate, "scenario keeps producing a single treatment arm");
}

// ---------------------------------------------------------------------------
// Replication engine.

enum class Method { scad, lasso, yfit, psfit, oracle };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::scad: return "SCAD";
    case Method::lasso: return "LASSO";
    case Method::yfit: return "Y-fit";
    case Method::psfit: return "PS-fit";
    case Method::oracle: return "Oracle";
  }
  return "?";
}

inline Method parse_method(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  if (s == "scad") return Method::scad;
  if (s == "lasso") return Method::lasso;
  if (s == "yfit") return Method::yfit;
  if (s == "psfit") return Method::psfit;
  if (s == "oracle") return Method::oracle;
  fail(ErrorKind::validation, "unknown method '" + s + "'");
}

struct RepResult {
  Method method = Method::scad;
  bool failed = false;
  std::string failure;
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  double sd_tb = std::numeric_limits<double>::quiet_NaN();  // NaN when not bootstrapped
  IndexSet selected;
  int correct_zeros = 0;
  int incorrect_zeros = 0;
};

struct SummaryRow {
  std::string scenario;
  std::size_t n = 0;
  Method method = Method::scad;
  double bias = 0.0;
  double sd_emp = 0.0;
  double sd_tb_mean = std::numeric_limits<double>::quiet_NaN();
  double mse = 0.0;
  double correct_mean = 0.0;
  double incorrect_mean = 0.0;
  int n_reps = 0;
  int n_failed = 0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::uint64_t seed = 0;
  int r2 = 0;
  int support_size = 0;

  const SummaryRow& row(Method m) const {
    for (const auto& r : rows)
      if (r.method == m) return r;
    fail(ErrorKind::validation, std::string("no summary row for ") + to_string(m));
  }
};

struct StudyConfig {
  std::vector<Method> methods = {Method::scad, Method::lasso, Method::yfit, Method::psfit, Method::oracle};
  int n_reps = 100;
  int B_boot = 100;
  std::uint64_t seed = 20240101;
  int workers = 1;
  OptimizerConfig optimizer;
  // PS-fit as a propensity model on exactly the true treatment covariates.
  bool oracle_psfit = false;
  // Which methods get the thresholded bootstrap when B_boot > 0.
  bool bootstrap_lasso = true;
  double max_failure_fraction = 0.05;
  // Comparators such as PS-fit often select enough covariates to separate
  // the treatment arms; those propensities are refitted with a small ridge.
  DrOptions dr = [] {
    DrOptions o;
    o.separation_ridge = 1e-2;
    return o;
  }();
};

struct StudyResult {
  SummaryTable table;
  std::vector<std::vector<RepResult>> reps;  // [replicate][method]
};

inline void count_zeros(const Scenario& s, const IndexSet& selected, RepResult& r) {
  std::vector<char> sel(s.r2, 0);
  for (auto j : selected) sel[j] = 1;
  std::vector<char> truth(s.r2, 0);
  for (auto j : s.true_support) truth[j] = 1;
  r.correct_zeros = r.incorrect_zeros = 0;
  for (std::size_t j = 0; j < s.r2; ++j) {
    if (sel[j]) continue;
    if (truth[j]) ++r.incorrect_zeros;
    else ++r.correct_zeros;
  }
}

inline std::vector<RepResult> run_replicate(const Scenario& s, const StudyConfig& cfg, std::size_t rep) {
  const Dataset raw = generate(s, derive_seed(cfg.seed, 1, rep));
  const Dataset ds = standardize(raw).first;
  std::vector<RepResult> out;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method m = cfg.methods[mi];
    RepResult r;
    r.method = m;
    try {
      IndexSet selected;
      std::optional<SelectionResult> sel;
      PenaltyFamily fam = PenaltyFamily::scad;
      switch (m) {
        case Method::scad:
        case Method::lasso:
          fam = m == Method::scad ? PenaltyFamily::scad : PenaltyFamily::lasso;
          sel = select(ds, fam, cfg.optimizer);
          selected = sel->selected;
          break;
        case Method::yfit:
          selected = fit_outcome_only(ds, PenaltyFamily::scad, cfg.optimizer).selected;
          break;
        case Method::psfit:
          if (cfg.oracle_psfit) {
            const auto t = s.treatment_indices();
            selected.assign(t.begin(), t.end());
          } else {
            selected = fit_treatment_only(ds, PenaltyFamily::scad, cfg.optimizer).selected;
          }
          break;
        case Method::oracle:
          selected = s.true_support;
          break;
      }
      const DrFit fit = dr_estimate(ds, selected, cfg.dr);
      r.theta_hat = fit.theta;
      r.selected = selected;
      count_zeros(s, selected, r);
      const bool boot = cfg.B_boot >= 2 && sel &&
                        (m == Method::scad || (m == Method::lasso && cfg.bootstrap_lasso));
      if (boot) {
        BootstrapOptions bo;
        bo.B = cfg.B_boot;
        bo.seed = derive_seed(cfg.seed, 2 + mi, rep);
        bo.workers = 1;
        bo.dr = cfg.dr;
        r.sd_tb = bootstrap_from_selection(ds, *sel, fam, cfg.optimizer, bo).sd_tb;
      }
    } catch (const Error& e) {
      r.failed = true;
      r.failure = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline SummaryTable summarize(const Scenario& s, const StudyConfig& cfg,
                              const std::vector<std::vector<RepResult>>& reps) {
  SummaryTable t;
  t.seed = cfg.seed;
  t.r2 = static_cast<int>(s.r2);
  t.support_size = static_cast<int>(s.true_support.size());
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    SummaryRow row;
    row.scenario = s.name;
    row.n = s.n;
    row.method = cfg.methods[mi];
    std::vector<double> th, sdtb;
    double corr = 0.0, inc = 0.0;
    for (const auto& rep : reps) {
      const auto& r = rep[mi];
      if (r.failed) {
        ++row.n_failed;
        continue;
      }
      th.push_back(r.theta_hat);
      if (std::isfinite(r.sd_tb)) sdtb.push_back(r.sd_tb);
      corr += r.correct_zeros;
      inc += r.incorrect_zeros;
    }
    row.n_reps = static_cast<int>(th.size());
    if (!th.empty()) {
      double mean = 0.0, sq = 0.0;
      for (double v : th) {
        mean += v;
        sq += (v - s.theta_true) * (v - s.theta_true);
      }
      mean /= static_cast<double>(th.size());
      row.bias = mean - s.theta_true;
      row.sd_emp = sample_sd(th);
      row.mse = sq / static_cast<double>(th.size());
      row.correct_mean = corr / static_cast<double>(th.size());
      row.incorrect_mean = inc / static_cast<double>(th.size());
    }
    if (!sdtb.empty()) {
      double m = 0.0;
      for (double v : sdtb) m += v;
      row.sd_tb_mean = m / static_cast<double>(sdtb.size());
    }
    t.rows.push_back(row);
  }
  return t;
}

inline StudyResult run_study(const Scenario& s, const StudyConfig& cfg) {
  s.validate();
  if (cfg.n_reps < 2) fail(ErrorKind::validation, "run_study needs n_reps >= 2");
  StudyResult res;
  res.reps.resize(static_cast<std::size_t>(cfg.n_reps));
  parallel_for(res.reps.size(), cfg.workers,
               [&](std::size_t r) { res.reps[r] = run_replicate(s, cfg, r); });
  res.table = summarize(s, cfg, res.reps);
  for (const auto& row : res.table.rows) {
    const double frac = static_cast<double>(row.n_failed) / static_cast<double>(cfg.n_reps);
    if (frac > cfg.max_failure_fraction)
      fail(ErrorKind::study, std::string(to_string(row.method)) + ": " + std::to_string(row.n_failed) +
                                 " of " + std::to_string(cfg.n_reps) + " replicates failed");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Report emission.

inline std::string fmt_fixed(double v, int digits = 6) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::string summary_csv(const SummaryTable& t) {
  std::string out = "scenario,n,method,bias,sd_emp,sd_tb,mse,correct,incorrect,n_reps,n_failed,seed\n";
  for (const auto& r : t.rows) {
    out += r.scenario + "," + std::to_string(r.n) + "," + to_string(r.method) + "," + fmt_fixed(r.bias) + "," +
           fmt_fixed(r.sd_emp) + "," + fmt_fixed(r.sd_tb_mean) + "," + fmt_fixed(r.mse) + "," +
           fmt_fixed(r.correct_mean, 3) + "," + fmt_fixed(r.incorrect_mean, 3) + "," +
           std::to_string(r.n_reps) + "," + std::to_string(r.n_failed) + "," + std::to_string(t.seed) + "\n";
  }
  return out;
}

inline std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

inline std::string markdown_table(const std::vector<std::string>& header,
                                  const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    w[j] = std::max<std::size_t>(3, header[j].size());
    for (const auto& row : body) w[j] = std::max(w[j], row[j].size());
  }
  std::string out = "|";
  for (std::size_t j = 0; j < header.size(); ++j) out += " " + pad(header[j], w[j]) + " |";
  out += "\n|";
  for (std::size_t j = 0; j < header.size(); ++j) out += std::string(w[j] + 2, '-') + "|";
  out += "\n";
  for (const auto& row : body) {
    out += "|";
    for (std::size_t j = 0; j < header.size(); ++j) out += " " + pad(row[j], w[j]) + " |";
    out += "\n";
  }
  return out;
}

inline std::string fmt3(double v) { return std::isfinite(v) ? fmt_fixed(v, 3) : "--"; }

inline std::string summary_markdown(const SummaryTable& t) {
  std::string out;
  if (t.rows.empty()) return out;
  const auto& first = t.rows.front();
  out += "## Scenario " + first.scenario + ", n = " + std::to_string(first.n) + " (seed " +
         std::to_string(t.seed) + ")\n\n";
  std::vector<std::vector<std::string>> body;
  for (const auto& r : t.rows)
    body.push_back({to_string(r.method), fmt3(r.bias), fmt3(r.sd_emp), fmt3(r.sd_tb_mean), fmt3(r.mse),
                    std::to_string(r.n_reps), std::to_string(r.n_failed)});
  out += markdown_table({"Method", "Bias", "S.D.emp", "S.D.tb", "MSE", "reps", "failed"}, body);
  out += "\nZero counts (target support of " + std::to_string(t.support_size) + " of " +
         std::to_string(t.r2) + " covariates)\n\n";
  body.clear();
  for (const auto& r : t.rows)
    body.push_back({to_string(r.method), fmt_fixed(r.correct_mean, 2), fmt_fixed(r.incorrect_mean, 2)});
  out += markdown_table({"Method", "Correct", "Incorrect"}, body);
  return out;
}

inline std::string replicates_csv(const StudyConfig& cfg, const StudyResult& res) {
  std::string out = "replicate,method,failed,theta_hat,sd_tb,n_selected,correct,incorrect\n";
  for (std::size_t r = 0; r < res.reps.size(); ++r)
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const auto& x = res.reps[r][mi];
      out += std::to_string(r) + "," + to_string(x.method) + "," + (x.failed ? "1" : "0") + "," +
             fmt_fixed(x.theta_hat, 10) + "," + fmt_fixed(x.sd_tb, 10) + "," + std::to_string(x.selected.size()) +
             "," + std::to_string(x.correct_zeros) + "," + std::to_string(x.incorrect_zeros) + "\n";
    }
  return out;
}

// ---------------------------------------------------------------------------
// One-covariate experiment: outcome coefficient 1/sqrt(n), treatment
// coefficient 0.3, x ~ N(0, 1), outcome noise variance 2.

struct NoShrinkConfig {
  double treatment_coef = 0.3;
  bool outcome_root_n = true;      // outcome coefficient 1/sqrt(n)
  double outcome_coef = 0.0;       // used when outcome_root_n is false
  double y_var = 2.0;
  double theta = 1.0;
  int reps = 20;
};

struct NoShrinkPoint {
  std::size_t n = 0;
  double alpha_hat = 0.0;  // mean over replicates
  double alpha_sd = 0.0;
  double outcome_coef = 0.0;
  int reps = 0;
};

inline Dataset no_shrink_data(std::size_t n, const NoShrinkConfig& fc, std::uint64_t seed) {
  const double cy = fc.outcome_root_n ? 1.0 / std::sqrt(static_cast<double>(n)) : fc.outcome_coef;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, 0xF162, attempt));
    std::normal_distribution<double> nx(0.0, 1.0), ne(0.0, std::sqrt(fc.y_var));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto nn = static_cast<Eigen::Index>(n);
    Vector y(nn), d(nn);
    Matrix x(nn, 1);
    for (Eigen::Index i = 0; i < nn; ++i) {
      x(i, 0) = nx(rng);
      d(i) = unif(rng) < glm::expit(fc.treatment_coef * x(i, 0)) ? 1.0 : 0.0;
      y(i) = fc.theta * d(i) + cy * x(i, 0) + ne(rng);
    }
    const double nt = d.sum();
    if (nt > 0.5 && nt < static_cast<double>(n) - 0.5)
      return Dataset(std::move(y), std::move(d), std::move(x), {"x1"});
  }
}

// Unweighted, unpenalized joint-likelihood alpha_hat per n.
inline std::vector<NoShrinkPoint> no_shrink_experiment(const std::vector<std::size_t>& n_grid, std::uint64_t seed,
                                                    const NoShrinkConfig& fc = {}, int workers = 1) {
  std::vector<NoShrinkPoint> out(n_grid.size());
  const OptimizerConfig cfg;
  const PenaltyFn none(PenaltyFamily::lasso, 0.0);
  const Vector nu = Vector::Ones(1);
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::vector<double> a(static_cast<std::size_t>(fc.reps));
    parallel_for(a.size(), workers, [&](std::size_t r) {
      const Dataset ds = no_shrink_data(n_grid[g], fc, derive_seed(seed, n_grid[g], r));
      a[r] = fit_penalized_full(ds, ModelKind::joint, none, nu, cfg).eta.alpha(0);
    });
    NoShrinkPoint p;
    p.n = n_grid[g];
    p.reps = fc.reps;
    for (double v : a) p.alpha_hat += v;
    p.alpha_hat /= static_cast<double>(a.size());
    p.alpha_sd = sample_sd(a);
    p.outcome_coef = fc.outcome_root_n ? 1.0 / std::sqrt(static_cast<double>(p.n)) : fc.outcome_coef;
    out[g] = p;
  }
  return out;
}

// Boosting weights + GCV-tuned penalized joint fit; alpha_hat per replicate.
inline std::vector<double> no_shrink_boosted(std::size_t n, int reps, std::uint64_t seed,
                                           PenaltyFamily family = PenaltyFamily::scad,
                                           const NoShrinkConfig& fc = {}, int workers = 1) {
  std::vector<double> a(static_cast<std::size_t>(reps));
  const OptimizerConfig cfg;
  parallel_for(a.size(), workers, [&](std::size_t r) {
    const Dataset ds = standardize(no_shrink_data(n, fc, derive_seed(seed, 0xB0, r))).first;
    a[r] = select(ds, family, cfg).eta_hat.alpha(0);
  });
  return a;
}

}  // namespace confsel

// confsel: confounder selection and treatment-effect estimation from the
// command line. Subcommands: select, estimate, simulate, figure2,
// check-penalty.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "confsel/confsel.hpp"
#include "confsel/pipeline.hpp"
#include "confsel/scenario_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace confsel;

namespace {

constexpr int schema_version = 1;
constexpr std::uint64_t default_seed = 20240101;

struct Common {
  std::string input, outcome = "y", treatment = "d";
  std::string penalty = "scad";
  double scad_a = 3.7;
  std::string lambda_grid;
  std::string treatment_labels;
  int boot = 100;
  int reps = 100;
  std::uint64_t seed = default_seed;
  int workers = 0;
  std::string out;
  std::string format;
  bool noise_sd = false;
  bool percentile_ci = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = csv::trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

PenaltyFamily parse_family(const std::string& s) {
  if (s == "scad") return PenaltyFamily::scad;
  if (s == "lasso") return PenaltyFamily::lasso;
  fail(ErrorKind::validation, "--penalty must be scad or lasso");
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> g;
  for (const auto& tok : split(s, ',')) {
    const auto v = csv::to_double(tok);
    if (!v) fail(ErrorKind::validation, "bad --lambda-grid value '" + tok + "'");
    g.push_back(*v);
  }
  std::sort(g.begin(), g.end(), std::greater<>());
  return g;
}

OptimizerConfig optimizer_from(const Common& c) {
  OptimizerConfig cfg;
  cfg.scad_a = c.scad_a;
  if (!c.lambda_grid.empty()) cfg.lambda_grid = parse_grid(c.lambda_grid);
  cfg.validate();
  return cfg;
}

std::vector<std::string> formats(const Common& c, const std::string& fallback) {
  auto f = split(c.format.empty() ? fallback : c.format, ',');
  for (const auto& x : f)
    if (x != "csv" && x != "json" && x != "markdown")
      fail(ErrorKind::validation, "--format entries must be csv, json or markdown");
  return f;
}

bool wants(const std::vector<std::string>& f, const std::string& what) {
  return std::find(f.begin(), f.end(), what) != f.end();
}

// Writes `text` to DIR/name, or to stdout when no --out was given.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  fs::create_directories(c.out);
  const fs::path p = fs::path(c.out) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::validation, "cannot write '" + p.string() + "'");
  f << text;
}

Dataset load_input(const Common& c) {
  if (c.input.empty()) fail(ErrorKind::validation, "--input is required");
  LoadOptions lo;
  if (!c.treatment_labels.empty()) {
    const auto lab = split(c.treatment_labels, ',');
    if (lab.size() != 2) fail(ErrorKind::validation, "--treatment-labels takes 'control,treated'");
    lo.treatment_labels = std::make_pair(lab[0], lab[1]);
  }
  Dataset ds = load_csv(c.input, c.outcome, c.treatment, lo);
  if (ds.rows_dropped() > 0)
    std::cerr << "warning: " << ds.rows_dropped() << " row(s) with missing values dropped\n";
  return ds;
}

std::string num(double v) { return std::isfinite(v) ? csv::format_double(v) : "NA"; }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json gcv_json(const SelectionResult& s) {
  auto a = json::array();
  for (const auto& g : s.gcv_path)
    a.push_back({{"lambda", g.lambda},
                 {"gcv", std::isfinite(g.gcv) ? json(g.gcv) : json(nullptr)},
                 {"dof", g.dof},
                 {"support_size", g.support_size},
                 {"degenerate", g.degenerate}});
  return a;
}

std::string gcv_csv(const SelectionResult& s) {
  std::string out = "lambda,gcv,dof,support_size,degenerate\n";
  for (const auto& g : s.gcv_path)
    out += num(g.lambda) + "," + num(g.gcv) + "," + num(g.dof) + "," + std::to_string(g.support_size) + "," +
           (g.degenerate ? "1" : "0") + "\n";
  return out;
}

json selection_json(const Dataset& raw, const SelectionReport& r, const Common& c) {
  json j;
  j["schema_version"] = schema_version;
  j["seed"] = c.seed;
  j["penalty"] = c.penalty;
  j["n"] = raw.n();
  j["r2"] = raw.r2();
  j["rows_dropped"] = raw.rows_dropped();
  j["lambda_hat"] = r.fit.lambda_hat;
  j["converged"] = r.fit.converged;
  auto sel = json::array();
  for (std::size_t k = 0; k < r.fit.selected.size(); ++k) {
    const auto idx = r.fit.selected[k];
    sel.push_back({{"name", r.selected_names[k]}, {"coefficient", r.alpha(static_cast<Eigen::Index>(idx))}});
  }
  j["selected"] = sel;
  j["beta0_y"] = r.beta0_y;
  j["beta_d"] = r.beta_d;
  j["beta0_d"] = r.beta0_d;
  j["sigma2"] = r.sigma2;
  j["gcv_path"] = gcv_json(r.fit);
  j["warnings"] = r.warnings;
  return j;
}

std::string selection_markdown(const SelectionReport& r, const Common& c) {
  std::string out = "## Selected covariates (" + c.penalty + ", lambda " + short_num(r.fit.lambda_hat) + ", seed " +
                    std::to_string(c.seed) + ")\n\n";
  std::vector<std::vector<std::string>> body;
  for (std::size_t k = 0; k < r.fit.selected.size(); ++k)
    body.push_back({r.selected_names[k], fmt_fixed(r.alpha(static_cast<Eigen::Index>(r.fit.selected[k])), 4)});
  if (body.empty()) out += "No covariate selected.\n";
  else out += markdown_table({"Variable", "Coefficient"}, body);
  return out;
}

std::string selection_csv(const SelectionReport& r) {
  std::string out = "name,coefficient\n";
  for (std::size_t k = 0; k < r.fit.selected.size(); ++k)
    out += csv::quote(r.selected_names[k]) + "," + num(r.alpha(static_cast<Eigen::Index>(r.fit.selected[k]))) + "\n";
  return out;
}

PipelineOptions pipeline_from(const Common& c) {
  PipelineOptions p;
  p.family = parse_family(c.penalty);
  p.optimizer = optimizer_from(c);
  p.B = c.boot;
  p.seed = c.seed;
  p.workers = resolve_workers(c.workers);
  p.percentile_ci = c.percentile_ci;
  return p;
}

void warn_all(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

int cmd_select(const Common& c) {
  const Dataset raw = load_input(c);
  const auto f = formats(c, c.out.empty() ? "markdown" : "markdown,csv,json");
  const SelectionReport r = run_selection(raw, pipeline_from(c));
  warn_all(r.warnings);
  if (wants(f, "json")) emit(c, "selection.json", selection_json(raw, r, c).dump(2) + "\n");
  if (wants(f, "markdown")) emit(c, "selection.md", selection_markdown(r, c));
  if (wants(f, "csv")) {
    emit(c, "selection.csv", selection_csv(r));
    emit(c, "gcv_path.csv", gcv_csv(r.fit));
  }
  return 0;
}

int cmd_estimate(const Common& c) {
  const Dataset raw = load_input(c);
  const auto f = formats(c, c.out.empty() ? "markdown" : "markdown,csv,json");
  const EstimateReport r = run_estimate(raw, pipeline_from(c));
  warn_all(r.selection.warnings);
  const auto& a = r.ate;
  if (wants(f, "json")) {
    json j = selection_json(raw, r.selection, c);
    j["theta_hat"] = a.theta_hat;
    j["sd_tb"] = a.sd_tb;
    j["ci"] = {a.ci_lo, a.ci_hi};
    j["ci_method"] = c.percentile_ci ? "percentile" : "normal";
    j["boot"] = c.boot;
    j["boot_ok"] = a.n_boot;
    j["boot_failed"] = a.n_boot_failed;
    emit(c, "estimate.json", j.dump(2) + "\n");
  }
  if (wants(f, "markdown")) {
    std::string md = "## Treatment effect (seed " + std::to_string(c.seed) + ", B = " + std::to_string(c.boot) + ")\n\n";
    md += markdown_table({"ATE", "S.D.", "C.I.(95%)"},
                         {{fmt_fixed(a.theta_hat, 4), fmt_fixed(a.sd_tb, 4),
                           "(" + fmt_fixed(a.ci_lo, 4) + ", " + fmt_fixed(a.ci_hi, 4) + ")"}});
    if (a.n_boot_failed > 0) md += "\n" + std::to_string(a.n_boot_failed) + " bootstrap replicate(s) failed.\n";
    md += "\n" + selection_markdown(r.selection, c);
    emit(c, "estimate.md", md);
  }
  if (wants(f, "csv")) {
    emit(c, "estimate.csv",
         "theta_hat,sd_tb,ci_lo,ci_hi,boot_ok,boot_failed,seed\n" + num(a.theta_hat) + "," + num(a.sd_tb) + "," +
             num(a.ci_lo) + "," + num(a.ci_hi) + "," + std::to_string(a.n_boot) + "," +
             std::to_string(a.n_boot_failed) + "," + std::to_string(c.seed) + "\n");
    emit(c, "selection.csv", selection_csv(r.selection));
    emit(c, "gcv_path.csv", gcv_csv(r.selection.fit));
  }
  return 0;
}

struct SimFlags {
  std::string scenario;
  std::size_t n = 0, r2 = 0;
  std::string methods = "scad,lasso,yfit,psfit,oracle";
  bool oracle_psfit = false;
  std::string save_scenario;
};

int cmd_simulate(const Common& c, const SimFlags& sf) {
  Scenario s;
  if (sf.scenario.size() > 5 && sf.scenario.substr(sf.scenario.size() - 5) == ".json") {
    s = load_scenario(sf.scenario);
    if (sf.n) s.n = sf.n;
    if (sf.r2) s.r2 = sf.r2;
  } else {
    const std::size_t n0 = sf.n ? sf.n : (sf.scenario.rfind("appF", 0) == 0 ? 500 : 300);
    s = named_scenario(sf.scenario, n0, sf.r2 ? sf.r2 : 550);
  }
  s.spread_is_sd = s.spread_is_sd || c.noise_sd;
  s.validate();
  if (!sf.save_scenario.empty()) save_scenario(s, sf.save_scenario);

  StudyConfig cfg;
  cfg.methods.clear();
  for (const auto& m : split(sf.methods, ',')) cfg.methods.push_back(parse_method(m));
  if (cfg.methods.empty()) fail(ErrorKind::validation, "--methods is empty");
  cfg.n_reps = c.reps;
  cfg.B_boot = c.boot;
  cfg.seed = c.seed;
  cfg.workers = resolve_workers(c.workers);
  cfg.optimizer = optimizer_from(c);
  cfg.oracle_psfit = sf.oracle_psfit;
  if (c.reps < 10) std::cerr << "note: " << c.reps << " replicates; Monte Carlo error is wide\n";

  const StudyResult res = run_study(s, cfg);
  const auto f = formats(c, c.out.empty() ? "markdown" : "csv,markdown");
  if (wants(f, "csv")) {
    emit(c, "summary.csv", summary_csv(res.table));
    if (!c.out.empty()) emit(c, "replicates.csv", replicates_csv(cfg, res));
  }
  if (wants(f, "markdown")) emit(c, "summary.md", summary_markdown(res.table));
  if (wants(f, "json")) {
    json j;
    j["schema_version"] = schema_version;
    j["seed"] = c.seed;
    j["scenario"] = scenario_to_json(s);
    j["reps"] = c.reps;
    j["boot"] = c.boot;
    auto rows = json::array();
    for (const auto& r : res.table.rows)
      rows.push_back({{"method", to_string(r.method)},
                      {"bias", r.bias},
                      {"sd_emp", r.sd_emp},
                      {"sd_tb", std::isfinite(r.sd_tb_mean) ? json(r.sd_tb_mean) : json(nullptr)},
                      {"mse", r.mse},
                      {"correct", r.correct_mean},
                      {"incorrect", r.incorrect_mean},
                      {"n_reps", r.n_reps},
                      {"n_failed", r.n_failed}});
    j["summary"] = rows;
    emit(c, "summary.json", j.dump(2) + "\n");
  }
  return 0;
}

struct Fig2Flags {
  std::string n_grid = "100,1000,10000,100000";
  int reps = 20;
  std::size_t boosted_n = 10000;
  int boosted_reps = 50;
};

int cmd_figure2(const Common& c, const Fig2Flags& ff) {
  std::vector<std::size_t> grid;
  for (const auto& t : split(ff.n_grid, ',')) {
    const auto v = csv::to_double(t);
    if (!v || *v < 10) fail(ErrorKind::validation, "bad --n-grid value '" + t + "'");
    grid.push_back(static_cast<std::size_t>(*v));
  }
  NoShrinkConfig fc;
  fc.reps = ff.reps;
  const int w = resolve_workers(c.workers);
  const auto pts = no_shrink_experiment(grid, c.seed, fc, w);
  std::string out = "n,alpha_hat,alpha_sd,outcome_coef,reps,seed\n";
  for (const auto& p : pts)
    out += std::to_string(p.n) + "," + num(p.alpha_hat) + "," + num(p.alpha_sd) + "," + num(p.outcome_coef) + "," +
           std::to_string(p.reps) + "," + std::to_string(c.seed) + "\n";
  emit(c, "alpha_by_n.csv", out);
  if (ff.boosted_reps > 0) {
    const auto a = no_shrink_boosted(ff.boosted_n, ff.boosted_reps, c.seed, PenaltyFamily::scad, fc, w);
    const auto zeros = std::count(a.begin(), a.end(), 0.0);
    std::string b = "n,replicate,alpha_hat\n";
    for (std::size_t r = 0; r < a.size(); ++r) b += std::to_string(ff.boosted_n) + "," + std::to_string(r) + "," + num(a[r]) + "\n";
    emit(c, "no_shrink_boosted.csv", b);
    std::cerr << "boosted SCAD at n=" << ff.boosted_n << ": alpha_hat = 0 in " << zeros << " of " << a.size()
              << " replicates\n";
  }
  return 0;
}

struct PenFlags {
  double lambda = 1.0;
};

int cmd_check_penalty(const Common& c, const PenFlags& pf) {
  const PenaltyFn fn(parse_family(c.penalty), pf.lambda, c.scad_a);
  std::vector<double> grid;
  const double hi = std::max(10.0, 5.0 * c.scad_a * pf.lambda);
  for (int k = -500; k <= 500; ++k) grid.push_back(hi * k / 500.0);
  const PenaltyReport r = check_penalty_conditions(fn, grid);
  json j;
  j["schema_version"] = schema_version;
  j["penalty"] = c.penalty;
  j["lambda"] = pf.lambda;
  j["scad_a"] = c.scad_a;
  j["p1"] = r.p1;
  j["p2"] = r.p2;
  j["p3"] = r.p3;
  j["flat_tail"] = r.flat_tail;
  j["violations"] = r.violations;
  auto seq = [](const std::vector<std::pair<double, double>>& s) {
    auto a = json::array();
    for (const auto& [n, v] : s) a.push_back({{"n", n}, {"value", v}});
    return a;
  };
  j["p2_sequence"] = seq(r.p2_sequence);
  j["p3_sequence"] = seq(r.p3_sequence);
  const auto f = formats(c, "json");
  if (wants(f, "json")) emit(c, "penalty.json", j.dump(2) + "\n");
  if (wants(f, "markdown")) {
    auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
    emit(c, "penalty.md",
         markdown_table({"Penalty", "P1", "P2", "P3"}, {{c.penalty, yn(r.p1), yn(r.p2), yn(r.p3)}}));
  }
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool data_flags) {
  if (data_flags) {
    sub->add_option("--input", c.input, "CSV file with outcome, treatment and covariate columns");
    sub->add_option("--outcome", c.outcome, "Outcome column name")->capture_default_str();
    sub->add_option("--treatment", c.treatment, "Treatment column name")->capture_default_str();
    sub->add_option("--treatment-labels", c.treatment_labels, "Map two treatment labels to 0,1: 'control,treated'");
  }
  sub->add_option("--penalty", c.penalty, "scad or lasso")->capture_default_str();
  sub->add_option("--scad-a", c.scad_a, "SCAD shape parameter")->capture_default_str();
  sub->add_option("--lambda-grid", c.lambda_grid, "Comma-separated lambda values (overrides the default grid)");
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads (0: CONFSEL_THREADS or 1)");
  sub->add_option("--out", c.out, "Output directory (default: stdout)");
  sub->add_option("--format", c.format, "Comma-separated subset of csv,json,markdown");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confounder selection by penalized joint likelihood and doubly robust ATE estimation"};
  app.require_subcommand(1);
  Common c;
  SimFlags sf;
  Fig2Flags ff;
  PenFlags pf;

  auto* sel = app.add_subcommand("select", "Select confounders from a CSV file");
  add_common(sel, c, true);

  auto* est = app.add_subcommand("estimate", "Select, then estimate the ATE with a thresholded bootstrap");
  add_common(est, c, true);
  est->add_option("--boot", c.boot, "Bootstrap replicates")->capture_default_str();
  est->add_flag("--percentile-ci", c.percentile_ci, "Percentile instead of normal-theory interval");

  auto* sim = app.add_subcommand("simulate", "Replicate a simulation scenario");
  add_common(sim, c, false);
  sim->add_option("scenario", sf.scenario, "s1, s2, appF1, appF2 or a scenario .json file")->required();
  sim->add_option("--n", sf.n, "Sample size");
  sim->add_option("--r2", sf.r2, "Number of covariates");
  sim->add_option("--reps", c.reps, "Replicates")->capture_default_str();
  sim->add_option("--boot", c.boot, "Bootstrap replicates for SCAD and LASSO (0 disables)")->capture_default_str();
  sim->add_option("--methods", sf.methods, "Comma-separated methods")->capture_default_str();
  sim->add_flag("--noise-sd", c.noise_sd, "Read the scenario spreads as SDs instead of variances");
  sim->add_flag("--oracle-psfit", sf.oracle_psfit, "PS-fit uses exactly the true treatment covariates");
  sim->add_option("--save-scenario", sf.save_scenario, "Write the resolved scenario as JSON");

  auto* fig = app.add_subcommand("figure2", "One-covariate experiment: alpha_hat against n");
  add_common(fig, c, false);
  fig->add_option("--n-grid", ff.n_grid, "Comma-separated sample sizes")->capture_default_str();
  fig->add_option("--reps", ff.reps, "Replicates per n")->capture_default_str();
  fig->add_option("--boosted-n", ff.boosted_n, "Sample size for the boosted SCAD run")->capture_default_str();
  fig->add_option("--boosted-reps", ff.boosted_reps, "Replicates for the boosted SCAD run (0 skips)")
      ->capture_default_str();

  auto* pen = app.add_subcommand("check-penalty", "Check penalty conditions numerically");
  add_common(pen, c, false);
  pen->add_option("--lambda", pf.lambda, "Penalty level")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sel) return cmd_select(c);
    if (*est) return cmd_estimate(c);
    if (*sim) return cmd_simulate(c, sf);
    if (*fig) return cmd_figure2(c, ff);
    if (*pen) return cmd_check_penalty(c, pf);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.is_numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confsel/ate.hpp"
#include "confsel/data.hpp"
#include "confsel/selector.hpp"

namespace confsel {

// End-to-end runs on raw (unstandardized) data. Fitting happens on the
// standardized covariates; coefficients are mapped back for reporting.

struct PipelineOptions {
  PenaltyFamily family = PenaltyFamily::scad;
  OptimizerConfig optimizer;
  int B = 100;
  std::uint64_t seed = 20240101;
  int workers = 1;
  bool percentile_ci = false;
  DrOptions dr;
};

struct SelectionReport {
  SelectionResult fit;  // standardized scale
  Scaling scaling;
  std::vector<std::string> selected_names;
  Vector alpha;  // original scale
  double beta0_y = 0.0, beta_d = 0.0, beta0_d = 0.0, sigma2 = 0.0;
  std::vector<std::string> warnings;
};

struct EstimateReport {
  SelectionReport selection;
  AteEstimate ate;
  DrFit dr;
};

inline SelectionReport report_selection(const Dataset& raw, const SelectionResult& sel, const Scaling& sc) {
  SelectionReport rep;
  rep.fit = sel;
  rep.scaling = sc;
  for (auto j : sel.selected) rep.selected_names.push_back(raw.names()[j]);
  rep.alpha = sc.unscale_alpha(sel.eta_hat.alpha);
  const double shift = sc.intercept_shift(sel.eta_hat.alpha);
  rep.beta0_y = sel.eta_hat.beta0_y + shift;
  rep.beta_d = sel.eta_hat.beta_d;
  rep.beta0_d = sel.eta_hat.beta0_d + shift;
  rep.sigma2 = sel.eta_hat.sigma2;
  if (sel.selected.empty()) rep.warnings.push_back("no covariate selected");
  if (!sel.converged) rep.warnings.push_back("optimizer did not converge at the chosen lambda");
  return rep;
}

inline SelectionReport run_selection(const Dataset& raw, const PipelineOptions& opt) {
  raw.require_both_arms();
  const auto [ds, sc] = standardize(raw);
  const SelectionResult sel = select(ds, opt.family, opt.optimizer);
  return report_selection(raw, sel, sc);
}

// theta is invariant to the affine covariate scaling, so the DR stage and
// the bootstrap run on the standardized data as well.
inline EstimateReport run_estimate(const Dataset& raw, const PipelineOptions& opt) {
  raw.require_both_arms();
  const auto [ds, sc] = standardize(raw);
  const SelectionResult sel = select(ds, opt.family, opt.optimizer);
  EstimateReport rep;
  rep.selection = report_selection(raw, sel, sc);
  rep.dr = dr_estimate(ds, sel.selected, opt.dr);
  for (const auto& w : rep.dr.warnings) rep.selection.warnings.push_back(w);
  BootstrapOptions bo;
  bo.B = opt.B;
  bo.seed = opt.seed;
  bo.workers = opt.workers;
  bo.percentile_ci = opt.percentile_ci;
  bo.dr = opt.dr;
  rep.ate = bootstrap_from_selection(ds, sel, opt.family, opt.optimizer, bo);
  return rep;
}

}  // namespace confsel

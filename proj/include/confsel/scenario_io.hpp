#pragma once

// JSON (de)serialization of scenarios. Needs nlohmann/json on the include
// path as <json.hpp>.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "confsel/error.hpp"
#include "confsel/sim.hpp"

namespace confsel {

inline constexpr int scenario_schema_version = 1;

namespace detail {

inline std::string covariate_key(std::size_t j) { return "x" + std::to_string(j + 1); }

inline std::size_t parse_covariate_key(const std::string& k) {
  std::size_t idx = 0;
  if (k.size() < 2 || k[0] != 'x') fail(ErrorKind::validation, "bad covariate key '" + k + "'");
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (k[i] < '0' || k[i] > '9') fail(ErrorKind::validation, "bad covariate key '" + k + "'");
    idx = idx * 10 + static_cast<std::size_t>(k[i] - '0');
  }
  if (idx == 0) fail(ErrorKind::validation, "covariate keys start at x1");
  return idx - 1;
}

inline nlohmann::json terms_to_json(const std::vector<Term>& t) {
  auto a = nlohmann::json::array();
  for (const auto& q : t) a.push_back({covariate_key(q.index), q.weight});
  return a;
}

inline std::vector<Term> terms_from_json(const nlohmann::json& a) {
  std::vector<Term> out;
  for (const auto& q : a) out.push_back({parse_covariate_key(q.at(0).get<std::string>()), q.at(1).get<double>()});
  return out;
}

inline nlohmann::json model_to_json(const std::map<std::size_t, double>& lin, const std::vector<NonlinearTerm>& nl) {
  nlohmann::json j;
  j["linear"] = nlohmann::json::object();
  for (const auto& [k, c] : lin) j["linear"][covariate_key(k)] = c;
  j["nonlinear"] = nlohmann::json::array();
  for (const auto& t : nl)
    j["nonlinear"].push_back({{"kind", t.kind == NonlinearTerm::Kind::sum_over_abs ? "sum_over_abs" : "exp_ratio"},
                              {"coef", t.coef},
                              {"num", terms_to_json(t.num)},
                              {"den", terms_to_json(t.den)}});
  return j;
}

inline void model_from_json(const nlohmann::json& j, std::map<std::size_t, double>& lin,
                            std::vector<NonlinearTerm>& nl) {
  lin.clear();
  nl.clear();
  if (j.contains("linear"))
    for (const auto& [k, v] : j.at("linear").items()) lin[parse_covariate_key(k)] = v.get<double>();
  if (j.contains("nonlinear"))
    for (const auto& t : j.at("nonlinear")) {
      NonlinearTerm q;
      const auto kind = t.at("kind").get<std::string>();
      if (kind == "sum_over_abs") q.kind = NonlinearTerm::Kind::sum_over_abs;
      else if (kind == "exp_ratio") q.kind = NonlinearTerm::Kind::exp_ratio;
      else fail(ErrorKind::validation, "unknown nonlinear term kind '" + kind + "'");
      q.coef = t.value("coef", 1.0);
      if (t.contains("num")) q.num = terms_from_json(t.at("num"));
      if (t.contains("den")) q.den = terms_from_json(t.at("den"));
      nl.push_back(std::move(q));
    }
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["schema_version"] = scenario_schema_version;
  j["name"] = s.name;
  j["n"] = s.n;
  j["r2"] = s.r2;
  j["x_dist"] = {{"mean", s.x_mean}, {"spread", s.x_spread}};
  j["spread_is_sd"] = s.spread_is_sd;
  j["d_logit"] = detail::model_to_json(s.d_linear, s.d_nonlinear);
  j["y_mean"] = detail::model_to_json(s.y_linear, s.y_nonlinear);
  j["y_spread"] = s.y_spread;
  j["theta_true"] = s.theta_true;
  auto sup = nlohmann::json::array();
  for (auto k : s.true_support) sup.push_back(detail::covariate_key(k));
  j["true_support"] = sup;
  return j;
}

// Unknown fields are ignored; a missing true_support is derived.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.name = j.value("name", std::string("custom"));
    s.n = j.at("n").get<std::size_t>();
    s.r2 = j.at("r2").get<std::size_t>();
    if (j.contains("x_dist")) {
      s.x_mean = j["x_dist"].value("mean", 0.0);
      s.x_spread = j["x_dist"].value("spread", 1.0);
    }
    s.spread_is_sd = j.value("spread_is_sd", false);
    detail::model_from_json(j.at("d_logit"), s.d_linear, s.d_nonlinear);
    detail::model_from_json(j.at("y_mean"), s.y_linear, s.y_nonlinear);
    s.y_spread = j.value("y_spread", 1.0);
    s.theta_true = j.value("theta_true", 1.0);
    if (j.contains("true_support")) {
      for (const auto& k : j["true_support"]) s.true_support.push_back(detail::parse_covariate_key(k.get<std::string>()));
      std::sort(s.true_support.begin(), s.true_support.end());
    } else {
      s = finalize(s);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::schema, std::string("scenario file: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::validation, "cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::schema, "scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::validation, "cannot write '" + path + "'");
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace confsel

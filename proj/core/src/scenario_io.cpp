#include "riskmech/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace riskmech {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw LoadError(msg); }

const json& require_key(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) fail("missing key \"" + key + "\" in " + ctx);
  return obj.at(key);
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + " must be a number");
  return v.get<double>();
}

int as_integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx + " must be an integer");
  return v.get<int>();
}

bool as_boolean(const json& v, const std::string& ctx) {
  if (!v.is_boolean()) fail(ctx + " must be a boolean");
  return v.get<bool>();
}

Eigen::VectorXd as_vector(const json& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx + " must be an array of numbers");
  Eigen::VectorXd out(v.size());
  for (size_t k = 0; k < v.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = as_number(v[k], ctx + "[" + std::to_string(k) + "]");
  return out;
}

// Scalars broadcast to one entry per player.
Eigen::VectorXd as_broadcast_vector(const json& v, int n, const std::string& ctx) {
  if (v.is_number()) return Eigen::VectorXd::Constant(n, v.get<double>());
  return as_vector(v, ctx);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& ctx) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key)) fail("unknown key \"" + key + "\" in " + ctx);
}

UtilityFunction parse_utility(const json& pj, const std::string& ctx) {
  const bool shorthand = pj.contains("alpha");
  const bool tagged = pj.contains("utility");
  if (shorthand == tagged)
    fail(ctx + " needs exactly one of \"alpha\" (Log shorthand) or \"utility\"");
  if (shorthand) return UtilityFunction::log_weighted(as_number(pj.at("alpha"), ctx + ".alpha"));

  const json& uj = pj.at("utility");
  const std::string uctx = ctx + ".utility";
  const json& fam = require_key(uj, "family", uctx);
  if (!fam.is_string()) fail(uctx + ".family must be a string");
  const std::string family = fam.get<std::string>();
  if (family == "log") {
    reject_unknown_keys(uj, {"family", "alpha"}, uctx);
    return UtilityFunction::log_weighted(as_number(require_key(uj, "alpha", uctx), uctx + ".alpha"));
  }
  if (family == "power") {
    reject_unknown_keys(uj, {"family", "alpha", "rho"}, uctx);
    return UtilityFunction::power(as_number(require_key(uj, "alpha", uctx), uctx + ".alpha"),
                                  as_number(require_key(uj, "rho", uctx), uctx + ".rho"));
  }
  if (family == "quadratic") {
    reject_unknown_keys(uj, {"family", "a", "b"}, uctx);
    return UtilityFunction::quadratic(as_number(require_key(uj, "a", uctx), uctx + ".a"),
                                      as_number(require_key(uj, "b", uctx), uctx + ".b"));
  }
  fail("unknown utility family \"" + family + "\"");
}

IterationConfig parse_iteration(const json& ij) {
  if (!ij.is_object()) fail("\"iteration\" must be an object");
  reject_unknown_keys(ij,
                      {"kappa_d", "phi", "lambda_init", "lambda_min", "p_cap_fraction",
                       "max_iters", "conv_tol", "literal_lambda_projection",
                       "simultaneous_update", "fail_on_max_iters"},
                      "\"iteration\"");
  IterationConfig cfg;
  if (ij.contains("kappa_d")) cfg.kappa_d = as_number(ij.at("kappa_d"), "iteration.kappa_d");
  if (ij.contains("phi")) cfg.phi = as_number(ij.at("phi"), "iteration.phi");
  if (ij.contains("lambda_init"))
    cfg.lambda_init = as_number(ij.at("lambda_init"), "iteration.lambda_init");
  if (ij.contains("lambda_min"))
    cfg.lambda_min = as_number(ij.at("lambda_min"), "iteration.lambda_min");
  if (ij.contains("p_cap_fraction"))
    cfg.p_cap_fraction = as_number(ij.at("p_cap_fraction"), "iteration.p_cap_fraction");
  if (ij.contains("max_iters")) cfg.max_iters = as_integer(ij.at("max_iters"), "iteration.max_iters");
  if (ij.contains("conv_tol")) cfg.conv_tol = as_number(ij.at("conv_tol"), "iteration.conv_tol");
  if (ij.contains("literal_lambda_projection"))
    cfg.literal_lambda_projection =
        as_boolean(ij.at("literal_lambda_projection"), "iteration.literal_lambda_projection");
  if (ij.contains("simultaneous_update"))
    cfg.simultaneous_update = as_boolean(ij.at("simultaneous_update"), "iteration.simultaneous_update");
  if (ij.contains("fail_on_max_iters"))
    cfg.fail_on_max_iters = as_boolean(ij.at("fail_on_max_iters"), "iteration.fail_on_max_iters");
  return cfg;
}

OdeConfig parse_ode(const json& oj, int n) {
  if (!oj.is_object()) fail("\"ode\" must be an object");
  reject_unknown_keys(oj, {"kappa_lambda", "kappa_x", "dt", "t_end", "record_every"}, "\"ode\"");
  OdeConfig cfg;
  if (oj.contains("kappa_lambda"))
    cfg.kappa_lambda = as_number(oj.at("kappa_lambda"), "ode.kappa_lambda");
  if (oj.contains("kappa_x")) cfg.kappa_x = as_broadcast_vector(oj.at("kappa_x"), n, "ode.kappa_x");
  if (oj.contains("dt")) cfg.dt = as_number(oj.at("dt"), "ode.dt");
  if (oj.contains("t_end")) cfg.t_end = as_number(oj.at("t_end"), "ode.t_end");
  if (oj.contains("record_every"))
    cfg.record_every = as_integer(oj.at("record_every"), "ode.record_every");
  return cfg;
}

}  // namespace

ScenarioBundle parse_scenario(const json& doc, const std::string& id) {
  if (!doc.is_object()) fail("scenario document must be a JSON object");
  reject_unknown_keys(doc,
                      {"players", "influence", "objective", "budget", "success_threshold",
                       "initial", "iteration", "ode"},
                      "the scenario document");

  ScenarioBundle bundle;
  Scenario& s = bundle.scenario;
  s.id = id;

  const json& players = require_key(doc, "players", "the scenario document");
  if (!players.is_array()) fail("\"players\" must be an array");
  for (size_t k = 0; k < players.size(); ++k) {
    const json& pj = players[k];
    const std::string ctx = "players[" + std::to_string(k) + "]";
    if (!pj.is_object()) fail(ctx + " must be an object");
    reject_unknown_keys(pj, {"alpha", "utility", "beta"}, ctx);
    PlayerSpec p;
    p.id = static_cast<int>(k) + 1;
    p.utility = parse_utility(pj, ctx);
    p.cost_factor = as_number(require_key(pj, "beta", ctx), ctx + ".beta");
    s.players.push_back(p);
  }
  const int n = s.player_count();

  if (doc.contains("influence")) {
    const json& wj = doc.at("influence");
    if (!wj.is_array() || wj.empty()) fail("\"influence\" must be a nonempty array of rows");
    const size_t rows = wj.size();
    Eigen::MatrixXd w(rows, rows);
    for (size_t i = 0; i < rows; ++i) {
      const std::string ctx = "influence[" + std::to_string(i) + "]";
      const Eigen::VectorXd row = as_vector(wj[i], ctx);
      if (static_cast<size_t>(row.size()) != rows) fail(ctx + " must have one entry per row");
      w.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    s.influence = InfluenceMatrix(w);
  } else {
    s.influence = InfluenceMatrix::identity(n);
  }

  const json& oj = require_key(doc, "objective", "the scenario document");
  const json& kindj = require_key(oj, "kind", "\"objective\"");
  if (!kindj.is_string()) fail("objective.kind must be a string");
  const std::string kind = kindj.get<std::string>();
  if (kind == "welfare") {
    reject_unknown_keys(oj, {"kind"}, "\"objective\"");
    s.objective = DesignerObjective::welfare();
  } else if (kind == "linear_global") {
    reject_unknown_keys(oj, {"kind", "gamma"}, "\"objective\"");
    s.objective = DesignerObjective::linear_global(
        as_vector(require_key(oj, "gamma", "\"objective\""), "objective.gamma"));
  } else {
    fail("unknown objective kind \"" + kind + "\"");
  }

  s.budget = as_number(require_key(doc, "budget", "the scenario document"), "\"budget\"");
  if (doc.contains("success_threshold"))
    s.success_threshold = as_number(doc.at("success_threshold"), "\"success_threshold\"");

  if (doc.contains("initial")) {
    const json& init = doc.at("initial");
    if (!init.is_object()) fail("\"initial\" must be an object");
    reject_unknown_keys(init, {"x", "p"}, "\"initial\"");
    if (init.contains("x"))
      s.initial_investment = as_broadcast_vector(init.at("x"), n, "initial.x");
    if (init.contains("p"))
      s.initial_incentive = as_broadcast_vector(init.at("p"), n, "initial.p");
  }

  if (doc.contains("iteration")) bundle.iteration = parse_iteration(doc.at("iteration"));
  if (doc.contains("ode")) bundle.ode = parse_ode(doc.at("ode"), n);
  return bundle;
}

ScenarioBundle load_scenario_bundle(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open scenario file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("malformed JSON in " + file.string() + ": " + e.what());
  }
  ScenarioBundle bundle = parse_scenario(doc, file.stem().string());
  const DiagnosticsReport report = validate_scenario(bundle.scenario);
  if (!report.all_passed()) {
    const CheckResult* worst = report.first_failure();
    fail("invalid scenario " + file.string() + ": check \"" + worst->name + "\" failed" +
         (worst->detail.empty() ? "" : " (" + worst->detail + ")"));
  }
  return bundle;
}

Scenario load_scenario(const std::filesystem::path& file) {
  return load_scenario_bundle(file).scenario;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json doc;
  json players = json::array();
  for (const PlayerSpec& p : s.players) {
    json pj;
    switch (p.utility.family()) {
      case UtilityFamily::Log:
        pj["alpha"] = p.utility.weight();
        break;
      case UtilityFamily::Power:
        pj["utility"] = {{"family", "power"}, {"alpha", p.utility.weight()},
                         {"rho", p.utility.exponent()}};
        break;
      case UtilityFamily::Quadratic:
        pj["utility"] = {{"family", "quadratic"}, {"a", p.utility.weight()},
                         {"b", p.utility.curvature()}};
        break;
    }
    pj["beta"] = p.cost_factor;
    players.push_back(pj);
  }
  doc["players"] = players;

  if (!s.influence.is_identity()) {
    json w = json::array();
    for (int i = 0; i < s.influence.size(); ++i) {
      json row = json::array();
      for (int j = 0; j < s.influence.size(); ++j) row.push_back(s.influence(i, j));
      w.push_back(row);
    }
    doc["influence"] = w;
  }

  if (s.objective.kind == ObjectiveKind::Welfare) {
    doc["objective"] = {{"kind", "welfare"}};
  } else {
    json gamma = json::array();
    for (int i = 0; i < s.objective.weights.size(); ++i) gamma.push_back(s.objective.weights[i]);
    doc["objective"] = {{"kind", "linear_global"}, {"gamma", gamma}};
  }

  doc["budget"] = s.budget;
  if (s.success_threshold) doc["success_threshold"] = *s.success_threshold;

  if (s.initial_investment || s.initial_incentive) {
    json init;
    const auto vec = [](const Eigen::VectorXd& v) {
      json arr = json::array();
      for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
      return arr;
    };
    if (s.initial_investment) init["x"] = vec(*s.initial_investment);
    if (s.initial_incentive) init["p"] = vec(*s.initial_incentive);
    doc["initial"] = init;
  }
  return doc;
}

std::string save_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

Scenario paper_scenario() {
  Scenario s;
  s.id = "paper_s5";
  const double alpha[] = {0.9, 0.7, 0.6, 0.8, 0.2, 0.4};
  const double gamma[] = {0.8, 0.4, 0.5, 0.2, 0.3, 0.1};
  for (int i = 0; i < 6; ++i) {
    PlayerSpec p;
    p.id = i + 1;
    p.utility = UtilityFunction::log_weighted(alpha[i]);
    p.cost_factor = 3.0;
    s.players.push_back(p);
  }
  s.influence = InfluenceMatrix::identity(6);
  Eigen::VectorXd g(6);
  for (int i = 0; i < 6; ++i) g[i] = gamma[i];
  s.objective = DesignerObjective::linear_global(g);
  s.budget = 3.0;
  s.success_threshold = 2.5;
  s.initial_investment = Eigen::VectorXd::Constant(6, 0.5);
  s.initial_incentive = Eigen::VectorXd::Constant(6, 0.3);
  return s;
}

}  // namespace riskmech

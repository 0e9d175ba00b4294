#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "riskmech/direct.hpp"
#include "riskmech/report.hpp"
#include "riskmech/scenario_io.hpp"

using namespace riskmech;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path write_temp(const std::string& stem, const std::string& body) {
  const fs::path file = fs::temp_directory_path() / (stem + ".json");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << body;
  return file;
}

const char* kMinimalPair = R"({
  "players": [{"alpha": 0.9, "beta": 3.0}, {"alpha": 0.4, "beta": 2.5}],
  "objective": {"kind": "welfare"},
  "budget": 1.0
})";

}  // namespace

TEST_CASE("the shipped reference file loads to the built-in scenario") {
  const fs::path file = fs::path(RISKMECH_SCENARIO_DIR) / "paper_s5.json";
  const ScenarioBundle bundle = load_scenario_bundle(file);
  CHECK(bundle.scenario == paper_scenario());
  CHECK_FALSE(bundle.iteration.has_value());
  CHECK_FALSE(bundle.ode.has_value());
}

TEST_CASE("saving and reloading reproduces every field") {
  Scenario s;
  s.id = "io_roundtrip";
  s.players = {{1, UtilityFunction::log_weighted(0.9), 3.0},
               {2, UtilityFunction::power(0.7, 0.5), 2.5},
               {3, UtilityFunction::quadratic(2.0, 1.0), 2.0}};
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, 3);
  w(0, 1) = 0.3;
  w(2, 0) = 0.15;
  s.influence = InfluenceMatrix(w);
  s.objective = DesignerObjective::linear_global({1.0, 0.5, 0.25});
  s.budget = 2.0;
  s.success_threshold = 1.5;
  Eigen::VectorXd x0(3), p0(3);
  x0 << 0.4, 0.5, 0.6;
  p0 << 0.1, 0.2, 0.3;
  s.initial_investment = x0;
  s.initial_incentive = p0;

  const fs::path file = write_temp("io_roundtrip", save_scenario(s));
  const Scenario back = load_scenario(file);
  CHECK(back == s);
  CHECK(scenario_to_json(back) == scenario_to_json(s));
  CHECK(save_scenario(s).back() == '\n');
}

TEST_CASE("omitted influence defaults to identity and scalars broadcast") {
  const fs::path file = write_temp("io_defaults", R"({
    "players": [{"alpha": 0.9, "beta": 3.0}, {"alpha": 0.4, "beta": 2.5}],
    "objective": {"kind": "welfare"},
    "budget": 1.0,
    "initial": {"x": 0.5, "p": 0.3}
  })");
  const Scenario s = load_scenario(file);
  CHECK(s.influence.is_identity());
  REQUIRE(s.initial_investment.has_value());
  REQUIRE(s.initial_incentive.has_value());
  CHECK(s.initial_investment->size() == 2);
  CHECK((*s.initial_investment)[1] == 0.5);
  CHECK((*s.initial_incentive)[0] == 0.3);
}

TEST_CASE("iteration and flow settings ride along with the scenario") {
  const fs::path file = write_temp("io_knobs", R"({
    "players": [{"alpha": 0.9, "beta": 3.0}],
    "objective": {"kind": "linear_global", "gamma": [1.0]},
    "budget": 1.0,
    "iteration": {"kappa_d": 0.1, "phi": 0.5, "max_iters": 200, "conv_tol": 1e-6,
                  "literal_lambda_projection": true},
    "ode": {"kappa_lambda": 2.0, "kappa_x": 0.5, "dt": 0.01, "t_end": 10.0,
            "record_every": 5}
  })");
  const ScenarioBundle bundle = load_scenario_bundle(file);

  REQUIRE(bundle.iteration.has_value());
  CHECK(bundle.iteration->kappa_d == 0.1);
  CHECK(bundle.iteration->phi == 0.5);
  CHECK(bundle.iteration->max_iters == 200);
  CHECK(bundle.iteration->conv_tol == 1e-6);
  CHECK(bundle.iteration->literal_lambda_projection);
  CHECK(bundle.iteration->p_cap_fraction == 0.99);  // untouched default

  REQUIRE(bundle.ode.has_value());
  CHECK(bundle.ode->kappa_lambda == 2.0);
  CHECK(bundle.ode->kappa_x.size() == 1);
  CHECK(bundle.ode->kappa_x[0] == 0.5);
  CHECK(bundle.ode->dt == 0.01);
  CHECK(bundle.ode->t_end == 10.0);
  CHECK(bundle.ode->record_every == 5);
}

TEST_CASE("structural problems are reported as load errors") {
  auto load_body = [](const std::string& stem, const std::string& body) {
    return load_scenario_bundle(write_temp(stem, body));
  };

  CHECK_THROWS_AS((void)load_scenario_bundle("/nonexistent/path.json"), LoadError);
  CHECK_THROWS_WITH_AS((void)load_body("io_bad_json", "{ not json"),
                       doctest::Contains("malformed JSON"), LoadError);
  CHECK_THROWS_AS((void)load_body("io_both", R"({
    "players": [{"alpha": 0.9, "utility": {"family": "log", "alpha": 0.9}, "beta": 3.0}],
    "objective": {"kind": "welfare"}, "budget": 1.0})"),
                  LoadError);
  CHECK_THROWS_AS((void)load_body("io_neither", R"({
    "players": [{"beta": 3.0}],
    "objective": {"kind": "welfare"}, "budget": 1.0})"),
                  LoadError);
  CHECK_THROWS_AS((void)load_body("io_family", R"({
    "players": [{"utility": {"family": "cubic", "alpha": 1.0}, "beta": 3.0}],
    "objective": {"kind": "welfare"}, "budget": 1.0})"),
                  LoadError);
  CHECK_THROWS_AS((void)load_body("io_nobeta", R"({
    "players": [{"alpha": 0.9}],
    "objective": {"kind": "welfare"}, "budget": 1.0})"),
                  LoadError);
  CHECK_THROWS_AS((void)load_body("io_unknown_key", R"({
    "players": [{"alpha": 0.9, "beta": 3.0}],
    "objective": {"kind": "welfare"}, "budget": 1.0, "extra": true})"),
                  LoadError);
  CHECK_THROWS_AS((void)load_body("io_badkind", R"({
    "players": [{"alpha": 0.9, "beta": 3.0}],
    "objective": {"kind": "maximin"}, "budget": 1.0})"),
                  LoadError);
}

TEST_CASE("semantic validation runs on load but not on bare parsing") {
  const std::string body = R"({
    "players": [{"alpha": 0.9, "beta": 3.0}, {"alpha": 0.4, "beta": 2.5}],
    "objective": {"kind": "linear_global", "gamma": [1.0]},
    "budget": 1.0})";
  const fs::path file = write_temp("io_gamma", body);
  CHECK_THROWS_WITH_AS((void)load_scenario_bundle(file), doctest::Contains("gamma length"),
                       LoadError);
  CHECK_NOTHROW((void)parse_scenario(json::parse(body), "io_gamma"));
}

TEST_CASE("reals are written with enough digits to reload exactly") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(3.0) == "3");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("result tables carry fixed headers") {
  const Scenario pair = load_scenario(write_temp("io_pair", kMinimalPair));
  const Trajectory traj = run_mechanism(pair, {}, Mechanism::None, Eigen::VectorXd::Constant(2, 0.5), Eigen::VectorXd::Constant(2, 0.1));
  const std::string table = trajectory_csv(traj);
  CHECK(table.substr(0, table.find('\n')) ==
        "n,lambda,spend,objective,x_1,x_2,p_1,p_2,cost_1,cost_2");
  CHECK(table.back() == '\n');

  const Scenario s = paper_scenario();
  const MechanismSolution sol = solve_m2(s);
  const std::string row = solution_csv(s, sol);
  CHECK(row.substr(0, row.find('\n')) ==
        "lambda,spend,objective,x_1,x_2,x_3,x_4,x_5,x_6,p_1,p_2,p_3,p_4,p_5,p_6");
  CHECK(std::count(row.begin(), row.end(), '\n') == 2);

  const std::vector<ProbeRecord> none;
  CHECK(probe_csv(none) ==
        "n,cost_honest,cost_deviated,cost_target,cost_target_deviated\n");
}

TEST_CASE("flow tables report time, multiplier, potential, and investments") {
  const Scenario s = paper_scenario();
  OdeState init;
  init.investment = Eigen::VectorXd::Constant(6, 0.5);
  init.lambda = 1.0;
  OdeConfig cfg;
  cfg.t_end = 0.05;
  cfg.record_every = 10;
  const OdeTrajectory traj = integrate(s, Mechanism::IM2, init, cfg);
  const std::string table = ode_csv(s, Mechanism::IM2, traj);
  CHECK(table.substr(0, table.find('\n')) == "t,lambda,V_L,x_1,x_2,x_3,x_4,x_5,x_6");
  CHECK(static_cast<size_t>(std::count(table.begin(), table.end(), '\n')) ==
        traj.samples.size() + 1);
}

TEST_CASE("run summaries expose exactly the agreed fields") {
  const Scenario s = paper_scenario();

  const json direct = run_summary(s, solve_m2(s));
  CHECK(direct.size() == 7);
  for (const char* key :
       {"converged_at", "lambda", "x", "p", "spend", "objective", "threshold_pass"})
    CHECK(direct.contains(key));
  CHECK(direct["converged_at"].is_null());
  CHECK(direct["threshold_pass"] == false);
  CHECK(direct["x"].size() == 6);

  const Trajectory traj = run_mechanism(s, {}, Mechanism::IM2, Eigen::VectorXd::Constant(6, 0.5), Eigen::VectorXd::Constant(6, 0.3));
  const json iterated = run_summary(s, traj);
  CHECK(iterated["converged_at"] == 28);
  CHECK(iterated["lambda"] == doctest::Approx(0.39144320101992538674).epsilon(1e-6));

  Scenario bare = s;
  bare.success_threshold.reset();
  CHECK(run_summary(bare, solve_m2(bare))["threshold_pass"].is_null());
}

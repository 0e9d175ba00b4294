#include <CLI11.hpp>
#include <Eigen/Dense>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "riskmech/direct.hpp"
#include "riskmech/dynamics.hpp"
#include "riskmech/game.hpp"
#include "riskmech/iterative.hpp"
#include "riskmech/report.hpp"
#include "riskmech/scenario_io.hpp"

namespace {

using riskmech::Mechanism;
using riskmech::Scenario;
using riskmech::ScenarioBundle;

struct ScenarioOpts {
  std::string path;
  bool use_paper = false;
};

void add_scenario_opts(CLI::App* cmd, ScenarioOpts& opts) {
  auto* file = cmd->add_option("--scenario", opts.path, "scenario JSON file");
  auto* paper = cmd->add_flag("--paper", opts.use_paper, "use the built-in reference scenario");
  file->excludes(paper);
  paper->excludes(file);
}

ScenarioBundle resolve_scenario(const ScenarioOpts& opts) {
  if (opts.use_paper) return {riskmech::paper_scenario(), std::nullopt, std::nullopt};
  return riskmech::load_scenario_bundle(opts.path);
}

bool scenario_opts_valid(const ScenarioOpts& opts) {
  if (opts.use_paper || !opts.path.empty()) return true;
  std::cerr << "error: provide exactly one of --scenario and --paper\n";
  return false;
}

// im1/m1 never reference the linear-global weights; running them against a
// linear-global scenario means running the welfare objective.
Scenario with_mechanism_objective(Scenario s, const std::string& mech) {
  if (mech == "m1" || mech == "im1") s.objective = riskmech::DesignerObjective::welfare();
  return s;
}

Eigen::VectorXd initial_investment(const Scenario& s) {
  return s.initial_investment ? *s.initial_investment
                              : Eigen::VectorXd::Constant(s.player_count(), 0.5);
}

Eigen::VectorXd initial_incentive(const Scenario& s, bool zero_incentive) {
  if (zero_incentive) return Eigen::VectorXd::Zero(s.player_count());
  return s.initial_incentive ? *s.initial_incentive
                             : Eigen::VectorXd::Constant(s.player_count(), 0.3);
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw riskmech::Error("cannot write " + path);
}

void emit_summary(const nlohmann::json& summary, const std::string& path) {
  if (!path.empty()) emit(summary.dump(2) + "\n", path);
}

struct RunOpts {
  ScenarioOpts scenario;
  std::string mech;
  std::string out;
  std::string summary;
  std::optional<int> max_iters;
  std::optional<double> tol;
  bool literal_lambda_projection = false;
  bool allow_unconverged = false;
  bool baseline_zero_p = false;
};

int cmd_run(const RunOpts& opts) {
  if (!scenario_opts_valid(opts.scenario)) return 1;
  const ScenarioBundle bundle = resolve_scenario(opts.scenario);
  const Scenario s = with_mechanism_objective(bundle.scenario, opts.mech);

  if (opts.mech == "m1" || opts.mech == "m2") {
    const riskmech::MechanismSolution sol =
        opts.mech == "m1" ? riskmech::solve_m1(s) : riskmech::solve_m2(s);
    emit(riskmech::solution_csv(s, sol), opts.out);
    emit_summary(riskmech::run_summary(s, sol), opts.summary);
    return 0;
  }

  riskmech::IterationConfig cfg = bundle.iteration.value_or(riskmech::IterationConfig{});
  if (opts.max_iters) cfg.max_iters = *opts.max_iters;
  if (opts.tol) cfg.conv_tol = *opts.tol;
  if (opts.literal_lambda_projection) cfg.literal_lambda_projection = true;

  const Mechanism mech = opts.mech == "im1"   ? Mechanism::IM1
                         : opts.mech == "im2" ? Mechanism::IM2
                                              : Mechanism::None;
  const riskmech::Trajectory traj =
      riskmech::run_mechanism(s, cfg, mech, initial_investment(s),
                              initial_incentive(s, opts.baseline_zero_p));
  emit(riskmech::trajectory_csv(traj), opts.out);
  emit_summary(riskmech::run_summary(s, traj), opts.summary);
  if (!traj.converged_at && !opts.allow_unconverged) {
    std::cerr << "error: no convergence within " << cfg.max_iters
              << " rounds (pass --allow-unconverged to accept)\n";
    return 3;
  }
  return 0;
}

struct OdeOpts {
  ScenarioOpts scenario;
  std::string mech;
  std::string out;
  std::string summary;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<int> record_every;
};

int cmd_ode(const OdeOpts& opts) {
  if (!scenario_opts_valid(opts.scenario)) return 1;
  const ScenarioBundle bundle = resolve_scenario(opts.scenario);
  const Scenario& s = bundle.scenario;
  const Mechanism mech = opts.mech == "im1" ? Mechanism::IM1 : Mechanism::IM2;

  riskmech::OdeConfig cfg = bundle.ode.value_or(riskmech::OdeConfig{});
  if (opts.t_end) cfg.t_end = *opts.t_end;
  if (opts.dt) cfg.dt = *opts.dt;
  if (opts.record_every) cfg.record_every = *opts.record_every;

  riskmech::OdeState init;
  init.investment = initial_investment(s);
  init.lambda = riskmech::default_lambda_init(s, mech, initial_incentive(s, false));
  const riskmech::OdeTrajectory traj = riskmech::integrate(s, mech, init, cfg);
  emit(riskmech::ode_csv(s, mech, traj), opts.out);

  if (!opts.summary.empty()) {
    const riskmech::OdeSample& last = traj.samples.back();
    nlohmann::json summary;
    summary["t"] = last.t;
    summary["lambda"] = last.lambda;
    const riskmech::OdeState end{last.investment, last.lambda};
    summary["V_L"] = mech == Mechanism::IM1 ? riskmech::lyapunov_im1(s, end)
                                            : riskmech::lyapunov_im2(s, end);
    try {
      const riskmech::MechanismSolution target =
          mech == Mechanism::IM1 ? riskmech::solve_m1(with_mechanism_objective(s, "m1"))
                                 : riskmech::solve_m2(s);
      const riskmech::ExponentialFit fit = riskmech::fit_exponential_rate(
          traj, riskmech::OdeState{target.investment, target.lambda});
      summary["fit"] = {{"alpha", fit.alpha}, {"beta", fit.beta}, {"r2", fit.r2}};
    } catch (const riskmech::Error& e) {
      summary["fit"] = nullptr;
      summary["fit_error"] = e.what();
    }
    emit_summary(summary, opts.summary);
  }
  return 0;
}

struct DiagnoseOpts {
  ScenarioOpts scenario;
  int samples = 100;
};

int cmd_diagnose(const DiagnoseOpts& opts) {
  if (!scenario_opts_valid(opts.scenario)) return 1;

  Scenario s;
  if (opts.scenario.use_paper) {
    s = riskmech::paper_scenario();
  } else {
    // parse only, so every validation check can be listed before failing
    std::ifstream in(opts.scenario.path);
    if (!in) throw riskmech::LoadError("cannot open scenario file " + opts.scenario.path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw riskmech::LoadError("malformed JSON in " + opts.scenario.path + ": " + e.what());
    }
    s = riskmech::parse_scenario(
            doc, std::filesystem::path(opts.scenario.path).stem().string())
            .scenario;
  }

  std::cout << "scenario: " << s.id << " (" << s.player_count() << " players)\n";
  const riskmech::DiagnosticsReport validation = riskmech::validate_scenario(s);
  for (const riskmech::CheckResult& check : validation.checks)
    std::cout << "check \"" << check.name << "\": " << (check.passed ? "ok" : "FAIL")
              << (check.detail.empty() ? "" : " (" + check.detail + ")") << "\n";
  if (!validation.all_passed()) {
    std::cerr << "error: scenario invalid, first failed check \""
              << validation.first_failure()->name << "\"\n";
    return 2;
  }

  std::vector<riskmech::GameState> states;
  for (Eigen::VectorXd& x : riskmech::interior_samples(s, opts.samples))
    states.push_back({std::move(x), Eigen::VectorXd::Zero(s.player_count())});
  const riskmech::DiagnosticsReport uniq = riskmech::check_uniqueness(s, states);
  for (const riskmech::CheckResult& check : uniq.checks)
    std::cout << check.name << ": " << check.detail << "\n";
  std::cout << "min eigenvalue: " << riskmech::format_real(uniq.metrics.at("min_eigenvalue"))
            << "\n";

  const Eigen::VectorXd p = s.initial_incentive ? *s.initial_incentive
                                                : Eigen::VectorXd::Zero(s.player_count());
  const Eigen::VectorXd x = riskmech::solve_ne(s, p);
  const Eigen::VectorXd g = riskmech::pseudo_gradient(s, {x, p});
  std::cout << "equilibrium x:";
  for (int i = 0; i < x.size(); ++i) std::cout << ' ' << riskmech::format_real(x[i]);
  std::cout << "\nmax |stationarity residual| at equilibrium: "
            << riskmech::format_real(g.lpNorm<Eigen::Infinity>()) << "\n";
  return 0;
}

struct ProbeOpts {
  ScenarioOpts scenario;
  std::string mech;
  int player = 0;  // 1-based on the command line
  std::optional<double> delta;
  std::optional<double> scale;
  std::string out;
};

int cmd_probe(const ProbeOpts& opts) {
  if (!scenario_opts_valid(opts.scenario)) return 1;
  const ScenarioBundle bundle = resolve_scenario(opts.scenario);
  const Scenario s = with_mechanism_objective(bundle.scenario, opts.mech);
  if (opts.player < 1 || opts.player > s.player_count()) {
    std::cerr << "error: --player must be in 1.." << s.player_count() << "\n";
    return 1;
  }

  const bool iterative = opts.mech == "im1" || opts.mech == "im2";
  if (iterative) {
    if (!opts.delta) {
      std::cerr << "error: --delta is required for iterative mechanisms\n";
      return 1;
    }
    const riskmech::IterationConfig cfg =
        bundle.iteration.value_or(riskmech::IterationConfig{});
    const Mechanism mech = opts.mech == "im1" ? Mechanism::IM1 : Mechanism::IM2;
    const std::vector<riskmech::ProbeRecord> probes =
        riskmech::cheat_probe(s, cfg, mech, opts.player - 1, *opts.delta);
    emit(riskmech::probe_csv(probes), opts.out);
    return 0;
  }

  if (!opts.scale) {
    std::cerr << "error: --scale is required for direct mechanisms\n";
    return 1;
  }
  const riskmech::MisreportOutcome outcome =
      riskmech::misreport_gain(s, opts.player - 1, *opts.scale);
  nlohmann::json record;
  record["cost_truthful"] = outcome.cost_truthful;
  record["cost_misreport"] = outcome.cost_misreport;
  record["advantage"] = outcome.advantage;
  emit(record.dump(2) + "\n", opts.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incentive mechanisms for the noncooperative investment game"};
  app.require_subcommand(1);

  RunOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "iterate a mechanism or solve a direct one");
  add_scenario_opts(run, run_opts.scenario);
  run->add_option("--mech", run_opts.mech, "im1|im2|m1|m2|none")
      ->required()
      ->check(CLI::IsMember({"im1", "im2", "m1", "m2", "none"}));
  run->add_option("--out", run_opts.out, "CSV output path (default stdout)");
  run->add_option("--summary", run_opts.summary, "summary JSON output path");
  run->add_option("--max-iters", run_opts.max_iters, "round limit override");
  run->add_option("--tol", run_opts.tol, "convergence tolerance override");
  run->add_flag("--literal-lambda-projection", run_opts.literal_lambda_projection,
                "clamp the multiplier increment at zero instead of the signed update");
  run->add_flag("--allow-unconverged", run_opts.allow_unconverged,
                "exit 0 even when the round limit is hit");
  run->add_flag("--baseline-zero-p", run_opts.baseline_zero_p,
                "start from zero incentives instead of the scenario's initial p");

  OdeOpts ode_opts;
  CLI::App* ode = app.add_subcommand("ode", "integrate the continuous-time flow");
  add_scenario_opts(ode, ode_opts.scenario);
  ode->add_option("--mech", ode_opts.mech, "im1|im2")
      ->required()
      ->check(CLI::IsMember({"im1", "im2"}));
  ode->add_option("--out", ode_opts.out, "CSV output path (default stdout)");
  ode->add_option("--summary", ode_opts.summary, "summary JSON output path");
  ode->add_option("--t-end", ode_opts.t_end, "integration horizon")
      ->check(CLI::PositiveNumber);
  ode->add_option("--dt", ode_opts.dt, "step size")->check(CLI::PositiveNumber);
  ode->add_option("--record-every", ode_opts.record_every, "sampling stride in steps")
      ->check(CLI::PositiveNumber);

  DiagnoseOpts diag_opts;
  CLI::App* diagnose = app.add_subcommand("diagnose", "validation and uniqueness report");
  add_scenario_opts(diagnose, diag_opts.scenario);
  diagnose->add_option("--samples", diag_opts.samples, "interior sample count")
      ->check(CLI::PositiveNumber);

  ProbeOpts probe_opts;
  CLI::App* probe = app.add_subcommand("probe", "deviation and misreport payoffs");
  add_scenario_opts(probe, probe_opts.scenario);
  probe->add_option("--mech", probe_opts.mech, "im1|im2|m1|m2")
      ->required()
      ->check(CLI::IsMember({"im1", "im2", "m1", "m2"}));
  probe->add_option("--player", probe_opts.player, "player index (1-based)")->required();
  probe->add_option("--delta", probe_opts.delta, "action shift (iterative mechanisms)");
  probe->add_option("--scale", probe_opts.scale, "utility report scale (direct mechanisms)");
  probe->add_option("--out", probe_opts.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (ode->parsed()) return cmd_ode(ode_opts);
    if (diagnose->parsed()) return cmd_diagnose(diag_opts);
    return cmd_probe(probe_opts);
  } catch (const riskmech::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const riskmech::IntegrationError& e) {
    std::cerr << "error: " << e.what() << " (t = " << e.time() << ")\n";
    return 3;
  } catch (const riskmech::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last residual " << e.last_residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

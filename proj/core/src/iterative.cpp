#include "riskmech/iterative.hpp"

#include <algorithm>
#include <cmath>

#include "riskmech/game.hpp"

namespace riskmech {

namespace {

Eigen::VectorXd cap_prices(const Scenario& s, Eigen::VectorXd p, double cap_fraction) {
  for (int i = 0; i < s.player_count(); ++i)
    p[i] = std::min(p[i], cap_fraction * s.players[i].cost_factor);
  return p;
}

Eigen::VectorXd designer_prices(const Scenario& s, Mechanism mech, double lambda,
                                const IterationConfig& cfg) {
  const int n = s.player_count();
  Eigen::VectorXd p(n);
  if (mech == Mechanism::IM2) {
    p = s.objective.weights / lambda;
  } else {
    const Eigen::VectorXd beta = s.cost_factors();
    if (s.influence.is_identity()) {
      p = beta / (1.0 + lambda);
    } else {
      const Eigen::MatrixXd wt = s.influence.entries().transpose();
      Eigen::MatrixXd lhs = wt + lambda * Eigen::MatrixXd::Identity(n, n);
      p = lhs.partialPivLu().solve(wt * beta);
    }
  }
  return cap_prices(s, std::move(p), cfg.p_cap_fraction);
}

double objective_value(const Scenario& s, Mechanism mech, const Eigen::VectorXd& x) {
  const bool linear = mech == Mechanism::IM2 ||
                      (mech == Mechanism::None && s.objective.kind == ObjectiveKind::LinearGlobal);
  if (linear) return s.objective.weights.dot(x);
  const Eigen::VectorXd eff = effective_investment(s.influence, x);
  double total = 0.0;
  for (int i = 0; i < s.player_count(); ++i) total += s.players[i].utility.value(eff[i]);
  return total;
}

StepRecord make_record(const Scenario& s, Mechanism mech, int n, Eigen::VectorXd x,
                       Eigen::VectorXd p, double lambda) {
  StepRecord rec;
  rec.n = n;
  rec.lambda = lambda;
  rec.budget_spend = budget_spend(p, x);
  rec.investment = std::move(x);
  rec.incentive = std::move(p);
  rec.objective = objective_value(s, mech, rec.investment);
  rec.player_costs.resize(s.player_count());
  const GameState state{rec.investment, rec.incentive};
  for (int i = 0; i < s.player_count(); ++i) rec.player_costs[i] = player_cost(s, state, i);
  return rec;
}

StepRecord advance(const Scenario& s, const StepRecord& prev, const IterationConfig& cfg,
                   Mechanism mech, const Eigen::VectorXd* p_override) {
  double lambda = prev.lambda;
  if (mech != Mechanism::None) {
    double increment = cfg.kappa_d * (prev.budget_spend - s.budget);
    if (cfg.literal_lambda_projection) increment = std::max(0.0, increment);
    lambda = std::max(cfg.lambda_min, prev.lambda + increment);
  }

  Eigen::VectorXd p = p_override                 ? cap_prices(s, *p_override, cfg.p_cap_fraction)
                      : mech == Mechanism::None  ? prev.incentive
                                                 : designer_prices(s, mech, lambda, cfg);

  const Eigen::VectorXd& p_seen = cfg.simultaneous_update ? prev.incentive : p;
  const GameState response_state{prev.investment, p_seen};
  Eigen::VectorXd x(s.player_count());
  for (int i = 0; i < s.player_count(); ++i)
    x[i] = cfg.phi * prev.investment[i] + (1.0 - cfg.phi) * best_response(s, response_state, i);

  return make_record(s, mech, prev.n + 1, std::move(x), std::move(p), lambda);
}

double step_change(const StepRecord& prev, const StepRecord& cur) {
  const double dx = (cur.investment - prev.investment).lpNorm<Eigen::Infinity>();
  return std::max(dx, std::abs(cur.lambda - prev.lambda));
}

}  // namespace

std::string mechanism_name(Mechanism mech) {
  switch (mech) {
    case Mechanism::IM1:
      return "im1";
    case Mechanism::IM2:
      return "im2";
    default:
      return "none";
  }
}

double budget_spend(const Eigen::VectorXd& incentive, const Eigen::VectorXd& investment) {
  if (incentive.size() != investment.size())
    throw DimensionError("incentive and investment lengths differ");
  return incentive.dot(investment);
}

StepRecord im2_step(const Scenario& s, const StepRecord& prev, const IterationConfig& cfg) {
  if (s.objective.kind != ObjectiveKind::LinearGlobal)
    throw UnsupportedModelError("im2 prices come from linear_global weights");
  return advance(s, prev, cfg, Mechanism::IM2, nullptr);
}

StepRecord im1_step(const Scenario& s, const StepRecord& prev, const IterationConfig& cfg) {
  return advance(s, prev, cfg, Mechanism::IM1, nullptr);
}

double default_lambda_init(const Scenario& s, Mechanism mech, const Eigen::VectorXd& p0) {
  if (mech == Mechanism::None) return 1.0;
  const double p_mean = p0.mean();
  if (!(p_mean > 0.0))
    throw PreconditionError("starting incentive mean must be positive to seed the multiplier");
  if (mech == Mechanism::IM2) {
    if (s.objective.kind != ObjectiveKind::LinearGlobal)
      throw UnsupportedModelError("im2 prices come from linear_global weights");
    return std::max(1e-6, s.objective.weights.mean() / p_mean);
  }
  return std::max(1e-6, s.cost_factors().mean() / p_mean - 1.0);
}

Trajectory run_mechanism(const Scenario& s, const IterationConfig& cfg, Mechanism mech,
                         const Eigen::VectorXd& x0, const Eigen::VectorXd& p0) {
  const int n = s.player_count();
  if (x0.size() != n || p0.size() != n)
    throw DimensionError("starting investment/incentive length != player count");
  for (int i = 0; i < n; ++i)
    if (!(x0[i] >= kMinInvestment))
      throw DomainError("starting investments must be positive");
  if (mech == Mechanism::IM2 && s.objective.kind != ObjectiveKind::LinearGlobal)
    throw UnsupportedModelError("im2 prices come from linear_global weights");

  const double lambda0 = cfg.lambda_init ? *cfg.lambda_init : default_lambda_init(s, mech, p0);

  Trajectory traj;
  traj.scenario_id = s.id;
  traj.mechanism = mech;
  traj.config = cfg;
  traj.steps.reserve(static_cast<size_t>(cfg.max_iters) + 1);
  traj.steps.push_back(
      make_record(s, mech, 0, x0, cap_prices(s, p0, cfg.p_cap_fraction), lambda0));

  double last_change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iters; ++it) {
    const StepRecord& prev = traj.steps.back();
    StepRecord cur = advance(s, prev, cfg, mech, it == 0 ? &p0 : nullptr);
    last_change = step_change(prev, cur);
    traj.steps.push_back(std::move(cur));
    if (last_change < cfg.conv_tol) {
      traj.converged_at = it + 1;
      break;
    }
  }
  if (!traj.converged_at && cfg.fail_on_max_iters)
    throw ConvergenceError("mechanism did not settle within max_iters", last_change);
  return traj;
}

std::optional<int> detect_convergence(const Trajectory& traj, double tol) {
  for (size_t k = 1; k < traj.steps.size(); ++k)
    if (step_change(traj.steps[k - 1], traj.steps[k]) < tol) return traj.steps[k].n;
  return std::nullopt;
}

std::vector<ProbeRecord> cheat_probe(const Scenario& s, const Trajectory& traj, int player,
                                     double delta) {
  if (player < 0 || player >= s.player_count())
    throw DimensionError("player index " + std::to_string(player) + " out of range");

  const auto cost_at = [&](const StepRecord& rec, double own) {
    Eigen::VectorXd x = rec.investment;
    x[player] = std::max(kMinInvestment, own);
    return player_cost(s, {std::move(x), rec.incentive}, player);
  };

  std::vector<ProbeRecord> probes;
  probes.reserve(traj.steps.size());
  for (const StepRecord& rec : traj.steps) {
    ProbeRecord pr;
    pr.n = rec.n;
    pr.cost_honest = cost_at(rec, rec.investment[player]);
    pr.cost_deviated = cost_at(rec, rec.investment[player] + delta);
    const double target = best_response(s, {rec.investment, rec.incentive}, player);
    pr.cost_target = cost_at(rec, target);
    pr.cost_target_deviated = cost_at(rec, target + delta);
    probes.push_back(pr);
  }
  return probes;
}

std::vector<ProbeRecord> cheat_probe(const Scenario& s, const IterationConfig& cfg,
                                     Mechanism mech, int player, double delta) {
  const int n = s.player_count();
  const Eigen::VectorXd x0 =
      s.initial_investment ? *s.initial_investment : Eigen::VectorXd::Constant(n, 0.5);
  const Eigen::VectorXd p0 =
      s.initial_incentive ? *s.initial_incentive : Eigen::VectorXd::Constant(n, 0.3);
  return cheat_probe(s, run_mechanism(s, cfg, mech, x0, p0), player, delta);
}

}  // namespace riskmech

#pragma once

// Iterative mechanisms: the designer never sees utilities, only observed
// investments. Each round it adjusts the price of the budget multiplier
//   lambda <- max(lambda_min, lambda + kappa_d * (spend - budget))
// recomputes incentives from lambda alone (im2: p_i = weight_i / lambda;
// im1: (W^T + lambda I) p = W^T cost_factor), and players relax toward their
// best responses: x_i <- phi * x_i + (1 - phi) * best_response_i.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "riskmech/model.hpp"

namespace riskmech {

enum class Mechanism { IM1, IM2, None };

std::string mechanism_name(Mechanism mech);

struct IterationConfig {
  double kappa_d = 0.05;  // designer step size on the budget residual
  double phi = 0.3;       // relaxation weight kept on the previous investment
  std::optional<double> lambda_init;  // absent: mechanism-specific default
  double lambda_min = 1e-6;
  double p_cap_fraction = 0.99;  // incentives capped at this fraction of cost_factor
  int max_iters = 1000;
  double conv_tol = 1e-8;
  // One-sided multiplier update max(0, spend - budget): lambda can then never
  // decrease, so a start above the balanced price stalls below budget. Off by
  // default; kept selectable for comparison runs.
  bool literal_lambda_projection = false;
  // Players respond to the incentives of the previous round instead of the
  // round's fresh ones.
  bool simultaneous_update = false;
  bool fail_on_max_iters = false;
};

struct StepRecord {
  int n = 0;
  Eigen::VectorXd investment;
  Eigen::VectorXd incentive;
  double lambda = 0.0;
  double budget_spend = 0.0;
  double objective = 0.0;
  Eigen::VectorXd player_costs;
};

struct Trajectory {
  std::string scenario_id;
  Mechanism mechanism = Mechanism::None;
  IterationConfig config;
  std::vector<StepRecord> steps;
  std::optional<int> converged_at;
};

double budget_spend(const Eigen::VectorXd& incentive, const Eigen::VectorXd& investment);

// One designer-then-players round. The designer updates lambda from the
// previous round's spend and reprices; players relax toward best responses to
// the fresh prices (previous prices when simultaneous_update is set).
StepRecord im2_step(const Scenario& s, const StepRecord& prev, const IterationConfig& cfg);
StepRecord im1_step(const Scenario& s, const StepRecord& prev, const IterationConfig& cfg);

// Default starting multiplier consistent with a uniform starting incentive:
// im2: mean(weights)/mean(p0); im1: mean(cost_factor)/mean(p0) - 1; none: 1.
double default_lambda_init(const Scenario& s, Mechanism mech, const Eigen::VectorXd& p0);

// Iterates from (x0, p0, lambda_init), recording every round including the
// initial state. The first player update responds to the supplied p0 (capped
// at p_cap_fraction * cost_factor); designer pricing takes over afterwards.
// Mechanism::None keeps p fixed at p0 and lambda at lambda_init. Stops at
// convergence (successive sup-norm change below conv_tol) or max_iters;
// unconverged runs raise ConvergenceError only when fail_on_max_iters is set.
Trajectory run_mechanism(const Scenario& s, const IterationConfig& cfg, Mechanism mech,
                         const Eigen::VectorXd& x0, const Eigen::VectorXd& p0);

// First index n >= 1 with max(sup|x(n)-x(n-1)|, |lambda(n)-lambda(n-1)|) < tol.
std::optional<int> detect_convergence(const Trajectory& traj, double tol);

struct ProbeRecord {
  int n = 0;
  double cost_honest = 0.0;           // at the recorded (relaxed) action
  double cost_deviated = 0.0;         // recorded action shifted by delta
  double cost_target = 0.0;           // at the per-round best-response target
  double cost_target_deviated = 0.0;  // target shifted by delta
};

// Instantaneous-cost comparison along an honest trajectory: at every recorded
// round, player `player`'s cost at its action versus the action shifted by
// delta, everything else held fixed. Reported both at the recorded relaxed
// action and at the round's best-response target (the relaxed action is not
// the per-round minimizer, the target is). Shifted actions are projected onto
// [kMinInvestment, inf).
std::vector<ProbeRecord> cheat_probe(const Scenario& s, const Trajectory& traj,
                                     int player, double delta);

// Convenience overload: runs the honest trajectory first, starting from the
// scenario's initial conditions (x0 = 0.5, p0 = 0.3 per player when absent).
std::vector<ProbeRecord> cheat_probe(const Scenario& s, const IterationConfig& cfg,
                                     Mechanism mech, int player, double delta);

}  // namespace riskmech

#pragma once

// Direct (one-shot) incentive mechanisms. The designer announces per-player
// incentives p computed from reported utilities so that the induced
// equilibrium aligns with the designer objective, spending exactly the budget.
//
//   m1 (welfare): stationarity (cost_factor_i - p_i)/p_i
//                   + (1/p_i) sum_{j != i} dU_j/dx_i = lambda for all i,
//                 which reduces to (W^T + lambda I) p = W^T cost_factor.
//   m2 (linear global objective F(x) = sum_i weight_i x_i): p_i = weight_i / lambda.
//
// In both cases lambda is fixed by the budget sum_i p_i x_i(p) = B.

#include <Eigen/Dense>

#include "riskmech/game.hpp"
#include "riskmech/model.hpp"

namespace riskmech {

struct MechanismSolution {
  Eigen::VectorXd investment;
  Eigen::VectorXd incentive;
  double lambda = 0.0;
  double objective_value = 0.0;
  double budget_spend = 0.0;
};

// Welfare alignment. Separable Log scenarios use the closed form
// lambda = sum_i weight_i / budget, p_i = cost_factor_i / (1 + lambda);
// otherwise a bracketed scalar root-find on the budget residual in lambda.
MechanismSolution solve_m1(const Scenario& s, double tol = 1e-10);

// Linear-global alignment; bisection on the budget residual
// r(lambda) = sum_i (weight_i/lambda) x_i(lambda) - budget, which is strictly
// decreasing on the admissible range.
MechanismSolution solve_m2(const Scenario& s, double tol = 1e-10);

struct MisreportOutcome {
  double cost_truthful = 0.0;
  double cost_misreport = 0.0;
  double advantage = 0.0;  // positive when misreporting lowers the liar's cost
};

// Player `player` reports its utility scaled by report_scale; the designer
// solves the scenario's mechanism (m1 for Welfare, m2 for LinearGlobal) from
// the manipulated report, and all players then best-respond truthfully to the
// announced incentives. Costs are the player's realized equilibrium costs.
MisreportOutcome misreport_gain(const Scenario& s, int player, double report_scale);

}  // namespace riskmech

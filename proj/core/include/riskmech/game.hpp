#pragma once

// The noncooperative investment game: player costs, best responses, Nash
// equilibrium, and the pseudo-gradient machinery used for uniqueness checks.

#include <Eigen/Dense>
#include <vector>

#include "riskmech/model.hpp"

namespace riskmech {

struct GameState {
  Eigen::VectorXd investment;  // x
  Eigen::VectorXd incentive;   // p, per-unit rebate on the investment cost
};

struct NeSolveConfig {
  int max_iters = 10000;
  double tol = 1e-10;     // sup-norm tolerance on successive iterates
  double damping = 0.5;   // weight kept on the previous iterate
};

// J_i(x) = cost_factor_i * x_i - u_i((W x)_i) - p_i * x_i
double player_cost(const Scenario& s, const GameState& state, int player);

// Cost-minimizing own investment given the other components of state, clamped
// at kMinInvestment:
//   x_i = max(x_min, inverse_marginal_i(cost_factor_i - p_i) - sum_{j != i} W_ij x_j)
double best_response(const Scenario& s, const GameState& state, int player);

// Nash equilibrium by damped simultaneous best response. For an identity
// influence matrix the problems decouple and the closed form is returned in a
// single pass (no damping error).
Eigen::VectorXd solve_ne(const Scenario& s, const Eigen::VectorXd& incentive,
                         const NeSolveConfig& config = {});

// g_i(x) = d J_i / d x_i = cost_factor_i - p_i - u_i'((W x)_i)
Eigen::VectorXd pseudo_gradient(const Scenario& s, const GameState& state);

// Jacobian G of the pseudo-gradient. Analytic when every utility is Log
// (G_ij = weight_i W_ij / ((W x)_i)^2), otherwise central finite differences
// of pseudo_gradient with step 1e-6.
Eigen::MatrixXd pseudo_gradient_jacobian(const Scenario& s, const GameState& state);

inline constexpr unsigned kDefaultSampleSeed = 0x5eedu;
inline constexpr double kEigenvalueZeroTol = 1e-10;

// Latin-hypercube interior investment samples spanning the box constraint
// [~0, x_max] with x_max = 10 * max_i inverse_marginal_i(0.01 * cost_factor_i),
// capped per player below any finite domain bound.
std::vector<Eigen::VectorXd> interior_samples(const Scenario& s, int count,
                                              unsigned seed = kDefaultSampleSeed);

// Positive definiteness of G + G^T over the sample states (the sufficient
// condition for a unique equilibrium). Empty sample list: 100 default interior
// samples. Report metrics: "min_eigenvalue" (over all samples) and
// "argmin_sample"; the single check entry carries the verdict.
DiagnosticsReport check_uniqueness(const Scenario& s,
                                   const std::vector<GameState>& samples = {});

}  // namespace riskmech

#include "riskmech/game.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace riskmech {

namespace {

void require_state_dims(const Scenario& s, const GameState& state) {
  if (state.investment.size() != s.player_count() ||
      state.incentive.size() != s.player_count()) {
    std::ostringstream os;
    os << "state vectors sized " << state.investment.size() << "/" << state.incentive.size()
       << " for " << s.player_count() << " players";
    throw DimensionError(os.str());
  }
}

void require_player(const Scenario& s, int player) {
  if (player < 0 || player >= s.player_count())
    throw DimensionError("player index " + std::to_string(player) + " out of range");
}

}  // namespace

double player_cost(const Scenario& s, const GameState& state, int player) {
  require_state_dims(s, state);
  require_player(s, player);
  const Eigen::VectorXd eff = effective_investment(s.influence, state.investment);
  const PlayerSpec& pl = s.players[player];
  const double x = state.investment[player];
  return pl.cost_factor * x - pl.utility.value(eff[player]) - state.incentive[player] * x;
}

double best_response(const Scenario& s, const GameState& state, int player) {
  require_state_dims(s, state);
  require_player(s, player);
  const PlayerSpec& pl = s.players[player];
  const double net = pl.cost_factor - state.incentive[player];
  // own-cost stationarity: u_i'((W x)_i) = cost_factor_i - p_i
  const double target_effective = pl.utility.inverse_marginal(net);
  double others = 0.0;
  for (int j = 0; j < s.player_count(); ++j)
    if (j != player) others += s.influence(player, j) * state.investment[j];
  return std::max(kMinInvestment, target_effective - others);
}

Eigen::VectorXd solve_ne(const Scenario& s, const Eigen::VectorXd& incentive,
                         const NeSolveConfig& config) {
  const int n = s.player_count();
  if (incentive.size() != n)
    throw DimensionError("incentive vector has " + std::to_string(incentive.size()) +
                         " entries for " + std::to_string(n) + " players");

  if (s.influence.is_identity()) {
    // decoupled: each player's closed form, exact in one pass
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      const PlayerSpec& pl = s.players[i];
      x[i] = std::max(kMinInvestment,
                      pl.utility.inverse_marginal(pl.cost_factor - incentive[i]));
    }
    return x;
  }

  GameState state{Eigen::VectorXd::Constant(n, 0.5), incentive};
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < config.max_iters; ++it) {
    Eigen::VectorXd next(n);
    for (int i = 0; i < n; ++i)
      next[i] = config.damping * state.investment[i] +
                (1.0 - config.damping) * best_response(s, state, i);
    residual = (next - state.investment).cwiseAbs().maxCoeff();
    state.investment = next;
    if (residual < config.tol) return state.investment;
  }
  std::ostringstream os;
  os << "best-response iteration stalled at residual " << residual << " after "
     << config.max_iters << " iterations";
  throw ConvergenceError(os.str(), residual);
}

Eigen::VectorXd pseudo_gradient(const Scenario& s, const GameState& state) {
  require_state_dims(s, state);
  const Eigen::VectorXd eff = effective_investment(s.influence, state.investment);
  Eigen::VectorXd g(s.player_count());
  for (int i = 0; i < s.player_count(); ++i) {
    const PlayerSpec& pl = s.players[i];
    g[i] = pl.cost_factor - state.incentive[i] - pl.utility.marginal(eff[i]);
  }
  return g;
}

Eigen::MatrixXd pseudo_gradient_jacobian(const Scenario& s, const GameState& state) {
  require_state_dims(s, state);
  const int n = s.player_count();
  if (s.all_log()) {
    const Eigen::VectorXd eff = effective_investment(s.influence, state.investment);
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i) {
      const double scale = s.players[i].utility.weight() / (eff[i] * eff[i]);
      for (int j = 0; j < n; ++j) G(i, j) = scale * s.influence(i, j);
    }
    return G;
  }
  // central differences of the pseudo-gradient
  const double h = 1e-6;
  Eigen::MatrixXd G(n, n);
  GameState probe = state;
  for (int j = 0; j < n; ++j) {
    probe.investment[j] = state.investment[j] + h;
    const Eigen::VectorXd hi = pseudo_gradient(s, probe);
    probe.investment[j] = state.investment[j] - h;
    const Eigen::VectorXd lo = pseudo_gradient(s, probe);
    probe.investment[j] = state.investment[j];
    G.col(j) = (hi - lo) / (2.0 * h);
  }
  return G;
}

std::vector<Eigen::VectorXd> interior_samples(const Scenario& s, int count, unsigned seed) {
  const int n = s.player_count();
  double x_max = 0.0;
  for (const auto& pl : s.players)
    x_max = std::max(x_max, pl.utility.inverse_marginal(0.01 * pl.cost_factor));
  x_max *= 10.0;

  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    hi[i] = std::min(x_max, 0.999 * s.players[i].utility.domain_sup());
    lo[i] = std::max(1e3 * kMinInvestment, 1e-3 * hi[i]);
  }

  // Latin hypercube on stratum midpoints, one shuffled permutation per player
  std::mt19937 rng(seed);
  std::vector<std::vector<int>> perms(n);
  for (int i = 0; i < n; ++i) {
    perms[i].resize(count);
    std::iota(perms[i].begin(), perms[i].end(), 0);
    std::shuffle(perms[i].begin(), perms[i].end(), rng);
  }
  std::vector<Eigen::VectorXd> samples(count, Eigen::VectorXd(n));
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < n; ++i)
      samples[k][i] = lo[i] + (perms[i][k] + 0.5) * (hi[i] - lo[i]) / count;
  return samples;
}

DiagnosticsReport check_uniqueness(const Scenario& s, const std::vector<GameState>& samples) {
  const int n = s.player_count();
  std::vector<GameState> states = samples;
  if (states.empty()) {
    for (const auto& x : interior_samples(s, 100))
      states.push_back({x, Eigen::VectorXd::Zero(n)});
  }

  double min_eig = std::numeric_limits<double>::infinity();
  int argmin = -1;
  for (int k = 0; k < static_cast<int>(states.size()); ++k) {
    const Eigen::MatrixXd G = pseudo_gradient_jacobian(s, states[k]);
    const Eigen::MatrixXd S = G + G.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
      throw NumericalError("eigenvalue computation failed at sample " + std::to_string(k));
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < min_eig) {
      min_eig = lo;
      argmin = k;
    }
  }

  DiagnosticsReport report;
  report.metrics["min_eigenvalue"] = min_eig;
  report.metrics["argmin_sample"] = static_cast<double>(argmin);
  std::ostringstream os;
  bool passed = false;
  if (min_eig < -kEigenvalueZeroTol) {
    os << "indefinite at sample " << argmin << " (min eigenvalue " << min_eig << ")";
  } else if (min_eig <= kEigenvalueZeroTol) {
    os << "inconclusive (PSD, not PD) at sample " << argmin << " (min eigenvalue " << min_eig
       << ")";
  } else {
    os << "PD at all " << states.size() << " samples (min eigenvalue " << min_eig
       << " at sample " << argmin << ")";
    passed = true;
  }
  report.checks.push_back({"pseudo-gradient Jacobian positive definite", passed, os.str()});
  return report;
}

}  // namespace riskmech

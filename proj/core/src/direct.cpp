#include "riskmech/direct.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

namespace riskmech {

namespace {

Eigen::VectorXd welfare_prices(const Scenario& s, double lambda) {
  const int n = s.player_count();
  const Eigen::VectorXd beta = s.cost_factors();
  if (s.influence.is_identity()) return beta / (1.0 + lambda);
  const Eigen::MatrixXd wt = s.influence.entries().transpose();
  Eigen::MatrixXd lhs = wt + lambda * Eigen::MatrixXd::Identity(n, n);
  return lhs.partialPivLu().solve(wt * beta);
}

Eigen::VectorXd global_prices(const Scenario& s, double lambda) {
  return s.objective.weights / lambda;
}

// Equilibrium investments under prices p: u_i'((W x)_i) = cost_factor_i - p_i.
Eigen::VectorXd induced_investment(const Scenario& s, const Eigen::VectorXd& p) {
  const int n = s.player_count();
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i)
    targets[i] = s.players[i].utility.inverse_marginal(s.players[i].cost_factor - p[i]);
  if (s.influence.is_identity()) return targets;
  return s.influence.entries().partialPivLu().solve(targets);
}

double welfare_value(const Scenario& s, const Eigen::VectorXd& x) {
  const Eigen::VectorXd eff = effective_investment(s.influence, x);
  double total = 0.0;
  for (int i = 0; i < s.player_count(); ++i) total += s.players[i].utility.value(eff[i]);
  return total;
}

MechanismSolution assemble(const Scenario& s, double lambda, const Eigen::VectorXd& p) {
  MechanismSolution sol;
  sol.lambda = lambda;
  sol.incentive = p;
  sol.investment = induced_investment(s, p);
  for (int i = 0; i < s.player_count(); ++i)
    if (!(sol.investment[i] >= kMinInvestment))
      throw InfeasibleError("no interior equilibrium under the aligned incentives (x_" +
                            std::to_string(i + 1) + " nonpositive)");
  sol.budget_spend = sol.incentive.dot(sol.investment);
  sol.objective_value = s.objective.kind == ObjectiveKind::LinearGlobal
                            ? s.objective.weights.dot(sol.investment)
                            : welfare_value(s, sol.investment);
  return sol;
}

using PriceRule = std::function<Eigen::VectorXd(double)>;

std::optional<double> try_residual(const Scenario& s, const PriceRule& prices, double lambda) {
  try {
    const Eigen::VectorXd p = prices(lambda);
    return p.dot(induced_investment(s, p)) - s.budget;
  } catch (const MarginalRangeError&) {
    return std::nullopt;
  }
}

}  // namespace

MechanismSolution solve_m2(const Scenario& s, double tol) {
  if (s.objective.kind != ObjectiveKind::LinearGlobal)
    throw UnsupportedModelError("global alignment needs a linear_global objective");
  const int n = s.player_count();

  // prices stay below the cost factors: lambda >= weight_i / (0.99 * cost_factor_i)
  double lo = 0.0;
  for (int i = 0; i < n; ++i)
    lo = std::max(lo, s.objective.weights[i] / (0.99 * s.players[i].cost_factor));
  double hi = 1e6;

  PriceRule prices = [&s](double lam) { return global_prices(s, lam); };
  auto r_lo = try_residual(s, prices, lo);
  if (!r_lo || *r_lo < 0.0)
    throw InfeasibleError("budget unreachable: spend below budget at the price cap");
  auto r_hi = try_residual(s, prices, hi);
  while ((!r_hi || *r_hi > 0.0) && hi < 1e12) {
    hi *= 10.0;
    r_hi = try_residual(s, prices, hi);
  }
  if (!r_hi || *r_hi > 0.0)
    throw InfeasibleError("budget residual keeps one sign; no balanced multiplier");

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    mid = 0.5 * (lo + hi);
    const auto r = try_residual(s, prices, mid);
    if (!r) {
      lo = mid;  // unevaluable only toward small lambda (prices at the cap)
      continue;
    }
    if (std::abs(*r) < tol) break;
    (*r > 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-16 * std::max(1.0, mid)) break;
  }
  return assemble(s, mid, prices(mid));
}

MechanismSolution solve_m1(const Scenario& s, double tol) {
  if (s.objective.kind != ObjectiveKind::Welfare)
    throw UnsupportedModelError("welfare alignment needs a welfare objective");

  if (s.influence.is_identity() && s.all_log()) {
    // budget spend is sum_i weight_i / lambda independent of cost factors
    const double lambda = s.log_weights().sum() / s.budget;
    return assemble(s, lambda, welfare_prices(s, lambda));
  }

  PriceRule prices = [&s](double lam) { return welfare_prices(s, lam); };
  double lo = 1e-8, hi = 1e8;
  auto r_hi = try_residual(s, prices, hi);
  while (!r_hi && hi > 1e-6) {  // shrink past marginal-range failures
    hi *= 0.5;
    r_hi = try_residual(s, prices, hi);
  }
  auto r_lo = try_residual(s, prices, lo);
  while ((!r_lo || *r_lo < 0.0) && lo > 1e-14) {
    lo *= 0.1;
    r_lo = try_residual(s, prices, lo);
  }
  if (!r_lo || !r_hi || *r_lo < 0.0 || *r_hi > 0.0)
    throw InfeasibleError("budget residual keeps one sign; no balanced multiplier");

  // Newton on the scalar budget residual, bisection whenever the step leaves
  // the bracket or an evaluation fails
  double lambda = s.all_log() ? s.log_weights().sum() / s.budget : 0.5 * (lo + hi);
  lambda = std::min(std::max(lambda, lo), hi);
  double r_cur = *try_residual(s, prices, lambda);
  for (int it = 0; it < 200 && std::abs(r_cur) >= tol; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(lambda));
    const auto r_plus = try_residual(s, prices, lambda + h);
    const auto r_minus = try_residual(s, prices, lambda - h);
    double next = std::numeric_limits<double>::quiet_NaN();
    if (r_plus && r_minus) {
      const double slope = (*r_plus - *r_minus) / (2.0 * h);
      if (slope != 0.0) next = lambda - r_cur / slope;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const auto r_next = try_residual(s, prices, next);
    if (!r_next) {
      hi = next;
      continue;
    }
    (r_cur > 0.0 ? lo : hi) = lambda;
    lambda = next;
    r_cur = *r_next;
    if (hi - lo < 1e-16 * std::max(1.0, lambda)) break;
  }
  if (std::abs(r_cur) >= std::max(tol, 1e-8))
    throw ConvergenceError("budget residual did not close", r_cur);
  return assemble(s, lambda, prices(lambda));
}

MisreportOutcome misreport_gain(const Scenario& s, int player, double report_scale) {
  if (player < 0 || player >= s.player_count())
    throw DimensionError("player index " + std::to_string(player) + " out of range");
  if (!(report_scale > 0.0))
    throw PreconditionError("report scale must be positive");

  const auto solve = [](const Scenario& sc) {
    return sc.objective.kind == ObjectiveKind::Welfare ? solve_m1(sc) : solve_m2(sc);
  };

  const MechanismSolution honest = solve(s);

  Scenario reported = s;
  reported.players[player].utility = s.players[player].utility.scaled(report_scale);
  const MechanismSolution manipulated = solve(reported);

  // realized play: everyone best-responds truthfully to the announced prices
  const Eigen::VectorXd x_honest = solve_ne(s, honest.incentive);
  const Eigen::VectorXd x_lied = solve_ne(s, manipulated.incentive);

  MisreportOutcome out;
  out.cost_truthful = player_cost(s, {x_honest, honest.incentive}, player);
  out.cost_misreport = player_cost(s, {x_lied, manipulated.incentive}, player);
  out.advantage = out.cost_truthful - out.cost_misreport;
  return out;
}

}  // namespace riskmech

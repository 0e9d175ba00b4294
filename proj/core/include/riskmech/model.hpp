#pragma once

// Scenario data model: players with concave investment utilities, an influence
// matrix coupling their effective investments, and a designer objective with a
// budget for incentive payments.

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riskmech/errors.hpp"

namespace riskmech {

// Investments below this are treated as the boundary of the feasible region.
inline constexpr double kMinInvestment = 1e-9;

enum class UtilityFamily { Log, Power, Quadratic };

// Strictly increasing, strictly concave utility of (effective) investment.
//   Log:       u(x) = weight * ln(x),              x > 0
//   Power:     u(x) = weight * x^exponent,         x > 0, 0 < exponent < 1
//   Quadratic: u(x) = slope*x - curvature*x^2/2,   0 <= x < slope/curvature
class UtilityFunction {
 public:
  static UtilityFunction log_weighted(double weight);
  static UtilityFunction power(double weight, double exponent);
  static UtilityFunction quadratic(double slope, double curvature);

  UtilityFamily family() const { return family_; }
  double weight() const { return a_; }     // Log/Power weight, Quadratic slope
  double exponent() const { return b_; }   // Power only
  double curvature() const { return b_; }  // Quadratic only

  double value(double x) const;
  double marginal(double x) const;
  // Preimage of a marginal value; the marginal is strictly decreasing, so the
  // preimage is unique where it exists.
  double inverse_marginal(double m) const;

  bool in_domain(double x) const;
  // Least upper bound of the domain (+inf for Log/Power, slope/curvature for
  // Quadratic).
  double domain_sup() const;

  // The same utility scaled by a positive factor (weight and, for Quadratic,
  // curvature are both scaled so the whole function is multiplied by c).
  UtilityFunction scaled(double c) const;

  bool valid() const;  // parameter ranges above
  friend bool operator==(const UtilityFunction&, const UtilityFunction&) = default;

 private:
  UtilityFunction(UtilityFamily f, double a, double b) : family_(f), a_(a), b_(b) {}
  UtilityFamily family_;
  double a_;
  double b_;
};

struct PlayerSpec {
  int id = 0;  // 1-based, stable across a scenario
  UtilityFunction utility = UtilityFunction::log_weighted(1.0);
  double cost_factor = 1.0;  // marginal investment cost, > 0

  friend bool operator==(const PlayerSpec&, const PlayerSpec&) = default;
};

// Row-stochastic-like coupling of investments: effective investment is W*x.
// Valid matrices have unit diagonal and off-diagonal entries in [0, 1].
class InfluenceMatrix {
 public:
  static InfluenceMatrix identity(int n);
  explicit InfluenceMatrix(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }
  bool is_identity() const;

  friend bool operator==(const InfluenceMatrix& a, const InfluenceMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Eigen::MatrixXd entries_;
};

enum class ObjectiveKind { Welfare, LinearGlobal };

// What the designer maximizes: the sum of player utilities, or a positively
// weighted sum of raw investments.
struct DesignerObjective {
  ObjectiveKind kind = ObjectiveKind::Welfare;
  Eigen::VectorXd weights;  // LinearGlobal only, one positive weight per player

  static DesignerObjective welfare() { return {ObjectiveKind::Welfare, {}}; }
  static DesignerObjective linear_global(Eigen::VectorXd w) {
    return {ObjectiveKind::LinearGlobal, std::move(w)};
  }
  static DesignerObjective linear_global(std::initializer_list<double> w) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (double entry : w) v[i++] = entry;
    return {ObjectiveKind::LinearGlobal, std::move(v)};
  }

  friend bool operator==(const DesignerObjective& a, const DesignerObjective& b) {
    return a.kind == b.kind && a.weights == b.weights;
  }
};

struct Scenario {
  std::string id = "scenario";
  std::vector<PlayerSpec> players;
  InfluenceMatrix influence = InfluenceMatrix::identity(0);
  DesignerObjective objective = DesignerObjective::welfare();
  double budget = 0.0;
  std::optional<double> success_threshold;
  // Optional starting point for iterative mechanisms and flows.
  std::optional<Eigen::VectorXd> initial_investment;
  std::optional<Eigen::VectorXd> initial_incentive;

  int player_count() const { return static_cast<int>(players.size()); }
  Eigen::VectorXd cost_factors() const;
  bool all_log() const;
  // Log weights, one per player; UnsupportedModelError unless all_log().
  Eigen::VectorXd log_weights() const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.id == b.id && a.players == b.players && a.influence == b.influence &&
           a.objective == b.objective && a.budget == b.budget &&
           a.success_threshold == b.success_threshold &&
           a.initial_investment == b.initial_investment &&
           a.initial_incentive == b.initial_incentive;
  }
};

Eigen::VectorXd effective_investment(const InfluenceMatrix& influence,
                                     const Eigen::VectorXd& investment);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;
  std::map<std::string, double> metrics;

  bool all_passed() const;
  const CheckResult* first_failure() const;
};

// Structural and range checks for a scenario; every check is reported, the
// first failing one first in failure summaries.
DiagnosticsReport validate_scenario(const Scenario& s);

}  // namespace riskmech

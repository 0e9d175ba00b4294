#include "riskmech/model.hpp"

#include <cmath>
#include <sstream>

namespace riskmech {

UtilityFunction UtilityFunction::log_weighted(double weight) {
  return {UtilityFamily::Log, weight, 0.0};
}

UtilityFunction UtilityFunction::power(double weight, double exponent) {
  return {UtilityFamily::Power, weight, exponent};
}

UtilityFunction UtilityFunction::quadratic(double slope, double curvature) {
  return {UtilityFamily::Quadratic, slope, curvature};
}

bool UtilityFunction::valid() const {
  switch (family_) {
    case UtilityFamily::Log:
      return a_ > 0.0;
    case UtilityFamily::Power:
      return a_ > 0.0 && b_ > 0.0 && b_ < 1.0;
    case UtilityFamily::Quadratic:
      return a_ > 0.0 && b_ > 0.0;
  }
  return false;
}

bool UtilityFunction::in_domain(double x) const {
  switch (family_) {
    case UtilityFamily::Log:
    case UtilityFamily::Power:
      return x > 0.0;
    case UtilityFamily::Quadratic:
      return x >= 0.0 && x < a_ / b_;
  }
  return false;
}

double UtilityFunction::domain_sup() const {
  if (family_ == UtilityFamily::Quadratic) return a_ / b_;
  return std::numeric_limits<double>::infinity();
}

namespace {

[[noreturn]] void domain_failure(double x) {
  std::ostringstream os;
  os << "investment " << x << " outside the utility domain";
  throw DomainError(os.str());
}

}  // namespace

double UtilityFunction::value(double x) const {
  if (!in_domain(x)) domain_failure(x);
  switch (family_) {
    case UtilityFamily::Log:
      return a_ * std::log(x);
    case UtilityFamily::Power:
      return a_ * std::pow(x, b_);
    case UtilityFamily::Quadratic:
      return a_ * x - 0.5 * b_ * x * x;
  }
  return 0.0;
}

double UtilityFunction::marginal(double x) const {
  if (!in_domain(x)) domain_failure(x);
  switch (family_) {
    case UtilityFamily::Log:
      return a_ / x;
    case UtilityFamily::Power:
      return a_ * b_ * std::pow(x, b_ - 1.0);
    case UtilityFamily::Quadratic:
      return a_ - b_ * x;
  }
  return 0.0;
}

double UtilityFunction::inverse_marginal(double m) const {
  if (!(m > 0.0)) {
    std::ostringstream os;
    os << "marginal value " << m << " not attained (must be positive)";
    throw MarginalRangeError(os.str());
  }
  switch (family_) {
    case UtilityFamily::Log:
      return a_ / m;
    case UtilityFamily::Power:
      return std::pow(m / (a_ * b_), 1.0 / (b_ - 1.0));
    case UtilityFamily::Quadratic:
      // marginal ranges over (0, slope] on [0, slope/curvature)
      if (m > a_) {
        std::ostringstream os;
        os << "marginal value " << m << " exceeds the maximum marginal " << a_;
        throw MarginalRangeError(os.str());
      }
      return (a_ - m) / b_;
  }
  return 0.0;
}

UtilityFunction UtilityFunction::scaled(double c) const {
  if (family_ == UtilityFamily::Quadratic) return {family_, a_ * c, b_ * c};
  return {family_, a_ * c, b_};
}

InfluenceMatrix InfluenceMatrix::identity(int n) {
  return InfluenceMatrix(Eigen::MatrixXd::Identity(n, n));
}

InfluenceMatrix::InfluenceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    std::ostringstream os;
    os << "influence matrix must be square, got " << entries_.rows() << "x"
       << entries_.cols();
    throw DimensionError(os.str());
  }
}

bool InfluenceMatrix::is_identity() const {
  return entries_ == Eigen::MatrixXd::Identity(entries_.rows(), entries_.cols());
}

Eigen::VectorXd Scenario::cost_factors() const {
  Eigen::VectorXd beta(player_count());
  for (int i = 0; i < player_count(); ++i) beta[i] = players[i].cost_factor;
  return beta;
}

bool Scenario::all_log() const {
  for (const auto& pl : players)
    if (pl.utility.family() != UtilityFamily::Log) return false;
  return true;
}

Eigen::VectorXd Scenario::log_weights() const {
  if (!all_log())
    throw UnsupportedModelError("scenario mixes utility families; Log weights undefined");
  Eigen::VectorXd w(player_count());
  for (int i = 0; i < player_count(); ++i) w[i] = players[i].utility.weight();
  return w;
}

Eigen::VectorXd effective_investment(const InfluenceMatrix& influence,
                                     const Eigen::VectorXd& investment) {
  if (influence.size() != investment.size()) {
    std::ostringstream os;
    os << "influence is " << influence.size() << "x" << influence.size()
       << " but investment has " << investment.size() << " entries";
    throw DimensionError(os.str());
  }
  return influence.entries() * investment;
}

bool DiagnosticsReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const CheckResult* DiagnosticsReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

namespace {

std::string utility_check_detail(const PlayerSpec& pl) {
  std::ostringstream os;
  switch (pl.utility.family()) {
    case UtilityFamily::Log:
      os << "player " << pl.id << ": log weight > 0 required, got " << pl.utility.weight();
      break;
    case UtilityFamily::Power:
      os << "player " << pl.id << ": power weight > 0 and exponent in (0,1) required, got "
         << pl.utility.weight() << ", " << pl.utility.exponent();
      break;
    case UtilityFamily::Quadratic:
      os << "player " << pl.id << ": quadratic slope and curvature > 0 required, got "
         << pl.utility.weight() << ", " << pl.utility.curvature();
      break;
  }
  return os.str();
}

}  // namespace

DiagnosticsReport validate_scenario(const Scenario& s) {
  DiagnosticsReport report;
  auto add = [&report](const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
  };

  const int n = s.player_count();
  add("players nonempty", n > 0, n > 0 ? "" : "scenario has no players");

  bool costs_ok = true;
  std::string cost_detail;
  bool params_ok = true;
  std::string param_detail;
  for (const auto& pl : s.players) {
    if (costs_ok && !(pl.cost_factor > 0.0)) {
      costs_ok = false;
      std::ostringstream os;
      os << "player " << pl.id << ": cost_factor > 0 required, got " << pl.cost_factor;
      cost_detail = os.str();
    }
    if (params_ok && !pl.utility.valid()) {
      params_ok = false;
      param_detail = utility_check_detail(pl);
    }
  }
  add("cost_factor > 0", costs_ok, cost_detail);
  add("utility parameters in range", params_ok, param_detail);

  const auto& w = s.influence;
  bool dims_ok = w.size() == n;
  add("influence dimension equals player count", dims_ok,
      dims_ok ? ""
              : "influence is " + std::to_string(w.size()) + "x" + std::to_string(w.size()) +
                    " for " + std::to_string(n) + " players");
  bool diag_ok = true;
  bool offdiag_ok = true;
  std::string diag_detail, offdiag_detail;
  if (dims_ok) {
    for (int i = 0; i < n && (diag_ok || offdiag_ok); ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = w(i, j);
        if (i == j && diag_ok && v != 1.0) {
          diag_ok = false;
          std::ostringstream os;
          os << "diagonal must be 1, got W(" << i + 1 << "," << i + 1 << ") = " << v;
          diag_detail = os.str();
        }
        if (i != j && offdiag_ok && !(v >= 0.0 && v <= 1.0)) {
          offdiag_ok = false;
          std::ostringstream os;
          os << "off-diagonal in [0,1] required, got W(" << i + 1 << "," << j + 1
             << ") = " << v;
          offdiag_detail = os.str();
        }
      }
    }
  }
  add("influence diagonal is 1", diag_ok, diag_detail);
  add("influence off-diagonal in [0,1]", offdiag_ok, offdiag_detail);

  if (s.objective.kind == ObjectiveKind::LinearGlobal) {
    const bool len_ok = s.objective.weights.size() == n;
    add("objective weights length equals player count", len_ok,
        len_ok ? ""
               : "gamma length != N (" + std::to_string(s.objective.weights.size()) +
                     " != " + std::to_string(n) + ")");
    bool pos_ok = true;
    std::string pos_detail;
    if (len_ok) {
      for (int i = 0; i < n; ++i) {
        if (!(s.objective.weights[i] > 0.0)) {
          pos_ok = false;
          std::ostringstream os;
          os << "gamma_" << i + 1 << " > 0 required, got " << s.objective.weights[i];
          pos_detail = os.str();
          break;
        }
      }
    }
    add("objective weights strictly positive", pos_ok, pos_detail);
  }

  add("budget > 0", s.budget > 0.0,
      s.budget > 0.0 ? "" : "budget must be positive, got " + std::to_string(s.budget));

  if (s.initial_investment) {
    const bool ok = s.initial_investment->size() == n;
    add("initial investment length equals player count", ok,
        ok ? "" : "initial x has " + std::to_string(s.initial_investment->size()) + " entries");
  }
  if (s.initial_incentive) {
    const bool ok = s.initial_incentive->size() == n;
    add("initial incentive length equals player count", ok,
        ok ? "" : "initial p has " + std::to_string(s.initial_incentive->size()) + " entries");
  }

  return report;
}

}  // namespace riskmech

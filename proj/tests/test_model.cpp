#include <doctest.h>

#include <cmath>

#include "riskmech/model.hpp"

using namespace riskmech;

namespace {

Scenario two_player_scenario() {
  Scenario s;
  s.id = "pair";
  s.players = {{1, UtilityFunction::log_weighted(0.9), 3.0},
               {2, UtilityFunction::log_weighted(0.4), 2.5}};
  s.influence = InfluenceMatrix::identity(2);
  Eigen::VectorXd g(2);
  g << 1.0, 0.5;
  s.objective = DesignerObjective::linear_global(g);
  s.budget = 1.0;
  return s;
}

}  // namespace

TEST_CASE("log utility evaluates its closed forms") {
  const UtilityFunction u = UtilityFunction::log_weighted(0.9);
  CHECK(u.family() == UtilityFamily::Log);
  CHECK(u.value(0.5) == doctest::Approx(-0.62383246250395078).epsilon(1e-15));
  CHECK(u.marginal(0.5) == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(u.inverse_marginal(1.8) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.marginal(u.inverse_marginal(0.37)) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(u.domain_sup() == std::numeric_limits<double>::infinity());
  CHECK_FALSE(u.in_domain(0.0));
  CHECK(u.in_domain(1e-12));
}

TEST_CASE("power utility evaluates its closed forms") {
  const UtilityFunction u = UtilityFunction::power(0.7, 0.5);
  CHECK(u.value(4.0) == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(u.marginal(4.0) == doctest::Approx(0.7 * 0.5 / 2.0).epsilon(1e-15));
  CHECK(u.inverse_marginal(u.marginal(4.0)) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(u.weight() == 0.7);
  CHECK(u.exponent() == 0.5);
}

TEST_CASE("quadratic utility evaluates its closed forms and bounded domain") {
  const UtilityFunction u = UtilityFunction::quadratic(2.0, 1.0);
  CHECK(u.value(1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(u.marginal(0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(u.inverse_marginal(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.domain_sup() == doctest::Approx(2.0));
  CHECK(u.in_domain(0.0));
  CHECK_FALSE(u.in_domain(2.0));
  CHECK_THROWS_AS((void)u.value(2.5), DomainError);
  CHECK_THROWS_AS((void)u.marginal(-0.1), DomainError);
}

TEST_CASE("marginal preimages outside the attained range are rejected") {
  CHECK_THROWS_AS((void)UtilityFunction::log_weighted(1.0).inverse_marginal(0.0),
                  MarginalRangeError);
  CHECK_THROWS_AS((void)UtilityFunction::log_weighted(1.0).inverse_marginal(-2.0),
                  MarginalRangeError);
  CHECK_THROWS_AS((void)UtilityFunction::quadratic(2.0, 1.0).inverse_marginal(2.5),
                  MarginalRangeError);
}

TEST_CASE("scaling multiplies the whole utility by the factor") {
  const UtilityFunction log_scaled = UtilityFunction::log_weighted(0.9).scaled(0.5);
  CHECK(log_scaled == UtilityFunction::log_weighted(0.45));

  const UtilityFunction quad = UtilityFunction::quadratic(2.0, 1.0);
  const UtilityFunction quad_scaled = quad.scaled(3.0);
  for (const double x : {0.1, 0.7, 1.5})
    CHECK(quad_scaled.value(x) == doctest::Approx(3.0 * quad.value(x)).epsilon(1e-14));
  CHECK(quad_scaled.domain_sup() == doctest::Approx(quad.domain_sup()));

  const UtilityFunction pow_scaled = UtilityFunction::power(0.7, 0.5).scaled(2.0);
  CHECK(pow_scaled.value(4.0) == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(pow_scaled.exponent() == 0.5);
}

TEST_CASE("parameter validity per family") {
  CHECK(UtilityFunction::log_weighted(0.1).valid());
  CHECK_FALSE(UtilityFunction::log_weighted(0.0).valid());
  CHECK(UtilityFunction::power(1.0, 0.5).valid());
  CHECK_FALSE(UtilityFunction::power(1.0, 1.0).valid());
  CHECK_FALSE(UtilityFunction::power(-1.0, 0.5).valid());
  CHECK(UtilityFunction::quadratic(2.0, 1.0).valid());
  CHECK_FALSE(UtilityFunction::quadratic(2.0, 0.0).valid());
}

TEST_CASE("influence matrices must be square and know when they are trivial") {
  CHECK(InfluenceMatrix::identity(3).is_identity());
  CHECK_THROWS_AS(InfluenceMatrix(Eigen::MatrixXd::Ones(2, 3)), DimensionError);

  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  w(0, 1) = 0.25;
  const InfluenceMatrix coupled(w);
  CHECK_FALSE(coupled.is_identity());
  CHECK(coupled(0, 1) == 0.25);
  CHECK(coupled.size() == 2);
}

TEST_CASE("effective investment applies the coupling") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  w(0, 1) = 0.5;
  w(1, 0) = 0.2;
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  const Eigen::VectorXd eff = effective_investment(InfluenceMatrix(w), x);
  CHECK(eff[0] == doctest::Approx(2.0));
  CHECK(eff[1] == doctest::Approx(2.2));
  CHECK_THROWS_AS(effective_investment(InfluenceMatrix::identity(3), x), DimensionError);
}

TEST_CASE("scenario helpers expose per-player vectors") {
  Scenario s = two_player_scenario();
  CHECK(s.player_count() == 2);
  CHECK(s.cost_factors()[1] == doctest::Approx(2.5));
  CHECK(s.all_log());
  CHECK(s.log_weights()[0] == doctest::Approx(0.9));

  s.players[1].utility = UtilityFunction::quadratic(4.0, 1.0);
  CHECK_FALSE(s.all_log());
  CHECK_THROWS_AS((void)s.log_weights(), UnsupportedModelError);
}

TEST_CASE("a well-formed scenario passes every validation check") {
  const DiagnosticsReport report = validate_scenario(two_player_scenario());
  CHECK(report.all_passed());
  CHECK(report.first_failure() == nullptr);
  CHECK(report.checks.size() >= 7);
}

TEST_CASE("validation pinpoints the broken field") {
  SUBCASE("no players") {
    Scenario s = two_player_scenario();
    s.players.clear();
    s.influence = InfluenceMatrix::identity(0);
    s.objective = DesignerObjective::linear_global(Eigen::VectorXd(0));
    const DiagnosticsReport report = validate_scenario(s);
    CHECK_FALSE(report.all_passed());
    CHECK(report.first_failure()->name == "players nonempty");
  }
  SUBCASE("nonpositive cost factor") {
    Scenario s = two_player_scenario();
    s.players[1].cost_factor = 0.0;
    CHECK(validate_scenario(s).first_failure()->name == "cost_factor > 0");
  }
  SUBCASE("utility parameters out of range") {
    Scenario s = two_player_scenario();
    s.players[0].utility = UtilityFunction::log_weighted(-1.0);
    const DiagnosticsReport report = validate_scenario(s);
    const CheckResult* failure = report.first_failure();
    CHECK(failure->name == "utility parameters in range");
    CHECK(failure->detail.find("player 1") != std::string::npos);
  }
  SUBCASE("influence size mismatch") {
    Scenario s = two_player_scenario();
    s.influence = InfluenceMatrix::identity(3);
    CHECK(validate_scenario(s).first_failure()->name ==
          "influence dimension equals player count");
  }
  SUBCASE("influence diagonal not one") {
    Scenario s = two_player_scenario();
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
    w(1, 1) = 0.9;
    s.influence = InfluenceMatrix(w);
    const DiagnosticsReport report = validate_scenario(s);
    const CheckResult* failure = report.first_failure();
    CHECK(failure->name == "influence diagonal is 1");
    CHECK(failure->detail.find("W(2,2)") != std::string::npos);
  }
  SUBCASE("influence off-diagonal outside [0,1]") {
    Scenario s = two_player_scenario();
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
    w(0, 1) = 1.5;
    s.influence = InfluenceMatrix(w);
    CHECK(validate_scenario(s).first_failure()->name == "influence off-diagonal in [0,1]");
  }
  SUBCASE("objective weight length mismatch") {
    Scenario s = two_player_scenario();
    s.objective = DesignerObjective::linear_global(Eigen::VectorXd::Ones(3));
    const DiagnosticsReport report = validate_scenario(s);
    const CheckResult* failure = report.first_failure();
    CHECK(failure->name == "objective weights length equals player count");
    CHECK(failure->detail.find("gamma length != N") != std::string::npos);
  }
  SUBCASE("objective weight nonpositive") {
    Scenario s = two_player_scenario();
    Eigen::VectorXd g(2);
    g << 1.0, 0.0;
    s.objective = DesignerObjective::linear_global(g);
    CHECK(validate_scenario(s).first_failure()->name ==
          "objective weights strictly positive");
  }
  SUBCASE("nonpositive budget") {
    Scenario s = two_player_scenario();
    s.budget = -1.0;
    CHECK(validate_scenario(s).first_failure()->name == "budget > 0");
  }
  SUBCASE("initial vector lengths") {
    Scenario s = two_player_scenario();
    s.initial_investment = Eigen::VectorXd::Ones(3);
    CHECK(validate_scenario(s).first_failure()->name ==
          "initial investment length equals player count");
    s.initial_investment.reset();
    s.initial_incentive = Eigen::VectorXd::Ones(1);
    CHECK(validate_scenario(s).first_failure()->name ==
          "initial incentive length equals player count");
  }
}

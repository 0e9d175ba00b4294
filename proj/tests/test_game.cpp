#include <doctest.h>

#include <cmath>

#include "riskmech/game.hpp"
#include "riskmech/scenario_io.hpp"

using namespace riskmech;

namespace {

Scenario coupled_pair(double w12, double w21, double a1 = 0.9, double a2 = 0.4) {
  Scenario s;
  s.id = "coupled_pair";
  s.players = {{1, UtilityFunction::log_weighted(a1), 3.0},
               {2, UtilityFunction::log_weighted(a2), 3.0}};
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  w(0, 1) = w12;
  w(1, 0) = w21;
  s.influence = InfluenceMatrix(w);
  s.objective = DesignerObjective::welfare();
  s.budget = 1.0;
  return s;
}

}  // namespace

TEST_CASE("player cost combines investment cost, utility, and the rebate") {
  const Scenario s = paper_scenario();
  const GameState state{Eigen::VectorXd::Constant(6, 0.5), Eigen::VectorXd::Constant(6, 0.3)};
  CHECK(player_cost(s, state, 0) ==
        doctest::Approx(3.0 * 0.5 - 0.9 * std::log(0.5) - 0.3 * 0.5).epsilon(1e-15));
  CHECK(player_cost(s, state, 4) ==
        doctest::Approx(3.0 * 0.5 - 0.2 * std::log(0.5) - 0.3 * 0.5).epsilon(1e-15));
}

TEST_CASE("coupled players enjoy their neighbors' investments") {
  const Scenario s = coupled_pair(0.5, 0.2);
  Eigen::VectorXd x(2), p(2);
  x << 1.0, 2.0;
  p << 0.0, 0.0;
  CHECK(player_cost(s, {x, p}, 0) ==
        doctest::Approx(3.0 * 1.0 - 0.9 * std::log(1.0 + 0.5 * 2.0)).epsilon(1e-14));
}

TEST_CASE("state and player index bounds are enforced") {
  const Scenario s = coupled_pair(0.1, 0.1);
  const GameState bad{Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS((void)player_cost(s, bad, 0), DimensionError);
  const GameState good{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS((void)player_cost(s, good, 2), DimensionError);
  CHECK_THROWS_AS((void)best_response(s, good, -1), DimensionError);
  CHECK_THROWS_AS((void)solve_ne(s, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("best response solves the single-player stationarity") {
  const Scenario s = paper_scenario();
  const GameState state{Eigen::VectorXd::Constant(6, 0.5), Eigen::VectorXd::Constant(6, 0.3)};
  CHECK(best_response(s, state, 0) == doctest::Approx(0.9 / 2.7).epsilon(1e-15));

  const Scenario c = coupled_pair(0.5, 0.2);
  Eigen::VectorXd x(2), p(2);
  x << 0.0, 1.0;
  p << 0.0, 0.0;
  // target effective investment 0.9/3 = 0.3, neighbor already supplies 0.5
  CHECK(best_response(c, {x, p}, 0) == doctest::Approx(kMinInvestment));
  x << 0.0, 0.2;
  CHECK(best_response(c, {x, p}, 0) == doctest::Approx(0.3 - 0.1).epsilon(1e-14));
}

TEST_CASE("decoupled equilibria come out in closed form") {
  const Scenario s = paper_scenario();
  const Eigen::VectorXd x = solve_ne(s, Eigen::VectorXd::Zero(6));
  const double alpha[] = {0.9, 0.7, 0.6, 0.8, 0.2, 0.4};
  for (int i = 0; i < 6; ++i) CHECK(x[i] == alpha[i] / 3.0);

  const Eigen::VectorXd xp = solve_ne(s, Eigen::VectorXd::Constant(6, 0.3));
  for (int i = 0; i < 6; ++i) CHECK(xp[i] == doctest::Approx(alpha[i] / 2.7).epsilon(1e-15));
}

TEST_CASE("coupled equilibria are mutual best responses with zero pseudo-gradient") {
  const Scenario s = coupled_pair(0.4, 0.3);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(2, 0.2);
  const Eigen::VectorXd x = solve_ne(s, p);
  const GameState state{x, p};
  for (int i = 0; i < 2; ++i)
    CHECK(best_response(s, state, i) == doctest::Approx(x[i]).epsilon(1e-9));
  CHECK(pseudo_gradient(s, state).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("pseudo-gradient signs follow the own-cost slope") {
  const Scenario s = paper_scenario();
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 0.05);  // below every equilibrium
  CHECK(pseudo_gradient(s, {x, p}).maxCoeff() < 0.0);
  x.setConstant(2.0);  // above every equilibrium
  CHECK(pseudo_gradient(s, {x, p}).minCoeff() > 0.0);
}

TEST_CASE("analytic Jacobian matches the hand formula for Log couplings") {
  const Scenario s = coupled_pair(0.5, 0.2);
  Eigen::VectorXd x(2);
  x << 0.8, 0.6;
  const GameState state{x, Eigen::VectorXd::Zero(2)};
  const Eigen::MatrixXd g = pseudo_gradient_jacobian(s, state);
  const double e0 = 0.8 + 0.5 * 0.6;
  const double e1 = 0.6 + 0.2 * 0.8;
  CHECK(g(0, 0) == doctest::Approx(0.9 / (e0 * e0)).epsilon(1e-13));
  CHECK(g(0, 1) == doctest::Approx(0.9 * 0.5 / (e0 * e0)).epsilon(1e-13));
  CHECK(g(1, 0) == doctest::Approx(0.4 * 0.2 / (e1 * e1)).epsilon(1e-13));
  CHECK(g(1, 1) == doctest::Approx(0.4 / (e1 * e1)).epsilon(1e-13));
}

TEST_CASE("finite-difference Jacobian recovers the quadratic curvature") {
  Scenario s;
  s.players = {{1, UtilityFunction::quadratic(4.0, 1.5), 3.0},
               {2, UtilityFunction::quadratic(5.0, 2.0), 3.0}};
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  w(0, 1) = 0.3;
  w(1, 0) = 0.6;
  s.influence = InfluenceMatrix(w);
  s.objective = DesignerObjective::welfare();
  s.budget = 1.0;

  Eigen::VectorXd x(2);
  x << 0.5, 0.7;
  const Eigen::MatrixXd g = pseudo_gradient_jacobian(s, {x, Eigen::VectorXd::Zero(2)});
  // -u'' is the curvature, so G_ij = curvature_i * W_ij
  CHECK(g(0, 0) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(g(0, 1) == doctest::Approx(1.5 * 0.3).epsilon(1e-5));
  CHECK(g(1, 0) == doctest::Approx(2.0 * 0.6).epsilon(1e-5));
  CHECK(g(1, 1) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("interior samples are deterministic, in range, and domain-aware") {
  const Scenario s = paper_scenario();
  const auto a = interior_samples(s, 32);
  const auto b = interior_samples(s, 32);
  REQUIRE(a.size() == 32);
  for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  CHECK(interior_samples(s, 32, 7u)[0] != a[0]);
  for (const auto& x : a)
    for (int i = 0; i < 6; ++i) CHECK(x[i] > 0.0);

  Scenario q;
  q.players = {{1, UtilityFunction::quadratic(2.0, 1.0), 3.0}};
  q.influence = InfluenceMatrix::identity(1);
  q.objective = DesignerObjective::welfare();
  q.budget = 1.0;
  for (const auto& x : interior_samples(q, 16)) CHECK(x[0] < 2.0);
}

TEST_CASE("separable Log scenarios certify a unique equilibrium") {
  const DiagnosticsReport report = check_uniqueness(paper_scenario());
  REQUIRE(report.checks.size() == 1);
  CHECK(report.all_passed());
  CHECK(report.checks[0].detail.find("PD at all") != std::string::npos);
  CHECK(report.metrics.at("min_eigenvalue") > kEigenvalueZeroTol);
}

TEST_CASE("fully coupled identical pair sits on the definiteness boundary") {
  const Scenario s = coupled_pair(1.0, 1.0, 0.5, 0.5);
  const DiagnosticsReport report = check_uniqueness(s);
  CHECK_FALSE(report.all_passed());
  CHECK(report.checks[0].detail.find("inconclusive") != std::string::npos);
  CHECK(std::abs(report.metrics.at("min_eigenvalue")) <= kEigenvalueZeroTol);
}

TEST_CASE("fully coupled unequal pair is flagged indefinite") {
  const Scenario s = coupled_pair(1.0, 1.0, 0.9, 0.2);
  const DiagnosticsReport report = check_uniqueness(s);
  CHECK_FALSE(report.all_passed());
  CHECK(report.checks[0].detail.find("indefinite") != std::string::npos);
  CHECK(report.metrics.at("min_eigenvalue") < -kEigenvalueZeroTol);
}

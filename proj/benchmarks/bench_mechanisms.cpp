#include <benchmark/benchmark.h>

#include "riskmech/direct.hpp"
#include "riskmech/dynamics.hpp"
#include "riskmech/game.hpp"
#include "riskmech/iterative.hpp"
#include "riskmech/scenario_io.hpp"

namespace {

riskmech::Scenario coupled_scenario() {
  riskmech::Scenario s = riskmech::paper_scenario();
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) w(i, j) = 0.05 + 0.01 * ((i + 2 * j) % 5);
  s.influence = riskmech::InfluenceMatrix(w);
  s.id = "coupled";
  return s;
}

void BM_SolveNeSeparable(benchmark::State& state) {
  const riskmech::Scenario s = riskmech::paper_scenario();
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(6, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(riskmech::solve_ne(s, p));
}
BENCHMARK(BM_SolveNeSeparable);

void BM_SolveNeCoupled(benchmark::State& state) {
  const riskmech::Scenario s = coupled_scenario();
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(6, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(riskmech::solve_ne(s, p));
}
BENCHMARK(BM_SolveNeCoupled);

void BM_SolveM1(benchmark::State& state) {
  riskmech::Scenario s = riskmech::paper_scenario();
  s.objective = riskmech::DesignerObjective::welfare();
  for (auto _ : state) benchmark::DoNotOptimize(riskmech::solve_m1(s));
}
BENCHMARK(BM_SolveM1);

void BM_SolveM2(benchmark::State& state) {
  const riskmech::Scenario s = riskmech::paper_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(riskmech::solve_m2(s));
}
BENCHMARK(BM_SolveM2);

void BM_RunIm2(benchmark::State& state) {
  const riskmech::Scenario s = riskmech::paper_scenario();
  const riskmech::IterationConfig cfg;
  const Eigen::VectorXd x0 = *s.initial_investment;
  const Eigen::VectorXd p0 = *s.initial_incentive;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        riskmech::run_mechanism(s, cfg, riskmech::Mechanism::IM2, x0, p0));
}
BENCHMARK(BM_RunIm2);

void BM_IntegrateIm2(benchmark::State& state) {
  const riskmech::Scenario s = riskmech::paper_scenario();
  riskmech::OdeConfig cfg;
  cfg.t_end = 1.0;
  riskmech::OdeState init;
  init.investment = *s.initial_investment;
  init.lambda = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(riskmech::integrate(s, riskmech::Mechanism::IM2, init, cfg));
}
BENCHMARK(BM_IntegrateIm2);

void BM_CheckUniqueness(benchmark::State& state) {
  const riskmech::Scenario s = coupled_scenario();
  std::vector<riskmech::GameState> states;
  for (Eigen::VectorXd& x : riskmech::interior_samples(s, 16))
    states.push_back({std::move(x), Eigen::VectorXd::Zero(6)});
  for (auto _ : state) benchmark::DoNotOptimize(riskmech::check_uniqueness(s, states));
}
BENCHMARK(BM_CheckUniqueness);

}  // namespace

BENCHMARK_MAIN();

#pragma once

// Deterministic result formatting: trajectory/solution CSV and run summaries.
// All reals are written with 17 significant digits so repeated runs and
// reloads are byte-identical.

#include <nlohmann/json.hpp>
#include <string>

#include "riskmech/direct.hpp"
#include "riskmech/dynamics.hpp"
#include "riskmech/iterative.hpp"

namespace riskmech {

std::string format_real(double v);

// Header "n,lambda,spend,objective,x_1..x_N,p_1..p_N,cost_1..cost_N", one row
// per recorded round, '\n' line endings, newline-terminated.
std::string trajectory_csv(const Trajectory& traj);

// Single-row variant for direct mechanisms (no round column).
std::string solution_csv(const Scenario& s, const MechanismSolution& sol);

// Header "t,lambda,V_L,x_1..x_N" with the Lyapunov value of the matching flow.
std::string ode_csv(const Scenario& s, Mechanism mech, const OdeTrajectory& traj);

// Keys: converged_at, lambda, x, p, spend, objective, threshold_pass.
// threshold_pass is null without a scenario threshold; converged_at is null
// for unconverged or direct runs.
nlohmann::json run_summary(const Scenario& s, const Trajectory& traj);
nlohmann::json run_summary(const Scenario& s, const MechanismSolution& sol);

std::string probe_csv(const std::vector<ProbeRecord>& records);

}  // namespace riskmech

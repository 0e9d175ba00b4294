#include "riskmech/report.hpp"

#include <charconv>
#include <sstream>

namespace riskmech {

namespace {

void append_player_columns(std::string& header, const char* stem, int n) {
  for (int i = 1; i <= n; ++i) {
    header += ',';
    header += stem;
    header += '_';
    header += std::to_string(i);
  }
}

void append_vector(std::string& row, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    row += ',';
    row += format_real(v[i]);
  }
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json threshold_verdict(const Scenario& s, double objective) {
  if (!s.success_threshold) return nullptr;
  return objective > *s.success_threshold;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

std::string trajectory_csv(const Trajectory& traj) {
  const int n = traj.steps.empty() ? 0 : static_cast<int>(traj.steps.front().investment.size());
  std::string out = "n,lambda,spend,objective";
  append_player_columns(out, "x", n);
  append_player_columns(out, "p", n);
  append_player_columns(out, "cost", n);
  out += '\n';
  for (const StepRecord& rec : traj.steps) {
    out += std::to_string(rec.n);
    out += ',';
    out += format_real(rec.lambda);
    out += ',';
    out += format_real(rec.budget_spend);
    out += ',';
    out += format_real(rec.objective);
    append_vector(out, rec.investment);
    append_vector(out, rec.incentive);
    append_vector(out, rec.player_costs);
    out += '\n';
  }
  return out;
}

std::string solution_csv(const Scenario& s, const MechanismSolution& sol) {
  const int n = s.player_count();
  std::string out = "lambda,spend,objective";
  append_player_columns(out, "x", n);
  append_player_columns(out, "p", n);
  out += '\n';
  out += format_real(sol.lambda);
  out += ',';
  out += format_real(sol.budget_spend);
  out += ',';
  out += format_real(sol.objective_value);
  append_vector(out, sol.investment);
  append_vector(out, sol.incentive);
  out += '\n';
  return out;
}

std::string ode_csv(const Scenario& s, Mechanism mech, const OdeTrajectory& traj) {
  const int n = s.player_count();
  std::string out = "t,lambda,V_L";
  append_player_columns(out, "x", n);
  out += '\n';
  for (const OdeSample& smp : traj.samples) {
    const OdeState state{smp.investment, smp.lambda};
    const double v =
        mech == Mechanism::IM1 ? lyapunov_im1(s, state) : lyapunov_im2(s, state);
    out += format_real(smp.t);
    out += ',';
    out += format_real(smp.lambda);
    out += ',';
    out += format_real(v);
    append_vector(out, smp.investment);
    out += '\n';
  }
  return out;
}

nlohmann::json run_summary(const Scenario& s, const Trajectory& traj) {
  if (traj.steps.empty()) throw PreconditionError("trajectory has no recorded rounds");
  const StepRecord& last = traj.steps.back();
  nlohmann::json out;
  out["converged_at"] =
      traj.converged_at ? nlohmann::json(*traj.converged_at) : nlohmann::json(nullptr);
  out["lambda"] = last.lambda;
  out["x"] = vector_json(last.investment);
  out["p"] = vector_json(last.incentive);
  out["spend"] = last.budget_spend;
  out["objective"] = last.objective;
  out["threshold_pass"] = threshold_verdict(s, last.objective);
  return out;
}

nlohmann::json run_summary(const Scenario& s, const MechanismSolution& sol) {
  nlohmann::json out;
  out["converged_at"] = nullptr;
  out["lambda"] = sol.lambda;
  out["x"] = vector_json(sol.investment);
  out["p"] = vector_json(sol.incentive);
  out["spend"] = sol.budget_spend;
  out["objective"] = sol.objective_value;
  out["threshold_pass"] = threshold_verdict(s, sol.objective_value);
  return out;
}

std::string probe_csv(const std::vector<ProbeRecord>& records) {
  std::string out = "n,cost_honest,cost_deviated,cost_target,cost_target_deviated\n";
  for (const ProbeRecord& rec : records) {
    out += std::to_string(rec.n);
    out += ',';
    out += format_real(rec.cost_honest);
    out += ',';
    out += format_real(rec.cost_deviated);
    out += ',';
    out += format_real(rec.cost_target);
    out += ',';
    out += format_real(rec.cost_target_deviated);
    out += '\n';
  }
  return out;
}

}  // namespace riskmech

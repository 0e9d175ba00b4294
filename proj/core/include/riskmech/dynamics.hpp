#pragma once

// Continuous-time counterparts of the iterative mechanisms for all-Log
// scenarios, with their Lyapunov potentials and an exponential-rate fit.
//
// Writing a_i for the Log weights and b_i for the cost factors:
//   im2 flow:  dlambda/dt = kappa_lambda * (sum_i w_i x_i / lambda - B)
//              dx_i/dt    = kappa_i * (a_i / x_i + w_i / lambda - b_i)
//   im1 flow (identity influence):
//              dlambda/dt = kappa_lambda * (sum_i b_i x_i / (1 + lambda) - B)
//              dx_i/dt    = kappa_i * (a_i / x_i + b_i / (1 + lambda) - b_i)
// The lambda residual is the budget spend under the mechanism's own pricing
// (im2: p_i = w_i / lambda; im1: p_i = b_i / (1 + lambda)), so the rest points
// are exactly the direct-mechanism solutions, and dx_i/dt = -kappa_i dJ_i/dx_i.

#include <Eigen/Dense>
#include <vector>

#include "riskmech/iterative.hpp"
#include "riskmech/model.hpp"

namespace riskmech {

struct OdeState {
  Eigen::VectorXd investment;  // componentwise > 0
  double lambda = 1.0;         // > 0
};

struct OdeConfig {
  double kappa_lambda = 1.0;
  Eigen::VectorXd kappa_x;  // empty: all ones
  double dt = 1e-3;
  double t_end = 50.0;
  int record_every = 10;  // sample every this many steps (plus the endpoints)
};

// Time derivative of the state. UnsupportedModelError unless the scenario is
// all-Log with, for im2, a linear-global objective, and, for im1, an identity
// influence matrix.
OdeState ode_rhs_im2(const Scenario& s, const OdeState& state, const OdeConfig& cfg);
OdeState ode_rhs_im1(const Scenario& s, const OdeState& state, const OdeConfig& cfg);

struct OdeSample {
  double t = 0.0;
  Eigen::VectorXd investment;
  double lambda = 0.0;
};

struct OdeTrajectory {
  std::vector<OdeSample> samples;
};

// Fixed-step classical Runge-Kutta (4th order). IntegrationError when the
// state leaves the interior (x_i <= kMinInvestment or lambda <= 1e-6),
// NumericalError on non-finite values.
OdeTrajectory integrate(const Scenario& s, Mechanism mech, const OdeState& init,
                        const OdeConfig& cfg);

// Lyapunov potential of the matching flow: half the squared lambda residual
// plus half the squared investment stationarity residuals. Zero exactly at the
// direct-mechanism solution.
double lyapunov_im2(const Scenario& s, const OdeState& state);
double lyapunov_im1(const Scenario& s, const OdeState& state);

struct ExponentialFit {
  double alpha = 0.0;  // ||x(t) - x*|| ~ alpha * ||x(0) - x*|| * exp(-beta t)
  double beta = 0.0;
  double r2 = 0.0;
};

// Least squares on ln ||x(t) - x*|| over the samples with distance in
// [1e-8, 0.5 * initial distance]. PreconditionError unless the terminal
// distance is below the initial one; InsufficientDataError below 10 usable
// samples.
ExponentialFit fit_exponential_rate(const OdeTrajectory& traj, const OdeState& target);

}  // namespace riskmech

#include "riskmech/dynamics.hpp"

#include <cmath>

namespace riskmech {

namespace {

void require_flow_support(const Scenario& s, Mechanism mech) {
  if (!s.all_log()) throw UnsupportedModelError("flows are defined for all-Log scenarios");
  if (mech == Mechanism::IM2 && s.objective.kind != ObjectiveKind::LinearGlobal)
    throw UnsupportedModelError("im2 flow prices come from linear_global weights");
  if (mech == Mechanism::IM1 && !s.influence.is_identity())
    throw UnsupportedModelError("im1 flow needs an identity influence matrix");
  if (mech == Mechanism::None) throw UnsupportedModelError("no flow for mechanism none");
}

Eigen::VectorXd flow_prices(const Scenario& s, Mechanism mech, double lambda) {
  if (mech == Mechanism::IM2) return s.objective.weights / lambda;
  return s.cost_factors() / (1.0 + lambda);
}

struct FlowResiduals {
  double budget = 0.0;            // spend under the flow's own pricing minus budget
  Eigen::VectorXd stationarity;   // per-player marginal-cost residual, -dJ_i/dx_i
};

FlowResiduals residuals(const Scenario& s, Mechanism mech, const OdeState& state) {
  const int n = s.player_count();
  const Eigen::VectorXd p = flow_prices(s, mech, state.lambda);
  const Eigen::VectorXd eff = effective_investment(s.influence, state.investment);
  FlowResiduals r;
  r.budget = p.dot(state.investment) - s.budget;
  r.stationarity.resize(n);
  for (int i = 0; i < n; ++i)
    r.stationarity[i] =
        s.players[i].utility.weight() / eff[i] + p[i] - s.players[i].cost_factor;
  return r;
}

Eigen::VectorXd resolve_kappa_x(const Scenario& s, const OdeConfig& cfg) {
  if (!(cfg.kappa_lambda > 0.0)) throw PreconditionError("kappa_lambda must be positive");
  if (cfg.kappa_x.size() == 0) return Eigen::VectorXd::Ones(s.player_count());
  if (cfg.kappa_x.size() != s.player_count())
    throw DimensionError("kappa_x length != player count");
  if (!(cfg.kappa_x.minCoeff() > 0.0))
    throw PreconditionError("kappa_x entries must be positive");
  return cfg.kappa_x;
}

OdeState rhs(const Scenario& s, Mechanism mech, const OdeState& state, const OdeConfig& cfg) {
  require_flow_support(s, mech);
  const Eigen::VectorXd kx = resolve_kappa_x(s, cfg);
  const FlowResiduals r = residuals(s, mech, state);
  OdeState d;
  d.investment = kx.cwiseProduct(r.stationarity);
  d.lambda = cfg.kappa_lambda * r.budget;
  return d;
}

void require_interior(const OdeState& y, double t) {
  if (!(y.lambda > 1e-6))
    throw IntegrationError("multiplier left the feasible interior", t);
  for (int i = 0; i < y.investment.size(); ++i)
    if (!(y.investment[i] > kMinInvestment))
      throw IntegrationError("investment left the feasible interior", t);
}

void require_stage_interior(const OdeState& y, double t) {
  if (!(y.lambda > 1e-12))
    throw IntegrationError("multiplier left the feasible interior mid-step", t);
  for (int i = 0; i < y.investment.size(); ++i)
    if (!(y.investment[i] > 0.0))
      throw IntegrationError("investment left the feasible interior mid-step", t);
}

OdeState axpy(const OdeState& y, double c, const OdeState& d) {
  return {y.investment + c * d.investment, y.lambda + c * d.lambda};
}

}  // namespace

OdeState ode_rhs_im2(const Scenario& s, const OdeState& state, const OdeConfig& cfg) {
  return rhs(s, Mechanism::IM2, state, cfg);
}

OdeState ode_rhs_im1(const Scenario& s, const OdeState& state, const OdeConfig& cfg) {
  return rhs(s, Mechanism::IM1, state, cfg);
}

OdeTrajectory integrate(const Scenario& s, Mechanism mech, const OdeState& init,
                        const OdeConfig& cfg) {
  require_flow_support(s, mech);
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
    throw PreconditionError("dt and t_end must be positive");
  if (cfg.record_every < 1) throw PreconditionError("record_every must be >= 1");
  if (init.investment.size() != s.player_count())
    throw DimensionError("starting investment length != player count");
  resolve_kappa_x(s, cfg);
  require_interior(init, 0.0);

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  OdeTrajectory traj;
  traj.samples.reserve(static_cast<size_t>(nsteps / cfg.record_every) + 2);
  traj.samples.push_back({0.0, init.investment, init.lambda});

  OdeState y = init;
  const auto f = [&](const OdeState& state, double t) {
    require_stage_interior(state, t);
    return rhs(s, mech, state, cfg);
  };
  for (long k = 0; k < nsteps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const OdeState k1 = f(y, t);
    const OdeState k2 = f(axpy(y, 0.5 * cfg.dt, k1), t + 0.5 * cfg.dt);
    const OdeState k3 = f(axpy(y, 0.5 * cfg.dt, k2), t + 0.5 * cfg.dt);
    const OdeState k4 = f(axpy(y, cfg.dt, k3), t + cfg.dt);
    y.investment +=
        (cfg.dt / 6.0) * (k1.investment + 2.0 * k2.investment + 2.0 * k3.investment + k4.investment);
    y.lambda += (cfg.dt / 6.0) * (k1.lambda + 2.0 * k2.lambda + 2.0 * k3.lambda + k4.lambda);

    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    if (!y.investment.allFinite() || !std::isfinite(y.lambda))
      throw NumericalError("flow state became non-finite at t = " + std::to_string(t_next));
    require_interior(y, t_next);
    if ((k + 1) % cfg.record_every == 0 || k + 1 == nsteps)
      traj.samples.push_back({t_next, y.investment, y.lambda});
  }
  return traj;
}

double lyapunov_im2(const Scenario& s, const OdeState& state) {
  require_flow_support(s, Mechanism::IM2);
  const FlowResiduals r = residuals(s, Mechanism::IM2, state);
  return 0.5 * (r.budget * r.budget + r.stationarity.squaredNorm());
}

double lyapunov_im1(const Scenario& s, const OdeState& state) {
  require_flow_support(s, Mechanism::IM1);
  const FlowResiduals r = residuals(s, Mechanism::IM1, state);
  return 0.5 * (r.budget * r.budget + r.stationarity.squaredNorm());
}

ExponentialFit fit_exponential_rate(const OdeTrajectory& traj, const OdeState& target) {
  if (traj.samples.size() < 2) throw InsufficientDataError("need at least two flow samples");
  if (traj.samples.front().investment.size() != target.investment.size())
    throw DimensionError("target investment length != trajectory width");

  std::vector<double> t, d;
  t.reserve(traj.samples.size());
  d.reserve(traj.samples.size());
  for (const OdeSample& smp : traj.samples) {
    t.push_back(smp.t);
    d.push_back((smp.investment - target.investment).norm());
  }
  const double d0 = d.front();
  if (!(d.back() < d0))
    throw PreconditionError("trajectory does not approach the target");

  std::vector<double> ts, ys;
  for (size_t k = 0; k < d.size(); ++k)
    if (d[k] >= 1e-8 && d[k] <= 0.5 * d0) {
      ts.push_back(t[k]);
      ys.push_back(std::log(d[k]));
    }
  if (ts.size() < 10)
    throw InsufficientDataError("fewer than 10 samples inside the fit window");

  const size_t m = ts.size();
  double tm = 0.0, ym = 0.0;
  for (size_t k = 0; k < m; ++k) {
    tm += ts[k];
    ym += ys[k];
  }
  tm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (size_t k = 0; k < m; ++k) {
    stt += (ts[k] - tm) * (ts[k] - tm);
    sty += (ts[k] - tm) * (ys[k] - ym);
    syy += (ys[k] - ym) * (ys[k] - ym);
  }
  if (stt == 0.0) throw InsufficientDataError("fit window has no time spread");
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;

  double ss_res = 0.0;
  for (size_t k = 0; k < m; ++k) {
    const double resid = ys[k] - (intercept + slope * ts[k]);
    ss_res += resid * resid;
  }

  ExponentialFit fit;
  fit.beta = -slope;
  fit.alpha = std::exp(intercept) / d0;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace riskmech

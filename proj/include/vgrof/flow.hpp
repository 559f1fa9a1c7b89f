#ifndef VGROF_FLOW_HPP_
#define VGROF_FLOW_HPP_

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgrof/calculus.hpp"
#include "vgrof/certificate.hpp"
#include "vgrof/solver.hpp"

// L2 gradient flow of E_phi by minimizing movements: each implicit Euler step
// u_next = argmin E_phi(v) + ||v - u_prev||^2 / (2 dt) is an ROF solve with
// datum u_prev and lambda = dt. The step flux eta gives the velocity
// (u_next - u_prev)/dt = div(eta/dt).

namespace vgrof {

struct FlowStep {
  ScalarImage u;
  CertificateReport certificate;
  SolveResult solve;
};

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<ScalarImage> states;
  /// E_phi at each state.
  std::vector<double> energies;
  /// Certified absolute gap of each step (one fewer entry than states).
  std::vector<double> step_gaps;
};

inline double energy(const ScalarImage& u, const PhiField& field) {
  return phi_total(field, gradient(u));
}

/// One certified implicit Euler step. Throws SolverError if the solve misses gap_tol.
inline FlowStep flow_step(const ScalarImage& u_prev, double dt, const PhiField& field,
                          SolverConfig cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("flow_step: dt must be > 0");
  cfg.lambda = dt;
  FlowStep step;
  step.solve = solve_rof(u_prev, field, cfg);
  if (!step.solve.converged) {
    throw SolverError("flow_step: solver stopped at relative gap " +
                      std::to_string(step.solve.gap_rel) + " after " +
                      std::to_string(step.solve.iterations) + " iterations");
  }
  CertificateTolerances tol;
  tol.gap_rel = cfg.gap_tol;
  step.certificate = certify(step.solve.u, step.solve.xi, u_prev, field, dt, tol);
  step.u = step.solve.u;
  return step;
}

using FlowSnapshot = std::function<void(std::size_t, double, const ScalarImage&)>;

inline FlowTrajectory run_flow(const ScalarImage& u0, double dt, std::size_t n_steps,
                               const PhiField& field, const SolverConfig& cfg,
                               const FlowSnapshot& snapshot = {}) {
  if (n_steps < 1) throw std::invalid_argument("run_flow: need at least one step");
  FlowTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.energies.push_back(energy(u0, field));
  if (snapshot) snapshot(0, 0.0, u0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    FlowStep step = flow_step(traj.states.back(), dt, field, cfg);
    const double t = dt * static_cast<double>(k);
    traj.times.push_back(t);
    traj.energies.push_back(energy(step.u, field));
    traj.step_gaps.push_back(step.solve.gap);
    if (snapshot) snapshot(k, t, step.u);
    traj.states.push_back(std::move(step.u));
  }
  return traj;
}

}  // namespace vgrof

#endif  // VGROF_FLOW_HPP_

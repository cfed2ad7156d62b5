#pragma once

// Exact (non-perturbative) Ermakov and Newton evolution, the reference that
// every perturbative result is checked against.

#include "shuttle/model.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace shuttle {

/// Trap centre Q(t). `ideal` marks the inverse-engineered Q0(t).
struct TrapTrajectory {
    std::function<double(double)> position;
    bool ideal = true;

    double operator()(double t) const { return position(t); }
};

/// Q0(t) = q(t) + q''(t) / Omega0^2 for a protocol at constant Omega0.
TrapTrajectory trap_from_classical(const Protocol& proto, const PhysicalParams& params);

/// Fixed-step RK4 samples of rho, rho', q_c, q_c' on t_k = k T / n_steps.
struct AuxiliarySolution {
    std::vector<double> time;
    std::vector<double> rho;
    std::vector<double> rho_dot;
    std::vector<double> qc;
    std::vector<double> qc_dot;

    std::size_t size() const noexcept { return time.size(); }
};

/// Integrates rho'' + W^2 rho = Omega0^2 / rho^3 and q'' + W^2 q = W^2 Q with
/// rho(0) = 1 and rho'(0) = q(0) = q'(0) = 0. Throws IntegrationError when
/// rho becomes nonpositive and PreconditionError when n_steps < 100.
AuxiliarySolution solve_auxiliary(const PhysicalParams& params,
                                  const std::function<double(double)>& omega_of_t,
                                  const TrapTrajectory& trap, std::size_t n_steps);

/// Total energy <H> in quanta from (rho, rho', q_c, q_c') at one instant.
EnergyQuanta energy_from_state(const PhysicalParams& params, double rho, double rho_dot,
                               double qc, double qc_dot, double omega_t, double trap_t, int n);

/// Total energy at the final grid point of `sol`.
EnergyQuanta exact_energy(const AuxiliarySolution& sol, const PhysicalParams& params,
                          double omega_T, double trap_T, int n);

/// Energy at grid index k (the T -> t substitution).
EnergyQuanta energy_at(const AuxiliarySolution& sol, std::size_t k, const PhysicalParams& params,
                       double omega_t, double trap_t, int n);

/// E - hbar Omega(t) (n + 1/2) written without the cancellation of the naive
/// difference: (2n+1)/(4 Omega0) [rho'^2 + (Omega0/rho - Omega rho)^2] plus
/// the displaced-oscillator terms.
double excess_from_state(const PhysicalParams& params, double rho, double rho_dot, double qc,
                         double qc_dot, double omega_t, double trap_t, int n);

/// Step count giving 2500 steps per period of the fastest of Omega0
/// and `omega_max` (and never fewer than 2000).
std::size_t default_step_count(const PhysicalParams& params, double omega_max = 0.0);

/// Excitation above hbar Omega(T)(n + 1/2) after shuttling `proto` under
/// `pert` (absolute amplitude), from the exact auxiliary equations.
EnergyQuanta excess_energy_exact(const PhysicalParams& params, const Protocol& proto,
                                 const Perturbation& pert, int n, std::size_t n_steps);

}  // namespace shuttle

#pragma once

// Corridor-constrained genetic search over the sine-ansatz nullspace, and the
// optimal-control extremal minimizing the time-averaged dynamical potential.

#include "shuttle/design.hpp"
#include "shuttle/dynamics.hpp"
#include "shuttle/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace shuttle {

/// int_0^T F[Q0(t)] dt with F the distance outside [0, d] (m s), composite
/// trapezoid on n_samples + 1 points. Excursions below 1e-12 d count as 0.
double corridor_cost(const TrapTrajectory& trap, const PhysicalParams& params,
                     std::size_t n_samples);

/// Affine solution set a = scale (particular + basis z) of an AnsatzSystem.
struct NullspaceParam {
    Eigen::VectorXd particular;  // minimum-norm b
    Eigen::MatrixXd basis;       // orthonormal columns spanning ker(matrix)
    double scale = 0.0;          // d / T^2

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(basis.cols()); }
    /// a_j in m/s^2 for nullspace coordinates z.
    std::vector<double> coefficients(const Eigen::VectorXd& z) const;
};

NullspaceParam nullspace_parametrize(const AnsatzSystem& system);

struct GaConfig {
    std::size_t population = 64;
    std::size_t generations = 500;
    std::size_t tournament = 3;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;
    double mutation_rate = 0.15;
    /// Fraction of the initial z spread used as mutation sigma.
    double mutation_scale = 0.2;
    std::size_t stagnation_limit = 60;
    std::uint64_t seed = 1;
    /// Fitness workers; 0 = hardware concurrency. Does not affect results.
    std::size_t threads = 1;
};

using ProtocolCost = std::function<double(const Protocol&)>;

struct GaResult {
    Protocol protocol;
    std::vector<double> coefficients;
    Eigen::VectorXd z;
    double best_cost = 0.0;
    /// Best cost after each evaluated population (the initial one first).
    std::vector<double> history;
    std::size_t generations = 0;
    bool converged = false;
};

/// Throws PreconditionError when the system has no nullspace ("nothing to
/// optimize") or the config is invalid.
GaResult ga_minimize(const PhysicalParams& params, const AnsatzSystem& system,
                     const ProtocolCost& cost, const GaConfig& cfg);

/// Corridor cost of the ideal trap path of `proto` on n_samples points.
ProtocolCost corridor_cost_function(const PhysicalParams& params, std::size_t n_samples = 2000);

/// Optimal-control extremal for a frequency perturbation sin(omega t).
struct OctSolution {
    std::array<double, 4> c{};  // c1 (m/s), c2..c4 (m)
    std::vector<double> time;
    std::array<std::vector<double>, 4> x;  // q0, q0', q1, q1'
    std::vector<double> control;           // u(t), m
    std::vector<double> trap;              // Q0 = x1 - u inside (0, T)
    double omega = 0.0;
    double energy_avg = 0.0;  // (1/T) int (m Omega0^2 / 2) u^2 dt, J
    double jump_start = 0.0;  // |u(0+)|
    double jump_end = 0.0;    // |u(T-)|
    /// max of |x1(T) - d| / d, |x2(T)| T / d, |x3(T)| / d, |x4(T)| T / d.
    double endpoint_residual = 0.0;
    double determinant = 0.0;  // of the probe matrix in scaled units

    double u(double t, const PhysicalParams& params) const;
    /// Extremal q0 as a protocol (Hermite on x1, x2; q0'' = -Omega0^2 u).
    Protocol protocol(const PhysicalParams& params) const;
    /// Q0 with 0 for t <= 0 and d for t >= T.
    TrapTrajectory trap_trajectory(const PhysicalParams& params) const;
};

/// Integrates x1' = x2, x2' = -Omega0^2 u, x3' = x4,
/// x4' = -Omega0^2 x3 - 2 Omega0^2 sin(omega t) u from x(0) = 0.
std::array<double, 4> oct_propagate(const PhysicalParams& params, double omega,
                                    const std::function<double(double)>& u, std::size_t n_steps);

/// Throws PreconditionError for omega <= 0 or n_steps < 2000 and
/// NumericalError when the probe matrix is singular.
OctSolution oct_solve(const PhysicalParams& params, double omega, std::size_t n_steps);

/// (1/T) int_0^T (m Omega^2 / 2) [q_c - Q]^2 dt in J. Without first order
/// q_c = q0 and Omega = Omega0. With it, q_c = q0 + a q1 (a = lambda or
/// epsilon) where q1 comes from RK4 on n_steps, Omega follows a frequency
/// perturbation and Q includes a position one.
double avg_dynamical_potential(const PhysicalParams& params, const Protocol& proto,
                               const TrapTrajectory& trap, const Perturbation& pert,
                               bool include_first_order, std::size_t n_steps);

}  // namespace shuttle

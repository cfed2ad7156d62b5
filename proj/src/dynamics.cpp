#include "shuttle/dynamics.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shuttle {

TrapTrajectory trap_from_classical(const Protocol& proto, const PhysicalParams& params) {
    const double w2 = params.omega0 * params.omega0;
    return {[proto, w2](double t) {
                const Kinematics k = proto.eval(t);
                return k.position + k.acceleration / w2;
            },
            true};
}

AuxiliarySolution solve_auxiliary(const PhysicalParams& params,
                                  const std::function<double(double)>& omega_of_t,
                                  const TrapTrajectory& trap, std::size_t n_steps) {
    if (n_steps < 100) {
        throw PreconditionError("solve_auxiliary needs n_steps >= 100");
    }
    const double T = params.duration;
    const double w0sq = params.omega0 * params.omega0;
    const double h = T / static_cast<double>(n_steps);

    auto rhs = [&](double t, const numerics::StateVec<4>& y) {
        const double w = omega_of_t(t);
        const double w2 = w * w;
        const double r = y[0];
        return numerics::StateVec<4>{y[1], -w2 * r + w0sq / (r * r * r), y[3],
                                     -w2 * y[2] + w2 * trap(t)};
    };

    AuxiliarySolution sol;
    const std::size_t n = n_steps + 1;
    sol.time.resize(n);
    sol.rho.resize(n);
    sol.rho_dot.resize(n);
    sol.qc.resize(n);
    sol.qc_dot.resize(n);

    numerics::StateVec<4> y{1.0, 0.0, 0.0, 0.0};
    auto store = [&](std::size_t k, double t) {
        sol.time[k] = t;
        sol.rho[k] = y[0];
        sol.rho_dot[k] = y[1];
        sol.qc[k] = y[2];
        sol.qc_dot[k] = y[3];
    };
    store(0, 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = h * static_cast<double>(k);
        y = numerics::rk4_step<4>(rhs, t, y, h);
        const double t_next = (k + 1 == n_steps) ? T : h * static_cast<double>(k + 1);
        if (!(y[0] > 0.0) || !std::isfinite(y[0])) {
            std::ostringstream msg;
            msg << "Ermakov integration failed: rho = " << y[0] << " at t = " << t_next << " s";
            throw IntegrationError(msg.str(), t_next);
        }
        store(k + 1, t_next);
    }
    return sol;
}

EnergyQuanta energy_from_state(const PhysicalParams& params, double rho, double rho_dot,
                               double qc, double qc_dot, double omega_t, double trap_t, int n) {
    const double m = params.mass;
    const double w0 = params.omega0;
    const double disp = qc - trap_t;
    const double classical = 0.5 * m * omega_t * omega_t * disp * disp + 0.5 * m * qc_dot * qc_dot;
    const double width = params.hbar / (4.0 * w0) * (2.0 * n + 1.0) *
                         (rho_dot * rho_dot + w0 * w0 / (rho * rho) + omega_t * omega_t * rho * rho);
    return {(classical + width) / params.quantum(), n};
}

EnergyQuanta exact_energy(const AuxiliarySolution& sol, const PhysicalParams& params,
                          double omega_T, double trap_T, int n) {
    return energy_at(sol, sol.size() - 1, params, omega_T, trap_T, n);
}

EnergyQuanta energy_at(const AuxiliarySolution& sol, std::size_t k, const PhysicalParams& params,
                       double omega_t, double trap_t, int n) {
    return energy_from_state(params, sol.rho.at(k), sol.rho_dot.at(k), sol.qc.at(k),
                             sol.qc_dot.at(k), omega_t, trap_t, n);
}

double excess_from_state(const PhysicalParams& params, double rho, double rho_dot, double qc,
                         double qc_dot, double omega_t, double trap_t, int n) {
    const double m = params.mass;
    const double w0 = params.omega0;
    const double disp = qc - trap_t;
    const double classical = 0.5 * m * omega_t * omega_t * disp * disp + 0.5 * m * qc_dot * qc_dot;
    const double mismatch = w0 / rho - omega_t * rho;
    const double width =
        params.hbar / (4.0 * w0) * (2.0 * n + 1.0) * (rho_dot * rho_dot + mismatch * mismatch);
    return (classical + width) / params.quantum();
}

std::size_t default_step_count(const PhysicalParams& params, double omega_max) {
    const double w = std::max(params.omega0, std::abs(omega_max));
    const double periods = w * params.duration / kTwoPi;
    const double steps = std::ceil(2500.0 * periods);
    return std::max<std::size_t>(2000, static_cast<std::size_t>(steps));
}

EnergyQuanta excess_energy_exact(const PhysicalParams& params, const Protocol& proto,
                                 const Perturbation& pert, int n, std::size_t n_steps) {
    const double T = params.duration;
    const double w0 = params.omega0;
    const TrapTrajectory ideal = trap_from_classical(proto, params);
    const TimeFunction shape = pert.shape();

    if (pert.is_frequency()) {
        const double lambda = pert.lambda;
        auto omega = [=](double t) { return w0 * (1.0 + lambda * shape(t)); };
        const AuxiliarySolution sol = solve_auxiliary(params, omega, ideal, n_steps);
        const std::size_t k = sol.size() - 1;
        return {excess_from_state(params, sol.rho[k], sol.rho_dot[k], sol.qc[k], sol.qc_dot[k],
                                  omega(T), ideal(T), n),
                n};
    }
    const double amp = pert.epsilon * params.distance;
    TrapTrajectory perturbed{[=](double t) { return ideal(t) + amp * shape(t); }, false};
    auto omega = [=](double) { return w0; };
    const AuxiliarySolution sol = solve_auxiliary(params, omega, perturbed, n_steps);
    const std::size_t k = sol.size() - 1;
    return {excess_from_state(params, sol.rho[k], sol.rho_dot[k], sol.qc[k], sol.qc_dot[k], w0,
                              perturbed(T), n),
            n};
}

}  // namespace shuttle

#include "support.hpp"

#include "shuttle/analysis.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/optimize.hpp"

#include <doctest.h>

#include <cmath>

using namespace shuttle;
using testing::fig1_params;
using testing::mhz;
using testing::rel_diff;

namespace {

PhysicalParams fast_params() { return fig1_params().with_duration(0.5e-6); }

AnsatzSystem fast_system(std::size_t terms) {
    DesignConstraints c;
    c.targets = {mhz(5.0)};
    c.terms = terms;
    return design_fourier(fast_params(), c).system;
}

}  // namespace

TEST_CASE("corridor cost of the quintic") {
    const PhysicalParams p = fig1_params();
    CHECK(corridor_cost(trap_from_classical(Protocol::polynomial5(p), p), p, 2000) == 0.0);

    const PhysicalParams q = p.with_duration(2.0 / p.omega0);
    const TrapTrajectory Q = trap_from_classical(Protocol::polynomial5(q), q);
    const auto excursion = [&](double t) {
        const double x = Q(t);
        return x < 0.0 ? -x : (x > q.distance ? x - q.distance : 0.0);
    };
    const double oracle = testing::simpson(excursion, 0.0, q.duration, 400000);
    const double cost = corridor_cost(Q, q, 20000);
    CHECK(cost > 0.0);
    CHECK(rel_diff(cost, oracle) < 1e-4);
    CHECK_THROWS_AS(corridor_cost(Q, q, 10), PreconditionError);
}

TEST_CASE("nullspace parametrization spans the solution set") {
    const AnsatzSystem s = fast_system(10);
    const NullspaceParam n = nullspace_parametrize(s);
    REQUIRE(n.dimension() == 6);
    CHECK((s.matrix * n.basis).norm() < 1e-12 * s.matrix.norm());
    CHECK((s.matrix * n.particular - s.rhs).norm() < 1e-12 * s.rhs.norm());
    CHECK((n.basis.transpose() * n.basis - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
    const std::vector<double> a0 = n.coefficients(Eigen::VectorXd::Zero(6));
    for (std::size_t j = 0; j < a0.size(); ++j) {
        CHECK(a0[j] == doctest::Approx(s.coefficients[j]).epsilon(1e-10));
    }
    Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(6, -1.0, 2.0);
    const std::vector<double> a = n.coefficients(z);
    const Protocol q = trajectory_from_coeffs(fast_params(), a);
    CHECK(q.boundary_check().compliant(1e-10));
    CHECK(std::abs(target_integral(q, mhz(5.0))) < 1e-9 * fast_params().distance / fast_params().duration);
}

TEST_CASE("genetic search clears the corridor and is deterministic") {
    const PhysicalParams p = fast_params();
    const TrapTrajectory unique = trap_from_classical(design_fourier(p, [] {
        DesignConstraints c;
        c.targets = {mhz(5.0)};
        return c;
    }()).protocol, p);
    CHECK(corridor_cost(unique, p, 2000) > 0.0);

    GaConfig cfg;
    cfg.seed = 7;
    const AnsatzSystem s = fast_system(10);
    const GaResult a = ga_minimize(p, s, corridor_cost_function(p), cfg);
    CHECK(a.converged);
    CHECK(a.best_cost == 0.0);
    CHECK(a.generations >= 1);
    CHECK(a.history.size() == a.generations);
    CHECK(a.protocol.boundary_check().compliant(1e-10));
    CHECK(std::abs(target_integral(a.protocol, mhz(5.0))) < 1e-9 * p.distance / p.duration);
    CHECK(corridor_cost(trap_from_classical(a.protocol, p), p, 2000) == 0.0);

    cfg.threads = 4;
    const GaResult b = ga_minimize(p, s, corridor_cost_function(p), cfg);
    CHECK(b.coefficients == a.coefficients);
    CHECK(b.generations == a.generations);
}

TEST_CASE("best cost never increases") {
    const PhysicalParams p = fast_params();
    GaConfig cfg;
    cfg.seed = 3;
    cfg.generations = 20;
    cfg.population = 16;
    // a cost that never reaches zero
    const ProtocolCost cost = [](const Protocol& q) { return 1.0 + std::abs(q.coefficients()[0]); };
    const GaResult r = ga_minimize(p, fast_system(8), cost, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.generations <= 20);
    for (std::size_t k = 1; k < r.history.size(); ++k) {
        CHECK(r.history[k] <= r.history[k - 1]);
    }
}

TEST_CASE("no nullspace means nothing to optimize") {
    const PhysicalParams p = fast_params();
    try {
        ga_minimize(p, fast_system(4), corridor_cost_function(p), GaConfig{});
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("nothing to optimize") != std::string::npos);
    }
}

TEST_CASE("optimal-control extremal") {
    const PhysicalParams p = fig1_params().with_duration(10e-6);
    const double w = mhz(5.0);
    const OctSolution s = oct_solve(p, w, 20000);
    CHECK(s.endpoint_residual < 1e-8);
    CHECK(s.time.size() == s.control.size());
    CHECK(s.jump_start > 0.0);
    CHECK(s.jump_end > 0.0);

    // re-propagating the control reaches the target state
    const auto x = oct_propagate(p, w, [&](double t) { return s.u(t, p); }, 20000);
    CHECK(std::abs(x[0] - p.distance) / p.distance < 1e-8);
    CHECK(std::abs(x[2]) / p.distance < 1e-8);

    // x3(T) = x4(T) = 0 is the first-order cancellation at omega
    const Protocol q = s.protocol(p);
    CHECK(std::abs(target_integral(q, w)) < 1e-6 * p.distance / p.duration);
    CHECK(q.position(p.duration) == doctest::Approx(p.distance).epsilon(1e-8));

    // energy against an independent trapezoid of (m Omega0^2 / 2) u^2
    double sum = 0.0;
    for (std::size_t k = 1; k < s.time.size(); ++k) {
        const double dt = s.time[k] - s.time[k - 1];
        sum += 0.5 * dt * (s.control[k] * s.control[k] + s.control[k - 1] * s.control[k - 1]);
    }
    const double ebar = 0.5 * p.mass * p.omega0 * p.omega0 * sum / p.duration;
    CHECK(rel_diff(s.energy_avg, ebar) < 1e-6);

    // the quintic pays more: m / (2 T Omega0^2) (120/7) d^2 / T^3
    const double T = p.duration;
    const double poly = p.mass / (2 * T * p.omega0 * p.omega0) * (120.0 / 7.0) * p.distance * p.distance /
                        (T * T * T);
    const Protocol quintic = Protocol::polynomial5(p);
    const double lib = avg_dynamical_potential(p, quintic, trap_from_classical(quintic, p),
                                               Perturbation::frequency_sine(0.0, w), false, 20000);
    CHECK(rel_diff(lib, poly) < 1e-9);
    CHECK(s.energy_avg < poly);
}

TEST_CASE("extremal trap path jumps to the corridor ends") {
    const PhysicalParams p = fig1_params().with_duration(10e-6);
    const OctSolution s = oct_solve(p, mhz(5.0), 20000);
    const TrapTrajectory Q = s.trap_trajectory(p);
    CHECK(Q(0.0) == 0.0);
    CHECK(Q(p.duration) == p.distance);
    CHECK(std::abs(Q(1e-15) - 0.0) == doctest::Approx(s.jump_start).epsilon(1e-3));
}

TEST_CASE("extremal preconditions") {
    const PhysicalParams p = fig1_params().with_duration(10e-6);
    CHECK_THROWS_AS(oct_solve(p, 0.0, 20000), PreconditionError);
    CHECK_THROWS_AS(oct_solve(p, mhz(5.0), 100), PreconditionError);
}

TEST_CASE("first-order dynamical potential reduces to the zeroth order at zero amplitude") {
    const PhysicalParams p = fig1_params();
    const Protocol q = Protocol::polynomial5(p);
    const TrapTrajectory Q = trap_from_classical(q, p);
    const Perturbation f = Perturbation::frequency_sine(0.0, mhz(5.0));
    const double a = avg_dynamical_potential(p, q, Q, f, false, 20000);
    const double b = avg_dynamical_potential(p, q, Q, f, true, 20000);
    CHECK(rel_diff(a, b) < 1e-8);
    const double c = avg_dynamical_potential(p, q, Q, f.with_amplitude(0.01), true, 20000);
    CHECK(c > 0.0);
    CHECK(rel_diff(a, c) < 0.1);
}

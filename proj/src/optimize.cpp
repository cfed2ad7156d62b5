#include "shuttle/optimize.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/interp.hpp"
#include "shuttle/ode.hpp"
#include "shuttle/parallel.hpp"
#include "shuttle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace shuttle {

namespace {

class OctShape final : public TrajectoryShape {
public:
    OctShape(PhysicalParams params, std::array<double, 4> c, double omega,
             numerics::HermiteGrid grid)
        : params_(params), c_(c), omega_(omega), grid_(std::move(grid)) {}

    Kinematics eval(double t) const override {
        const double T = params_.duration;
        const double tc = std::clamp(t, 0.0, T);
        const auto s = grid_(tc);
        const double w0 = params_.omega0;
        const double u = -(c_[0] * tc + c_[1] +
                           2.0 * std::sin(omega_ * tc) *
                               (c_[2] * std::cos(w0 * tc) + c_[3] * std::sin(w0 * tc)));
        return {s.value, s.derivative, -w0 * w0 * u};
    }

private:
    PhysicalParams params_;
    std::array<double, 4> c_;
    double omega_;
    numerics::HermiteGrid grid_;
};

double oct_control(const std::array<double, 4>& c, double omega, double omega0, double t) {
    return -(c[0] * t + c[1] +
             2.0 * std::sin(omega * t) * (c[2] * std::cos(omega0 * t) + c[3] * std::sin(omega0 * t)));
}

}  // namespace

double corridor_cost(const TrapTrajectory& trap, const PhysicalParams& params,
                     std::size_t n_samples) {
    if (n_samples < 1000) {
        throw PreconditionError("corridor_cost needs n_samples >= 1000");
    }
    const double T = params.duration;
    const double d = params.distance;
    const double floor = 1e-12 * d;
    auto F = [&](double q) {
        double excess = 0.0;
        if (q > d) {
            excess = q - d;
        } else if (q < 0.0) {
            excess = -q;
        }
        return excess > floor ? excess : 0.0;
    };
    const double h = T / static_cast<double>(n_samples);
    double sum = 0.0;
    for (std::size_t k = 0; k <= n_samples; ++k) {
        const double t = (k == n_samples) ? T : h * static_cast<double>(k);
        const double w = (k == 0 || k == n_samples) ? 0.5 : 1.0;
        sum += w * F(trap(t));
    }
    return sum * h;
}

std::vector<double> NullspaceParam::coefficients(const Eigen::VectorXd& z) const {
    Eigen::VectorXd b = particular;
    if (basis.cols() > 0) {
        b += basis * z;
    }
    std::vector<double> a(static_cast<std::size_t>(b.size()));
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        a[static_cast<std::size_t>(k)] = scale * b(k);
    }
    return a;
}

NullspaceParam nullspace_parametrize(const AnsatzSystem& system) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-14);
    const auto rank = svd.rank();
    NullspaceParam p;
    p.scale = system.scale;
    p.particular = svd.solve(system.rhs);
    const Eigen::Index n = system.matrix.cols();
    p.basis = svd.matrixV().rightCols(n - rank);
    return p;
}

ProtocolCost corridor_cost_function(const PhysicalParams& params, std::size_t n_samples) {
    return [params, n_samples](const Protocol& proto) {
        return corridor_cost(trap_from_classical(proto, params), params, n_samples);
    };
}

GaResult ga_minimize(const PhysicalParams& params, const AnsatzSystem& system,
                     const ProtocolCost& cost, const GaConfig& cfg) {
    if (cfg.population < 10) {
        throw PreconditionError("GA population must be >= 10");
    }
    if (cfg.generations < 1 || cfg.tournament < 1) {
        throw PreconditionError("GA needs generations >= 1 and tournament >= 1");
    }
    const NullspaceParam ns = nullspace_parametrize(system);
    const std::size_t dim = ns.dimension();
    if (dim == 0) {
        throw PreconditionError("nothing to optimize: the design system has no nullspace");
    }
    const auto dimi = static_cast<Eigen::Index>(dim);
    std::mt19937_64 rng(cfg.seed);
    const double spread = ns.particular.norm() > 0.0 ? ns.particular.norm() : 1.0;
    std::normal_distribution<double> init(0.0, spread);
    std::normal_distribution<double> mutate(0.0, cfg.mutation_scale * spread);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, cfg.population - 1);

    const std::size_t P = cfg.population;
    std::vector<Eigen::VectorXd> pop(P, Eigen::VectorXd(dimi));
    for (auto& z : pop) {
        for (Eigen::Index k = 0; k < dimi; ++k) {
            z(k) = init(rng);
        }
    }
    std::vector<double> fit(P);
    auto evaluate = [&] {
        parallel_for(P, cfg.threads, [&](std::size_t i) {
            fit[i] = cost(trajectory_from_coeffs(params, ns.coefficients(pop[i])));
        });
    };

    GaResult res{trajectory_from_coeffs(params, ns.coefficients(Eigen::VectorXd::Zero(dimi))),
                 {}, Eigen::VectorXd::Zero(dimi), 0.0, {}, 0, false};
    evaluate();
    std::size_t best_idx = static_cast<std::size_t>(
        std::min_element(fit.begin(), fit.end()) - fit.begin());
    Eigen::VectorXd best_z = pop[best_idx];
    double best = fit[best_idx];
    res.history.push_back(best);
    res.generations = 1;
    std::size_t stagnant = 0;

    auto tournament = [&]() -> const Eigen::VectorXd& {
        std::size_t winner = pick(rng);
        for (std::size_t k = 1; k < cfg.tournament; ++k) {
            const std::size_t c = pick(rng);
            if (fit[c] < fit[winner]) {
                winner = c;
            }
        }
        return pop[winner];
    };

    while (best > 0.0 && res.generations < cfg.generations && stagnant < cfg.stagnation_limit) {
        std::vector<Eigen::VectorXd> next;
        next.reserve(P);
        next.push_back(best_z);
        while (next.size() < P) {
            const Eigen::VectorXd p1 = tournament();
            const Eigen::VectorXd p2 = tournament();
            Eigen::VectorXd child = p1;
            if (unit(rng) < cfg.crossover_rate) {
                for (Eigen::Index k = 0; k < dimi; ++k) {
                    const double lo = std::min(p1(k), p2(k));
                    const double hi = std::max(p1(k), p2(k));
                    const double span = hi - lo;
                    const double a = lo - cfg.blend_alpha * span;
                    const double b = hi + cfg.blend_alpha * span;
                    child(k) = (b > a) ? a + (b - a) * unit(rng) : lo;
                }
            }
            for (Eigen::Index k = 0; k < dimi; ++k) {
                if (unit(rng) < cfg.mutation_rate) {
                    child(k) += mutate(rng);
                }
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate();
        ++res.generations;
        best_idx = static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
        if (fit[best_idx] < best) {
            best = fit[best_idx];
            best_z = pop[best_idx];
            stagnant = 0;
        } else {
            ++stagnant;
        }
        res.history.push_back(best);
    }

    res.z = best_z;
    res.best_cost = best;
    res.converged = (best == 0.0);
    res.coefficients = ns.coefficients(best_z);
    res.protocol = trajectory_from_coeffs(params, res.coefficients);
    return res;
}

std::array<double, 4> oct_propagate(const PhysicalParams& params, double omega,
                                    const std::function<double(double)>& u, std::size_t n_steps) {
    const double w0sq = params.omega0 * params.omega0;
    const double h = params.duration / static_cast<double>(n_steps);
    auto rhs = [&](double t, const numerics::StateVec<4>& x) {
        const double uc = u(t);
        return numerics::StateVec<4>{x[1], -w0sq * uc, x[3],
                                     -w0sq * x[2] - 2.0 * w0sq * std::sin(omega * t) * uc};
    };
    numerics::StateVec<4> x{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < n_steps; ++k) {
        x = numerics::rk4_step<4>(rhs, h * static_cast<double>(k), x, h);
    }
    return x;
}

double OctSolution::u(double t, const PhysicalParams& params) const {
    return oct_control(c, omega, params.omega0, t);
}

Protocol OctSolution::protocol(const PhysicalParams& params) const {
    numerics::HermiteGrid grid(0.0, params.duration, x[0], x[1]);
    auto shape = std::make_shared<OctShape>(params, c, omega, std::move(grid));
    return Protocol(ProtocolKind::OctExtremal, params, std::vector<double>(c.begin(), c.end()),
                    std::move(shape));
}

TrapTrajectory OctSolution::trap_trajectory(const PhysicalParams& params) const {
    const Protocol proto = protocol(params);
    const double T = params.duration;
    const double d = params.distance;
    const auto cc = c;
    const double w = omega;
    const double w0 = params.omega0;
    return {[proto, cc, w, w0, T, d](double t) {
                if (t <= 0.0) {
                    return 0.0;
                }
                if (t >= T) {
                    return d;
                }
                return proto.position(t) - oct_control(cc, w, w0, t);
            },
            true};
}

OctSolution oct_solve(const PhysicalParams& params, double omega, std::size_t n_steps) {
    if (!(omega > 0.0)) {
        throw PreconditionError("oct_solve needs omega > 0");
    }
    if (n_steps < 2000) {
        throw PreconditionError("oct_solve needs n_steps >= 2000");
    }
    const double T = params.duration;
    const double d = params.distance;
    const double w0 = params.omega0;
    const std::array<double, 4> probe_scale{d / T, d, d, d};
    const std::array<double, 4> state_scale{d, d / T, d, d / T};

    Eigen::Matrix4d M;
    for (int k = 0; k < 4; ++k) {
        std::array<double, 4> c{};
        c[static_cast<std::size_t>(k)] = probe_scale[static_cast<std::size_t>(k)];
        const auto xT = oct_propagate(
            params, omega, [&](double t) { return oct_control(c, omega, w0, t); }, n_steps);
        for (int r = 0; r < 4; ++r) {
            M(r, k) = xT[static_cast<std::size_t>(r)] / state_scale[static_cast<std::size_t>(r)];
        }
    }
    Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
    OctSolution sol;
    sol.omega = omega;
    sol.determinant = M.determinant();
    if (!lu.isInvertible() || std::abs(lu.rcond()) < 1e-13) {
        std::ostringstream msg;
        msg << "optimal-control boundary system is singular: determinant " << sol.determinant
            << ", reciprocal condition " << lu.rcond();
        throw NumericalError(msg.str());
    }
    const Eigen::Vector4d target(1.0, 0.0, 0.0, 0.0);
    const Eigen::Vector4d z = lu.solve(target);
    for (int k = 0; k < 4; ++k) {
        sol.c[static_cast<std::size_t>(k)] = z(k) * probe_scale[static_cast<std::size_t>(k)];
    }

    const double w0sq = w0 * w0;
    const double h = T / static_cast<double>(n_steps);
    auto uf = [&](double t) { return oct_control(sol.c, omega, w0, t); };
    auto rhs = [&](double t, const numerics::StateVec<4>& x) {
        const double uc = uf(t);
        return numerics::StateVec<4>{x[1], -w0sq * uc, x[3],
                                     -w0sq * x[2] - 2.0 * w0sq * std::sin(omega * t) * uc};
    };
    const std::size_t n = n_steps + 1;
    sol.time.resize(n);
    for (auto& v : sol.x) {
        v.resize(n);
    }
    sol.control.resize(n);
    sol.trap.resize(n);
    numerics::StateVec<4> x{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        const double t = (k == n_steps) ? T : h * static_cast<double>(k);
        if (k > 0) {
            x = numerics::rk4_step<4>(rhs, h * static_cast<double>(k - 1), x, h);
        }
        sol.time[k] = t;
        for (std::size_t r = 0; r < 4; ++r) {
            sol.x[r][k] = x[r];
        }
        sol.control[k] = uf(t);
        sol.trap[k] = x[0] - sol.control[k];
    }
    sol.trap.front() = 0.0;
    sol.trap.back() = d;
    sol.jump_start = std::abs(uf(0.0));
    sol.jump_end = std::abs(uf(T));
    sol.endpoint_residual = std::max({std::abs(x[0] - d) / d, std::abs(x[1]) * T / d,
                                      std::abs(x[2]) / d, std::abs(x[3]) * T / d});

    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.initial_panels = numerics::panels_for(omega + w0, 0.0, T, 4.0);
    const double J = numerics::integrate([&](double t) { return uf(t) * uf(t); }, 0.0, T, opts);
    sol.energy_avg = 0.5 * params.mass * w0sq * J / T;
    return sol;
}

double avg_dynamical_potential(const PhysicalParams& params, const Protocol& proto,
                               const TrapTrajectory& trap, const Perturbation& pert,
                               bool include_first_order, std::size_t n_steps) {
    const double T = params.duration;
    const double w0 = params.omega0;
    const double m = params.mass;
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-10;

    if (!include_first_order) {
        opts.initial_panels = numerics::panels_for(w0 + pert.max_omega(), 0.0, T, 4.0);
        const double I = numerics::integrate(
            [&](double t) {
                const double x = proto.position(t) - trap(t);
                return x * x;
            },
            0.0, T, opts);
        return 0.5 * m * w0 * w0 * I / T;
    }
    if (n_steps < 100) {
        throw PreconditionError("avg_dynamical_potential needs n_steps >= 100");
    }
    const TimeFunction shape = pert.shape();
    const bool freq = pert.is_frequency();
    const double amp = pert.amplitude();
    const double d = params.distance;
    const double w0sq = w0 * w0;
    // first-order Newton correction from rest
    auto rhs = [&](double t, const numerics::StateVec<2>& y) {
        const double drive = freq ? 2.0 * w0sq * shape(t) * (trap(t) - proto.position(t))
                                  : w0sq * d * shape(t);
        return numerics::StateVec<2>{y[1], -w0sq * y[0] + drive};
    };
    const double h = T / static_cast<double>(n_steps);
    std::vector<double> q1(n_steps + 1), q1d(n_steps + 1);
    numerics::StateVec<2> y{0.0, 0.0};
    q1[0] = 0.0;
    q1d[0] = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        y = numerics::rk4_step<2>(rhs, h * static_cast<double>(k), y, h);
        q1[k + 1] = y[0];
        q1d[k + 1] = y[1];
    }
    const numerics::HermiteGrid first(0.0, T, std::move(q1), std::move(q1d));
    opts.initial_panels = n_steps;
    const double I = numerics::integrate(
        [&](double t) {
            const double f = shape(t);
            const double W = freq ? w0 * (1.0 + amp * f) : w0;
            const double Q = freq ? trap(t) : trap(t) + amp * d * f;
            const double x = proto.position(t) + amp * first(t).value - Q;
            return 0.5 * m * W * W * x * x;
        },
        0.0, T, opts);
    return I / T;
}

}  // namespace shuttle

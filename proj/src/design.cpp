#include "shuttle/design.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace shuttle {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

numerics::QuadratureOptions unit_interval_options(double max_rate) {
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.initial_panels = numerics::panels_for(max_rate, 0.0, 1.0);
    return opts;
}

double falling(int e, int a) {
    double r = 1.0;
    for (int i = 0; i < a; ++i) {
        r *= static_cast<double>(e - i);
    }
    return r;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

// k-th derivative of s^e (s - 1)^e (s - 1/2) for k >= 0, by Leibniz.
double g_derivative(int e, int k, double s) {
    double total = 0.0;
    for (int c = 0; c <= std::min(k, 1); ++c) {
        const double cf = (c == 0) ? (s - 0.5) : 1.0;
        const int rest = k - c;
        const double outer = binom(k, c);
        for (int a = 0; a <= rest; ++a) {
            const int b = rest - a;
            if (a > e || b > e) {
                continue;
            }
            const double da = falling(e, a) * std::pow(s, e - a);
            const double db = falling(e, b) * std::pow(s - 1.0, e - b);
            total += outer * binom(rest, a) * da * db * cf;
        }
    }
    return total;
}

// Exact integrals of g from 0 with a rule of e + 2 points (polynomial degree
// at most 2e + 2).
double g_integral(int e, int k, double s, const numerics::GaussRule& rule) {
    if (s == 0.0) {
        return 0.0;
    }
    const double half = 0.5 * s;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = half * (1.0 + rule.nodes[i]);
        const double w = (k == -1) ? 1.0 : (s - x);
        sum += rule.weights[i] * w * g_derivative(e, 0, x);
    }
    return sum * half;
}

class AuxShape final : public TrajectoryShape {
public:
    AuxShape(const PhysicalParams& params, AuxFunctionSpec spec)
        : T_(params.duration), spec_(std::move(spec)), rule_(numerics::gauss_legendre(
                                                          static_cast<std::size_t>(spec_.exponent + 2))) {}

    Kinematics eval(double t) const override {
        const double s = std::clamp(t / T_, 0.0, 1.0);
        const int e = spec_.exponent;
        const int p = spec_.order();
        const auto& E = spec_.symmetric_sums;
        double acc = 0.0;
        double vel = 0.0;
        double pos = 0.0;
        for (int j = 0; j <= 2 * p; ++j) {
            const int k = 4 * p - 2 * j;
            acc += E[j] * g_derivative(e, k, s);
            if (k >= 2) {
                vel += E[j] * g_derivative(e, k - 1, s);
                pos += E[j] * g_derivative(e, k - 2, s);
            } else {
                vel += E[j] * g_integral(e, -1, s, rule_);
                pos += E[j] * g_integral(e, -2, s, rule_);
            }
        }
        const double K = spec_.normalization;
        return {K * T_ * T_ * pos, K * T_ * vel, K * acc};
    }

private:
    double T_;
    AuxFunctionSpec spec_;
    numerics::GaussRule rule_;
};

class SineSeriesShape final : public TrajectoryShape {
public:
    SineSeriesShape(double T, std::vector<double> a) : T_(T), a_(std::move(a)) {}

    Kinematics eval(double t) const override {
        Kinematics k;
        for (std::size_t idx = 0; idx < a_.size(); ++idx) {
            const double jp = kPi * static_cast<double>(idx + 1);
            const double x = jp * t / T_;
            const double L = T_ / jp;
            k.acceleration += a_[idx] * std::sin(x);
            k.velocity += a_[idx] * L * (1.0 - std::cos(x));
            k.position += a_[idx] * L * L * (x - std::sin(x));
        }
        return k;
    }

private:
    double T_;
    std::vector<double> a_;
};

cplx Ij_quadrature(double wT, double oT, int j, int r, int s) {
    const double jp = kPi * j;
    return numerics::integrate(
        [&](double x) {
            const double sn = std::sin(wT * x + 0.5 * kPi * r);
            cplx v = std::pow(x, r) * sn * std::sin(jp * x) * std::polar(1.0, -oT * x);
            if (s > 0) {
                v *= std::pow(cplx(0.0, -x), s);
            }
            return v;
        },
        0.0, 1.0, unit_interval_options(std::abs(wT) + jp + std::abs(oT)));
}

}  // namespace

std::complex<double> target_integral(const Protocol& proto, double omega) {
    return target_integral(proto, omega, proto.params().omega0);
}

std::complex<double> target_integral(const Protocol& proto, double omega, double omega0) {
    const double T = proto.params().duration;
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.initial_panels = numerics::panels_for(std::abs(omega) + std::abs(omega0), 0.0, T, 4.0);
    return numerics::integrate(
        [&](double t) {
            return std::sin(omega * t) * proto.acceleration(t) * std::polar(1.0, -omega0 * t);
        },
        0.0, T, opts);
}

double aux_g(int exponent, int k, double s) {
    if (k >= 0) {
        return g_derivative(exponent, k, s);
    }
    if (k < -2) {
        throw PreconditionError("aux_g supports k >= -2");
    }
    const auto rule = numerics::gauss_legendre(static_cast<std::size_t>(exponent + 2));
    return g_integral(exponent, k, s, rule);
}

AuxFunctionSpec aux_function_spec(const PhysicalParams& params, const std::vector<double>& omegas) {
    if (omegas.empty()) {
        throw DesignError("auxiliary design needs at least one frequency");
    }
    const double w0 = params.omega0;
    const double T = params.duration;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (std::abs(omegas[i] - w0) <= 1e-12 * w0) {
            throw DesignError("singular auxiliary design: omega equals Omega0");
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (std::abs(omegas[i] - omegas[k]) <= 1e-12 * w0) {
                throw DesignError("degenerate auxiliary design: repeated frequency");
            }
        }
    }
    AuxFunctionSpec spec;
    spec.frequencies = omegas;
    const int p = static_cast<int>(omegas.size());
    spec.exponent = 4 * p + 1;

    std::vector<double> sq;
    for (double w : omegas) {
        sq.push_back(((w0 + w) * T) * ((w0 + w) * T));
        sq.push_back(((w0 - w) * T) * ((w0 - w) * T));
    }
    std::vector<double> E{1.0};
    for (double x : sq) {
        E.push_back(0.0);
        for (std::size_t k = E.size() - 1; k >= 1; --k) {
            E[k] += x * E[k - 1];
        }
    }
    spec.symmetric_sums = E;

    const double tail = aux_g(spec.exponent, -2, 1.0);
    const double denom = T * T * E.back() * tail;
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) {
        throw DesignError("auxiliary design normalization is singular");
    }
    spec.normalization = params.distance / denom;
    return spec;
}

Protocol design_aux_single(const PhysicalParams& params, double omega) {
    return design_aux_multi(params, {omega});
}

Protocol design_aux_multi(const PhysicalParams& params, const std::vector<double>& omegas) {
    AuxFunctionSpec spec = aux_function_spec(params, omegas);
    std::vector<double> coeffs{spec.normalization};
    coeffs.insert(coeffs.end(), spec.symmetric_sums.begin(), spec.symmetric_sums.end());
    auto shape = std::make_shared<AuxShape>(params, std::move(spec));
    return Protocol(ProtocolKind::AuxFunction, params, std::move(coeffs), std::move(shape));
}

std::complex<double> ansatz_Ij(const PhysicalParams& params, int j, double omega) {
    if (j < 1) {
        throw PreconditionError("ansatz_Ij needs j >= 1");
    }
    const double T = params.duration;
    const double wT = omega * T;
    const double o = params.omega0 * T;
    const double a = kPi * j - wT;
    const double b = kPi * j + wT;
    const double da = a * a - o * o;
    const double db = b * b - o * o;
    const double guard = 1e-8 * o * o;
    if (std::abs(da) < guard || std::abs(db) < guard) {
        return T * Ij_quadrature(wT, o, j, 0, 0);
    }
    const cplx i(0.0, 1.0);
    const cplx e = std::polar(1.0, -o);
    const cplx term = i * o / da - i * o / db +
                      e * ((a * std::sin(a) - i * o * std::cos(a)) / da -
                           (b * std::sin(b) - i * o * std::cos(b)) / db);
    return 0.5 * T * term;
}

std::complex<double> ansatz_Ij_derivative(const PhysicalParams& params, int j, double omega,
                                          int r, int s) {
    if (j < 1 || r < 0 || s < 0) {
        throw PreconditionError("ansatz_Ij_derivative needs j >= 1 and r, s >= 0");
    }
    const double T = params.duration;
    return std::pow(T, 1 + r + s) *
           Ij_quadrature(omega * T, params.omega0 * T, j, r, s);
}

std::complex<double> ansatz_integral(const PhysicalParams& params, const std::vector<double>& a,
                                     double omega) {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * ansatz_Ij(params, static_cast<int>(k + 1), omega);
    }
    return sum;
}

AnsatzSystem assemble_ansatz(const PhysicalParams& params, const DesignConstraints& c) {
    if (c.targets.empty()) {
        throw DesignError("fourier design needs at least one target frequency");
    }
    if (c.omega_derivatives < 0 || c.omega0_derivatives < 0) {
        throw DesignError("derivative orders must be nonnegative");
    }
    const std::size_t rows = c.row_count();
    const std::size_t N = c.terms.value_or(rows);
    if (N < rows) {
        std::ostringstream msg;
        msg << "underdetermined request: " << rows << " conditions need N >= " << rows
            << " terms, got N = " << N;
        throw DesignError(msg.str());
    }
    const double T = params.duration;
    const double wT0 = params.omega0 * T;

    AnsatzSystem sys;
    sys.terms = N;
    sys.scale = params.distance / (T * T);
    sys.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(N));
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
    for (std::size_t k = 0; k < N; ++k) {
        const int j = static_cast<int>(k + 1);
        const auto col = static_cast<Eigen::Index>(k);
        sys.matrix(0, col) = 1.0 / (kPi * j);
        sys.matrix(1, col) = (j % 2 == 0) ? 0.0 : 2.0 / j;
    }
    sys.rhs(0) = 1.0;

    std::vector<std::pair<int, int>> orders{{0, 0}};
    for (int r = 1; r <= c.omega_derivatives; ++r) {
        orders.emplace_back(r, 0);
    }
    for (int s = 1; s <= c.omega0_derivatives; ++s) {
        orders.emplace_back(0, s);
    }
    Eigen::Index row = 2;
    for (double w : c.targets) {
        for (auto [r, s] : orders) {
            for (std::size_t k = 0; k < N; ++k) {
                const int j = static_cast<int>(k + 1);
                cplx v;
                if (r == 0 && s == 0) {
                    v = ansatz_Ij(params, j, w) / T;
                } else {
                    v = Ij_quadrature(w * T, wT0, j, r, s);
                }
                sys.matrix(row, static_cast<Eigen::Index>(k)) = v.real();
                sys.matrix(row + 1, static_cast<Eigen::Index>(k)) = v.imag();
            }
            row += 2;
        }
    }
    return sys;
}

FourierDesign design_fourier(const PhysicalParams& params, const DesignConstraints& c) {
    AnsatzSystem sys = assemble_ansatz(params, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    sys.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    svd.setThreshold(1e-14);
    sys.rank = static_cast<std::size_t>(svd.rank());
    if (!(sys.condition_number <= c.max_condition)) {
        std::ostringstream msg;
        msg << "ill-conditioned design system: condition number " << sys.condition_number
            << " (limit " << c.max_condition << "), rows " << sys.rows() << ", terms "
            << sys.terms << ", smallest singular value " << smin;
        throw DesignError(msg.str());
    }
    const Eigen::VectorXd b = svd.solve(sys.rhs);
    sys.residual = (sys.matrix * b - sys.rhs).norm();
    sys.coefficients.resize(sys.terms);
    for (std::size_t k = 0; k < sys.terms; ++k) {
        sys.coefficients[k] = sys.scale * b(static_cast<Eigen::Index>(k));
    }
    Protocol proto = trajectory_from_coeffs(params, sys.coefficients);
    return {std::move(proto), std::move(sys)};
}

Protocol trajectory_from_coeffs(const PhysicalParams& params, std::vector<double> a) {
    if (a.empty()) {
        throw PreconditionError("trajectory_from_coeffs needs at least one coefficient");
    }
    auto shape = std::make_shared<SineSeriesShape>(params.duration, a);
    return Protocol(ProtocolKind::FourierSine, params, std::move(a), std::move(shape));
}

}  // namespace shuttle

#include "shuttle/analysis.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/perturbation.hpp"
#include "shuttle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace shuttle {

namespace {

constexpr double kPoleTolerance = 1e-6;
constexpr double kIntegerTolerance = 1e-9;

void check_pole(double omega, double pole, double omega0, const char* what) {
    if (std::abs(omega - pole) < kPoleTolerance * omega0) {
        std::ostringstream msg;
        msg << what << " has a pole at omega = " << pole
            << " rad/s; use the time-integral form there";
        throw PreconditionError(msg.str());
    }
}

bool near_integer(double x, long& k) {
    const double r = std::round(x);
    if (std::abs(x - r) > kIntegerTolerance) {
        return false;
    }
    k = static_cast<long>(r);
    return true;
}

}  // namespace

Kinematics polynomial_qc(const PhysicalParams& params, double t) {
    const double T = params.duration;
    const double d = params.distance;
    const double s = t / T;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return {d * s3 * (10.0 - 15.0 * s + 6.0 * s2),
            d * s2 * (30.0 - 60.0 * s + 30.0 * s2) / T,
            d * s * (60.0 - 180.0 * s + 120.0 * s2) / (T * T)};
}

double static_closed_form(const PhysicalParams& params, double omega, int n) {
    const double w0 = params.omega0;
    check_pole(omega, 2.0 * w0, w0, "static closed form");
    const double T = params.duration;
    const double w2 = omega * omega;
    const double denom = w2 - 4.0 * w0 * w0;
    const double a = w2 * std::sin(omega * T) - 2.0 * omega * w0 * std::sin(2.0 * w0 * T);
    const double b = std::cos(omega * T) - std::cos(2.0 * w0 * T);
    const double bracket = a * a + 4.0 * w2 * w0 * w0 * b * b;
    return (2.0 * n + 1.0) * bracket / (4.0 * denom * denom);
}

double static_commensurate(const PhysicalParams& params, double omega, int n) {
    const double w0 = params.omega0;
    check_pole(omega, 2.0 * w0, w0, "static closed form");
    const double T = params.duration;
    const long k = std::lround(omega * T / std::numbers::pi);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double denom = omega * omega - 4.0 * w0 * w0;
    return 2.0 * (2.0 * n + 1.0) * omega * omega * w0 * w0 *
           (1.0 - sign * std::cos(2.0 * w0 * T)) / (denom * denom);
}

std::string to_string(Commensurability c) {
    switch (c) {
        case Commensurability::VanishEven:
            return "vanish_even";
        case Commensurability::VanishOdd:
            return "vanish_odd";
        case Commensurability::MaxEven:
            return "max_even";
        case Commensurability::MaxOdd:
            return "max_odd";
        case Commensurability::NonCommensurate:
            return "non_commensurate";
    }
    return "unknown";
}

ConditionClass classify_commensurate(const PhysicalParams& params, double omega) {
    ConditionClass c;
    const double T = params.duration;
    long k = 0;
    long m = 0;
    if (!near_integer(omega * T / std::numbers::pi, k) ||
        !near_integer(2.0 * params.omega0 * T / std::numbers::pi, m)) {
        return c;
    }
    const bool k_even = (k % 2 == 0);
    const bool m_even = (m % 2 == 0);
    c.i = k_even ? k / 2 : (k - 1) / 2;
    c.j = m_even ? m / 2 : (m - 1) / 2;
    if (k_even) {
        c.kind = m_even ? Commensurability::VanishEven : Commensurability::MaxEven;
    } else {
        c.kind = m_even ? Commensurability::MaxOdd : Commensurability::VanishOdd;
    }
    return c;
}

double envelope_static(const PhysicalParams& params, double omega, double duration, int n,
                       bool oscillating) {
    const double w0 = params.omega0;
    check_pole(omega, 2.0 * w0, w0, "static envelope");
    const double bracket = oscillating ? 1.0 + std::abs(std::cos(2.0 * w0 * duration)) : 2.0;
    const double denom = omega * omega - 4.0 * w0 * w0;
    return 2.0 * (2.0 * n + 1.0) * omega * omega * w0 * w0 * bracket / (denom * denom);
}

double envelope_dynamical(const PhysicalParams& params, double omega, double duration,
                          bool oscillating) {
    const double w0 = params.omega0;
    check_pole(omega, w0, w0, "dynamical envelope");
    const double bracket = oscillating ? 1.0 + std::abs(std::cos(w0 * duration)) : 2.0;
    const double denom = w0 * w0 - omega * omega;
    const double d2 = denom * denom;
    const double T3 = duration * duration * duration;
    const double joules = 57600.0 * params.mass * params.distance * params.distance * omega *
                          omega * w0 * w0 * bracket / (T3 * T3 * d2 * d2);
    return joules / params.quantum();
}

double crossing_time(const PhysicalParams& params, double omega) {
    const double w0 = params.omega0;
    check_pole(omega, w0, w0, "crossing time");
    check_pole(omega, 2.0 * w0, w0, "crossing time");
    const double a = omega * omega - 4.0 * w0 * w0;
    const double b = omega * omega - w0 * w0;
    const double ratio = a / (b * b);
    const double inner = 28800.0 * params.mass * params.distance * params.distance /
                         params.quantum() * ratio * ratio;
    return std::pow(inner, 1.0 / 6.0);
}

double fourier_projection(const PhysicalParams& params, int K) {
    const double T = params.duration;
    const double nu = kTwoPi * K / T;
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-13;
    opts.initial_panels = numerics::panels_for(nu, 0.0, T, 4.0);
    const std::complex<double> I = numerics::integrate(
        [&](double t) { return polynomial_qc(params, t).acceleration * std::polar(1.0, -nu * t); },
        0.0, T, opts);
    return std::abs(I);
}

double fourier_projection_closed_form(const PhysicalParams& params, int K) {
    if (K == 0) {
        return 0.0;
    }
    const double k = std::abs(static_cast<double>(K));
    return 90.0 * params.distance /
           (std::numbers::pi * std::numbers::pi * params.duration * k * k * k);
}

CorridorReport corridor_check(const TrapTrajectory& trap, const PhysicalParams& params,
                              std::size_t n_samples) {
    if (n_samples < 1000) {
        throw PreconditionError("corridor_check needs n_samples >= 1000");
    }
    CorridorReport r;
    const double T = params.duration;
    const double d = params.distance;
    for (std::size_t k = 0; k <= n_samples; ++k) {
        const double t = T * static_cast<double>(k) / static_cast<double>(n_samples);
        const double q = trap(t);
        if (q - d > r.above) {
            r.above = q - d;
            r.argmax_above = t;
        }
        if (-q > r.below) {
            r.below = -q;
            r.argmax_below = t;
        }
    }
    return r;
}

double corridor_threshold(const PhysicalParams& params, double lo, double hi, double tol,
                          std::size_t n_samples) {
    const double d = params.distance;
    auto overshoots = [&](double product) {
        const PhysicalParams p = params.with_omega0(product / params.duration);
        const Protocol proto = Protocol::polynomial5(p);
        const CorridorReport r = corridor_check(trap_from_classical(proto, p), p, n_samples);
        return !r.inside(1e-12 * d);
    };
    if (!overshoots(lo) || overshoots(hi)) {
        throw PreconditionError("corridor_threshold: onset is not bracketed by [lo, hi]");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (overshoots(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        if (values[k] > values[k - 1] && values[k] >= values[k + 1]) {
            idx.push_back(k);
        }
    }
    return idx;
}

double largest_local_maximum(const std::vector<double>& grid, const std::vector<double>& values) {
    const auto idx = local_maxima(values);
    if (idx.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto best = *std::max_element(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    return grid[best];
}

ComponentScan scan_omega(const PhysicalParams& params, const Protocol& proto,
                         const std::vector<double>& omegas, int n) {
    ComponentScan s;
    s.omega = omegas;
    s.static_quanta.reserve(omegas.size());
    s.dynamical_quanta.reserve(omegas.size());
    for (double w : omegas) {
        const ExcitationReport r = second_order_energy_freq(
            params, proto, [w](double t) { return std::sin(w * t); }, n, w);
        s.static_quanta.push_back(r.static_quanta);
        s.dynamical_quanta.push_back(r.dynamical_quanta);
    }
    return s;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t k = 0; k < points; ++k) {
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    v.back() = hi;
    return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t points) {
    std::vector<double> v = linspace(std::log(lo), std::log(hi), points);
    for (double& x : v) {
        x = std::exp(x);
    }
    if (points > 1) {
        v.front() = lo;
        v.back() = hi;
    }
    return v;
}

}  // namespace shuttle

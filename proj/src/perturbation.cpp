#include "shuttle/perturbation.hpp"

#include "shuttle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace shuttle {

namespace {

constexpr double kFinalValueTolerance = 1e-10;

void require_vanishing_end(double value, const char* name) {
    if (std::abs(value) > kFinalValueTolerance) {
        std::ostringstream msg;
        msg << "Fourier form requires " << name << "(T) = 0, got " << value;
        throw PreconditionError(msg.str());
    }
}

}  // namespace

numerics::QuadratureOptions oscillatory_options(double max_omega, double span) {
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.initial_panels = numerics::panels_for(max_omega, 0.0, span);
    return opts;
}

std::string to_string(ExcitationMethod m) {
    switch (m) {
        case ExcitationMethod::TimeIntegral:
            return "time_integral";
        case ExcitationMethod::FourierForm:
            return "fourier_form";
        case ExcitationMethod::ClosedForm:
            return "closed_form";
        case ExcitationMethod::ExactODE:
            return "exact_ode";
    }
    return "unknown";
}

FirstOrderSolution::FirstOrderSolution(Kind kind, PhysicalParams params, Protocol proto,
                                       TimeFunction shape, double max_omega)
    : kind_(kind),
      params_(params),
      proto_(std::move(proto)),
      shape_(std::move(shape)),
      max_omega_(max_omega) {}

FirstOrderState FirstOrderSolution::at(double t) const {
    FirstOrderState s;
    if (t <= 0.0) {
        return s;
    }
    const double w0 = params_.omega0;
    const auto& f = shape_;
    if (kind_ == Kind::Frequency) {
        const auto rho_opts = oscillatory_options(2.0 * w0 + max_omega_, t);
        s.rho1 = -w0 * numerics::integrate(
                           [&](double tp) { return f(tp) * std::sin(2.0 * w0 * (t - tp)); }, 0.0,
                           t, rho_opts);
        s.rho1_dot = -2.0 * w0 * w0 *
                     numerics::integrate(
                         [&](double tp) { return f(tp) * std::cos(2.0 * w0 * (t - tp)); }, 0.0, t,
                         rho_opts);
        const auto q_opts = oscillatory_options(w0 + max_omega_, t);
        const Protocol& proto = proto_;
        s.qc1 = 2.0 / w0 *
                numerics::integrate(
                    [&](double tp) {
                        return f(tp) * proto.acceleration(tp) * std::sin(w0 * (t - tp));
                    },
                    0.0, t, q_opts);
        s.qc1_dot = 2.0 * numerics::integrate(
                              [&](double tp) {
                                  return f(tp) * proto.acceleration(tp) * std::cos(w0 * (t - tp));
                              },
                              0.0, t, q_opts);
        return s;
    }
    const double d = params_.distance;
    const auto q_opts = oscillatory_options(w0 + max_omega_, t);
    s.qc1 = d * w0 *
            numerics::integrate([&](double tp) { return f(tp) * std::sin(w0 * (t - tp)); }, 0.0,
                                t, q_opts);
    s.qc1_dot = d * w0 * w0 *
                numerics::integrate([&](double tp) { return f(tp) * std::cos(w0 * (t - tp)); },
                                    0.0, t, q_opts);
    return s;
}

FirstOrderSolution first_order_freq(const PhysicalParams& params, const Protocol& proto,
                                    TimeFunction f, double max_omega) {
    return FirstOrderSolution(FirstOrderSolution::Kind::Frequency, params, proto, std::move(f),
                              max_omega);
}

FirstOrderSolution first_order_pos(const PhysicalParams& params, const Protocol& proto,
                                   TimeFunction h, double max_omega) {
    return FirstOrderSolution(FirstOrderSolution::Kind::Position, params, proto, std::move(h),
                              max_omega);
}

ExcitationReport second_order_energy_freq(const PhysicalParams& params, const Protocol& proto,
                                          TimeFunction f, int n, double max_omega) {
    const double w0 = params.omega0;
    const double T = params.duration;
    const double fT = f(T);
    const FirstOrderState s = first_order_freq(params, proto, f, max_omega).final_state();

    const double dyn = 0.5 * params.mass * w0 * w0 *
                       (s.qc1 * s.qc1 + s.qc1_dot * s.qc1_dot / (w0 * w0));
    const double a = 2.0 * s.rho1 + fT;
    const double b = s.rho1_dot / w0;
    // (hbar Omega0 / 4)(2n+1){...} in units of hbar Omega0
    const double stat = 0.25 * (2.0 * n + 1.0) * (a * a + b * b);

    ExcitationReport r;
    r.dynamical_quanta = dyn / params.quantum();
    r.static_quanta = stat;
    r.total_quanta = r.static_quanta + r.dynamical_quanta;
    r.method = ExcitationMethod::TimeIntegral;
    return r;
}

ExcitationReport second_order_energy_freq(const PhysicalParams& params, const Protocol& proto,
                                          const Perturbation& pert, int n) {
    if (!pert.is_frequency()) {
        throw PreconditionError("second_order_energy_freq needs a frequency perturbation");
    }
    return second_order_energy_freq(params, proto, pert.shape(), n, pert.max_omega());
}

ExcitationReport second_order_energy_pos(const PhysicalParams& params, const Protocol& proto,
                                         TimeFunction h, int n, double max_omega) {
    (void)n;  // the width terms vanish: rho^(1) = 0
    const double w0 = params.omega0;
    const double d = params.distance;
    const double hT = h(params.duration);
    const FirstOrderState s = first_order_pos(params, proto, h, max_omega).final_state();
    const double x = s.qc1 - d * hT;
    const double stat = 0.5 * params.mass * w0 * w0 * (x * x + s.qc1_dot * s.qc1_dot / (w0 * w0));

    ExcitationReport r;
    r.static_quanta = stat / params.quantum();
    r.dynamical_quanta = 0.0;
    r.total_quanta = r.static_quanta;
    r.method = ExcitationMethod::TimeIntegral;
    return r;
}

ExcitationReport second_order_energy_pos(const PhysicalParams& params, const Protocol& proto,
                                         const Perturbation& pert, int n) {
    if (!pert.is_position()) {
        throw PreconditionError("second_order_energy_pos needs a position perturbation");
    }
    return second_order_energy_pos(params, proto, pert.shape(), n, pert.max_omega());
}

double fourier_dynamical(const PhysicalParams& params, const Protocol& proto, TimeFunction f,
                         double max_omega) {
    const double w0 = params.omega0;
    const double T = params.duration;
    const std::complex<double> I = numerics::integrate(
        [&](double t) {
            return f(t) * proto.acceleration(t) * std::polar(1.0, -w0 * t);
        },
        0.0, T, oscillatory_options(w0 + max_omega, T));
    return 2.0 * params.mass * std::norm(I) / params.quantum();
}

double fourier_static_freq(const PhysicalParams& params, TimeFunction f, int n,
                           double max_omega) {
    const double w0 = params.omega0;
    const double T = params.duration;
    require_vanishing_end(f(T), "f");
    const std::complex<double> I = numerics::integrate(
        [&](double t) { return f(t) * std::polar(1.0, -2.0 * w0 * t); }, 0.0, T,
        oscillatory_options(2.0 * w0 + max_omega, T));
    // hbar Omega0^3 (2n+1)|I|^2 / (hbar Omega0)
    return w0 * w0 * (2.0 * n + 1.0) * std::norm(I);
}

double fourier_static_pos(const PhysicalParams& params, TimeFunction h, int n,
                          double max_omega) {
    (void)n;
    const double w0 = params.omega0;
    const double T = params.duration;
    const double d = params.distance;
    require_vanishing_end(h(T), "h");
    const std::complex<double> I = numerics::integrate(
        [&](double t) { return h(t) * std::polar(1.0, -w0 * t); }, 0.0, T,
        oscillatory_options(w0 + max_omega, T));
    const double w0sq = w0 * w0;
    return 0.5 * params.mass * w0sq * w0sq * d * d * std::norm(I) / params.quantum();
}

double eta_ratio(const PhysicalParams& params, int n) {
    return 2.0 * params.hbar * (2.0 * n + 1.0) /
           (params.mass * params.omega0 * params.distance * params.distance);
}

}  // namespace shuttle

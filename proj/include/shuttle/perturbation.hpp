#pragma once

// Second-order excitation for frequency and position perturbations, in
// time-integral and Fourier-transform form. All reports are per unit
// lambda^2 (or epsilon^2) and in quanta of hbar * Omega0.

#include "shuttle/model.hpp"
#include "shuttle/quadrature.hpp"

#include <string>

namespace shuttle {

/// rho^(1), rho^(1)', q_c^(1), q_c^(1)' at one instant.
struct FirstOrderState {
    double rho1 = 0.0;
    double rho1_dot = 0.0;
    double qc1 = 0.0;
    double qc1_dot = 0.0;
};

/// First-order corrections evaluated on demand from their convolution
/// integrals. Both initial values vanish identically.
class FirstOrderSolution {
public:
    enum class Kind { Frequency, Position };

    FirstOrderSolution(Kind kind, PhysicalParams params, Protocol proto, TimeFunction shape,
                       double max_omega);

    FirstOrderState at(double t) const;
    FirstOrderState final_state() const { return at(params_.duration); }

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
    PhysicalParams params_;
    Protocol proto_;
    TimeFunction shape_;
    double max_omega_;
};

enum class ExcitationMethod { TimeIntegral, FourierForm, ClosedForm, ExactODE };
enum class PerturbativeOrder { Second, Exact };

std::string to_string(ExcitationMethod m);

struct ExcitationReport {
    double static_quanta = 0.0;
    double dynamical_quanta = 0.0;
    double total_quanta = 0.0;
    ExcitationMethod method = ExcitationMethod::TimeIntegral;
    PerturbativeOrder order = PerturbativeOrder::Second;
    /// True when values are per lambda^2 (or epsilon^2).
    bool per_amplitude_squared = true;
};

/// rho^(1)(t) = -Omega0 int_0^t f sin[2 Omega0 (t - t')] dt' and
/// q_c^(1)(t) = (2/Omega0) int_0^t f q_c^(0)'' sin[Omega0 (t - t')] dt'.
/// `max_omega` is the fastest frequency in f (a panel hint only).
FirstOrderSolution first_order_freq(const PhysicalParams& params, const Protocol& proto,
                                    TimeFunction f, double max_omega = 0.0);

/// rho^(1) = 0 and q_c^(1)(t) = d Omega0 int_0^t h sin[Omega0 (t - t')] dt'.
FirstOrderSolution first_order_pos(const PhysicalParams& params, const Protocol& proto,
                                   TimeFunction h, double max_omega = 0.0);

/// E^(2) from the first-order endpoint values (valid for any f(T)).
ExcitationReport second_order_energy_freq(const PhysicalParams& params, const Protocol& proto,
                                          TimeFunction f, int n, double max_omega = 0.0);
ExcitationReport second_order_energy_freq(const PhysicalParams& params, const Protocol& proto,
                                          const Perturbation& pert, int n);

/// Position perturbation: purely static, independent of the protocol.
ExcitationReport second_order_energy_pos(const PhysicalParams& params, const Protocol& proto,
                                         TimeFunction h, int n, double max_omega = 0.0);
ExcitationReport second_order_energy_pos(const PhysicalParams& params, const Protocol& proto,
                                         const Perturbation& pert, int n);

/// 2 m |int_0^T f q_c^(0)'' e^{-i Omega0 t} dt|^2 in quanta per lambda^2.
double fourier_dynamical(const PhysicalParams& params, const Protocol& proto, TimeFunction f,
                         double max_omega = 0.0);

/// hbar Omega0^3 (2n+1) |int_0^T f e^{-2 i Omega0 t} dt|^2 in quanta per
/// lambda^2. Requires |f(T)| <= 1e-10, else PreconditionError.
double fourier_static_freq(const PhysicalParams& params, TimeFunction f, int n,
                           double max_omega = 0.0);

/// (m Omega0^4 d^2 / 2) |int_0^T h e^{-i Omega0 t} dt|^2 in quanta per
/// epsilon^2. Requires |h(T)| <= 1e-10.
double fourier_static_pos(const PhysicalParams& params, TimeFunction h, int n,
                          double max_omega = 0.0);

/// Ratio of the frequency to position static prefactors,
/// eta_n = 2 hbar (2n+1) / (m Omega0 d^2).
double eta_ratio(const PhysicalParams& params, int n);

/// Quadrature settings used throughout this module for integrals over [0, t]
/// whose integrands oscillate at up to `max_omega` rad/s.
numerics::QuadratureOptions oscillatory_options(double max_omega, double span);

}  // namespace shuttle

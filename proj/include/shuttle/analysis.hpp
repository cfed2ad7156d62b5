#pragma once

// Closed-form analysis of the quintic reference protocol under a sinusoidal
// frequency perturbation f(t) = sin(omega t): static closed form, the
// commensurability conditions, envelopes, their crossing time, Fourier
// projections of the acceleration and the [0, d] corridor.

#include "shuttle/dynamics.hpp"
#include "shuttle/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace shuttle {

/// q_c^(0)(t) = d [10 s^3 - 15 s^4 + 6 s^5], s = t / T, and derivatives.
Kinematics polynomial_qc(const PhysicalParams& params, double t);

/// Static second-order excitation for f = sin(omega t), any T, in quanta per
/// lambda^2. Throws PreconditionError within 1e-6 Omega0 of omega = 2 Omega0.
double static_closed_form(const PhysicalParams& params, double omega, int n);

/// Static excitation at omega T = k pi:
/// 2 (2n+1) omega^2 Omega0^2 [1 - (-1)^k cos(2 Omega0 T)] / (omega^2 - 4 Omega0^2)^2.
double static_commensurate(const PhysicalParams& params, double omega, int n);

enum class Commensurability { VanishEven, VanishOdd, MaxEven, MaxOdd, NonCommensurate };

std::string to_string(Commensurability c);

/// Class of (omega T / pi, 2 Omega0 T / pi). For the even cases i = k / 2,
/// for the odd ones i = (k - 1) / 2; j is defined the same way from
/// 2 Omega0 T / pi. Both are -1 for NonCommensurate.
struct ConditionClass {
    Commensurability kind = Commensurability::NonCommensurate;
    long i = -1;
    long j = -1;

    bool vanishing() const noexcept {
        return kind == Commensurability::VanishEven || kind == Commensurability::VanishOdd;
    }
    bool maximal() const noexcept {
        return kind == Commensurability::MaxEven || kind == Commensurability::MaxOdd;
    }
};

/// Integer test uses tolerance 1e-9 on the fractional part.
ConditionClass classify_commensurate(const PhysicalParams& params, double omega);

/// F_stat in quanta per lambda^2; with oscillating = false the bracket
/// [1 + |cos(2 Omega0 T)|] is replaced by 2.
double envelope_static(const PhysicalParams& params, double omega, double duration, int n,
                       bool oscillating = true);

/// F_dyn = 57600 m d^2 omega^2 Omega0^2 [1 + |cos(Omega0 T)|] / [T^6 (Omega0^2 - omega^2)^4]
/// in quanta per lambda^2.
double envelope_dynamical(const PhysicalParams& params, double omega, double duration,
                          bool oscillating = true);

/// Duration at which the non-oscillating envelopes (n = 0) cross.
double crossing_time(const PhysicalParams& params, double omega);

/// |int_0^T q''(t) e^{-2 pi i K t / T} dt| for the quintic, by quadrature.
double fourier_projection(const PhysicalParams& params, int K);

/// 90 d / (pi^2 T |K|^3), and 0 for K = 0.
double fourier_projection_closed_form(const PhysicalParams& params, int K);

/// Largest excursions of Q0 outside [0, d], both reported as nonnegative
/// distances.
struct CorridorReport {
    double above = 0.0;  // max(Q0 - d, 0)
    double below = 0.0;  // max(-Q0, 0)
    double argmax_above = 0.0;
    double argmax_below = 0.0;

    bool inside(double tol = 0.0) const noexcept { return above <= tol && below <= tol; }
};

/// Samples the trap path on n_samples + 1 uniform points over [0, T].
CorridorReport corridor_check(const TrapTrajectory& trap, const PhysicalParams& params,
                              std::size_t n_samples);

/// Smallest Omega0 T in [lo, hi] beyond which the quintic's trap path stays
/// inside [0, d], by bisection to `tol` on the product.
double corridor_threshold(const PhysicalParams& params, double lo = 2.0, double hi = 3.0,
                          double tol = 1e-6, std::size_t n_samples = 20000);

/// Interior three-point maxima: values[k-1] < values[k] >= values[k+1].
std::vector<std::size_t> local_maxima(const std::vector<double>& values);

/// Grid point of the largest local maximum, or NaN when there is none.
double largest_local_maximum(const std::vector<double>& grid, const std::vector<double>& values);

/// Static and dynamical second-order components (time-integral form) of
/// f = sin(omega t) for each omega.
struct ComponentScan {
    std::vector<double> omega;
    std::vector<double> static_quanta;
    std::vector<double> dynamical_quanta;
};

ComponentScan scan_omega(const PhysicalParams& params, const Protocol& proto,
                         const std::vector<double>& omegas, int n);

/// `points` uniformly spaced values over [lo, hi] (a single point gives lo).
std::vector<double> linspace(double lo, double hi, std::size_t points);
/// Logarithmically spaced values over [lo, hi].
std::vector<double> logspace(double lo, double hi, std::size_t points);

}  // namespace shuttle

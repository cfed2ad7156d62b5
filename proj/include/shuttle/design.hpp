#pragma once

// Trajectory design with a vanishing Fourier transform of the acceleration
// at the perturbation side bands: the auxiliary-function method (one or
// several frequencies) and the sine-series ansatz with optional cancellation
// of derivatives of the target integral in omega and Omega0.

#include "shuttle/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace shuttle {

/// I(omega, Omega0) = int_0^T sin(omega t) q''(t) e^{-i Omega0 t} dt (m/s), by
/// quadrature.
std::complex<double> target_integral(const Protocol& proto, double omega);
/// Same with a trap frequency other than the protocol's own Omega0.
std::complex<double> target_integral(const Protocol& proto, double omega, double omega0);

/// Auxiliary function g(s) = s^e (s - 1)^e (s - 1/2), s = t / T, e = 4p + 1,
/// and the elementary symmetric sums E_j of {[(Omega0 +- omega_i) T]^2}.
struct AuxFunctionSpec {
    std::vector<double> frequencies;  // rad/s
    int exponent = 5;                 // 4p + 1
    std::vector<double> symmetric_sums;  // E_0 = 1, ..., E_{2p}
    /// Scale K with q''(t) = K sum_j E_j g^(4p - 2j)(s) (m/s^2).
    double normalization = 0.0;

    int order() const noexcept { return (exponent - 1) / 4; }
};

/// Checks distinctness and omega_i != Omega0 (DesignError otherwise) and
/// fixes K from q(T) = d.
AuxFunctionSpec aux_function_spec(const PhysicalParams& params, const std::vector<double>& omegas);

/// k-th derivative (k >= 0) of g with respect to s; k = -1, -2 give the
/// single and double integrals from 0.
double aux_g(int exponent, int k, double s);

Protocol design_aux_single(const PhysicalParams& params, double omega);
Protocol design_aux_multi(const PhysicalParams& params, const std::vector<double>& omegas);

/// I_j(omega, Omega0) = int_0^T sin(omega t) sin(j pi t / T) e^{-i Omega0 t} dt
/// in closed form; near a removable singularity the integral is evaluated by
/// quadrature instead.
std::complex<double> ansatz_Ij(const PhysicalParams& params, int j, double omega);

/// d^r/d omega^r d^s/d Omega0^s of I_j, by quadrature under the integral.
std::complex<double> ansatz_Ij_derivative(const PhysicalParams& params, int j, double omega,
                                          int r, int s);

/// sum_j a_j I_j(omega, Omega0) from the closed form.
std::complex<double> ansatz_integral(const PhysicalParams& params, const std::vector<double>& a,
                                     double omega);

struct DesignConstraints {
    std::vector<double> targets;  // rad/s
    int omega_derivatives = 0;    // cancel d^r I / d omega^r, r = 1..this
    int omega0_derivatives = 0;   // cancel d^s I / d Omega0^s, s = 1..this
    /// Number of sine terms; defaults to the row count.
    std::optional<std::size_t> terms;
    /// Largest admissible condition number.
    double max_condition = 1e12;

    std::size_t row_count() const noexcept {
        return 2 + 2 * targets.size() *
                       static_cast<std::size_t>(1 + omega_derivatives + omega0_derivatives);
    }
};

/// Linear constraints on b_j = a_j T^2 / d. Rows: q(T) = d, q'(T) = 0, then
/// Re and Im of each cancelled integral (scaled by T^{-(1+r+s)}).
struct AnsatzSystem {
    std::size_t terms = 0;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
    /// a_j in m/s^2.
    std::vector<double> coefficients;
    /// d / T^2, converting b to a.
    double scale = 0.0;
    double condition_number = 0.0;
    std::size_t rank = 0;
    double residual = 0.0;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t nullspace_dimension() const noexcept { return terms - rank; }
};

/// Builds the constraint rows only.
AnsatzSystem assemble_ansatz(const PhysicalParams& params, const DesignConstraints& c);

struct FourierDesign {
    Protocol protocol;
    AnsatzSystem system;
};

/// Solves the rows (minimum norm when underdetermined). Throws DesignError
/// for an invalid request or a condition number above c.max_condition.
FourierDesign design_fourier(const PhysicalParams& params, const DesignConstraints& c);

/// q''(t) = sum_j a_j sin(j pi t / T), integrated twice from rest at 0.
Protocol trajectory_from_coeffs(const PhysicalParams& params, std::vector<double> a);

}  // namespace shuttle

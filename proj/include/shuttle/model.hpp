#pragma once

// Domain types shared by every module: physical parameters, perturbation
// functions, ideal classical trajectories (protocols) and energies in quanta.
// All quantities are SI internally.

#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace shuttle {

inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// (m, Omega0, d, T) plus hbar.
struct PhysicalParams {
    double mass = 0.0;       // kg
    double omega0 = 0.0;     // rad/s, unperturbed angular trap frequency
    double distance = 0.0;   // m
    double duration = 0.0;   // s
    double hbar = kHbar;     // J s

    /// hbar * Omega0, the energy quantum used for every "quanta" value.
    double quantum() const noexcept { return hbar * omega0; }

    PhysicalParams with_duration(double t) const {
        PhysicalParams p = *this;
        p.duration = t;
        return p;
    }
    PhysicalParams with_omega0(double w) const {
        PhysicalParams p = *this;
        p.omega0 = w;
        return p;
    }
    PhysicalParams with_distance(double d) const {
        PhysicalParams p = *this;
        p.distance = d;
        return p;
    }
};

/// Real-valued function of time, f(t) or h(t).
using TimeFunction = std::function<double(double)>;

enum class PerturbationKind {
    FrequencySine,
    FrequencySum,
    FrequencyTabulated,
    PositionSine,
    PositionTabulated,
};

/// One term weight * sin(omega t + phase).
struct SineComponent {
    double omega = 0.0;  // rad/s
    double phase = 0.0;  // rad
    double weight = 1.0;
};

/// Frequency perturbation Omega(t) = Omega0 [1 + lambda f(t)] or position
/// perturbation Q(t) = Q0(t) + epsilon d h(t).
struct Perturbation {
    PerturbationKind kind = PerturbationKind::FrequencySine;
    double lambda = 0.0;
    double epsilon = 0.0;
    std::vector<SineComponent> components;
    /// Uniform samples of f or h on [0, sample_span].
    std::vector<double> samples;
    double sample_span = 0.0;

    static Perturbation frequency_sine(double lambda, double omega);
    static Perturbation frequency_sum(double lambda, std::vector<SineComponent> components);
    static Perturbation frequency_tabulated(double lambda, std::vector<double> samples,
                                            double span);
    static Perturbation position_sine(double epsilon, double omega);
    static Perturbation position_tabulated(double epsilon, std::vector<double> samples,
                                           double span);

    bool is_frequency() const noexcept;
    bool is_position() const noexcept { return !is_frequency(); }
    /// lambda for frequency kinds, epsilon for position kinds.
    double amplitude() const noexcept { return is_frequency() ? lambda : epsilon; }
    /// Same perturbation with a different amplitude.
    Perturbation with_amplitude(double value) const;
    /// Shape function as a callable (captures a copy).
    TimeFunction shape() const;
    /// Largest angular frequency present (0 for tabulated kinds).
    double max_omega() const noexcept;
};

/// f(t) or h(t). Tabulated kinds interpolate linearly and throw RangeError
/// outside [0, span].
double eval_perturbation(const Perturbation& p, double t);

enum class Severity { Warning, Error };

struct ValidationIssue {
    Severity severity;
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const noexcept;
    bool has_warnings() const noexcept;
    std::string summary() const;
};

/// Checks every invariant of the inputs; never throws.
ValidationReport validate(const PhysicalParams& params, const Perturbation& pert);
ValidationReport validate(const PhysicalParams& params);

/// q, dq/dt and d2q/dt2 at one instant.
struct Kinematics {
    double position = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;
};

enum class ProtocolKind { Polynomial5, FourierSine, AuxFunction, OctExtremal, Tabulated };

std::string to_string(ProtocolKind kind);

/// Evaluator behind a Protocol.
class TrajectoryShape {
public:
    virtual ~TrajectoryShape() = default;
    virtual Kinematics eval(double t) const = 0;
};

/// Scaled residuals of the six STA boundary conditions.
struct BoundaryReport {
    double position_start = 0.0;      // |q(0)| / d
    double velocity_start = 0.0;      // |q'(0)| T / d
    double acceleration_start = 0.0;  // |q''(0)| T^2 / d
    double position_end = 0.0;        // |q(T) - d| / d
    double velocity_end = 0.0;
    double acceleration_end = 0.0;
    bool acceleration_checked = true;

    /// Worst residual over the checked conditions.
    double worst() const noexcept;
    bool compliant(double tol = 1e-10) const noexcept { return worst() <= tol; }
    bool velocity_compliant(double tol = 1e-10) const noexcept {
        return velocity_start <= tol && velocity_end <= tol;
    }
};

/// Ideal classical trajectory q_c^(0)(t) on [0, T].
class Protocol {
public:
    Protocol(ProtocolKind kind, PhysicalParams params, std::vector<double> coefficients,
             std::shared_ptr<const TrajectoryShape> shape);

    static Protocol polynomial5(const PhysicalParams& params);
    /// Tabulated q, q' and q'' on a uniform grid over [0, T].
    static Protocol tabulated(const PhysicalParams& params, std::vector<double> position,
                              std::vector<double> velocity, std::vector<double> acceleration);

    Kinematics eval(double t) const { return shape_->eval(t); }
    double position(double t) const { return eval(t).position; }
    double velocity(double t) const { return eval(t).velocity; }
    double acceleration(double t) const { return eval(t).acceleration; }

    ProtocolKind kind() const noexcept { return kind_; }
    const PhysicalParams& params() const noexcept { return params_; }
    /// {a_j} for FourierSine; kind-specific constants otherwise.
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }

    BoundaryReport boundary_check() const;

private:
    ProtocolKind kind_;
    PhysicalParams params_;
    std::vector<double> coefficients_;
    std::shared_ptr<const TrajectoryShape> shape_;
};

/// Energy in units of hbar * Omega0 for initial level n.
struct EnergyQuanta {
    double value = 0.0;
    int level = 0;
};

}  // namespace shuttle

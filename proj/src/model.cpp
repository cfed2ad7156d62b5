#include "shuttle/model.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/interp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shuttle {

namespace {

constexpr double kAmplitudeCap = 0.2;
constexpr double kAmplitudeWarn = 0.05;

class Polynomial5Shape final : public TrajectoryShape {
public:
    Polynomial5Shape(double d, double T) : d_(d), T_(T) {}
    Kinematics eval(double t) const override {
        const double s = t / T_;
        const double s2 = s * s;
        const double s3 = s2 * s;
        return {d_ * (10.0 * s3 - 15.0 * s3 * s + 6.0 * s3 * s2),
                d_ / T_ * (30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2),
                d_ / (T_ * T_) * (60.0 * s - 180.0 * s2 + 120.0 * s3)};
    }

private:
    double d_;
    double T_;
};

class TabulatedShape final : public TrajectoryShape {
public:
    TabulatedShape(double T, std::vector<double> q, std::vector<double> v, std::vector<double> a)
        : position_(0.0, T, q, v), acceleration_(0.0, T, std::move(a)) {}
    Kinematics eval(double t) const override {
        const auto pv = position_(t);
        return {pv.value, pv.derivative, acceleration_(t)};
    }

private:
    numerics::HermiteGrid position_;
    numerics::LinearGrid acceleration_;
};

bool tabulated_kind(PerturbationKind k) {
    return k == PerturbationKind::FrequencyTabulated || k == PerturbationKind::PositionTabulated;
}

}  // namespace

Perturbation Perturbation::frequency_sine(double lambda, double omega) {
    Perturbation p;
    p.kind = PerturbationKind::FrequencySine;
    p.lambda = lambda;
    p.components = {{omega, 0.0, 1.0}};
    return p;
}

Perturbation Perturbation::frequency_sum(double lambda, std::vector<SineComponent> components) {
    Perturbation p;
    p.kind = PerturbationKind::FrequencySum;
    p.lambda = lambda;
    p.components = std::move(components);
    return p;
}

Perturbation Perturbation::frequency_tabulated(double lambda, std::vector<double> samples,
                                               double span) {
    Perturbation p;
    p.kind = PerturbationKind::FrequencyTabulated;
    p.lambda = lambda;
    p.samples = std::move(samples);
    p.sample_span = span;
    return p;
}

Perturbation Perturbation::position_sine(double epsilon, double omega) {
    Perturbation p;
    p.kind = PerturbationKind::PositionSine;
    p.epsilon = epsilon;
    p.components = {{omega, 0.0, 1.0}};
    return p;
}

Perturbation Perturbation::position_tabulated(double epsilon, std::vector<double> samples,
                                              double span) {
    Perturbation p;
    p.kind = PerturbationKind::PositionTabulated;
    p.epsilon = epsilon;
    p.samples = std::move(samples);
    p.sample_span = span;
    return p;
}

bool Perturbation::is_frequency() const noexcept {
    return kind == PerturbationKind::FrequencySine || kind == PerturbationKind::FrequencySum ||
           kind == PerturbationKind::FrequencyTabulated;
}

Perturbation Perturbation::with_amplitude(double value) const {
    Perturbation p = *this;
    if (is_frequency()) {
        p.lambda = value;
    } else {
        p.epsilon = value;
    }
    return p;
}

TimeFunction Perturbation::shape() const {
    if (tabulated_kind(kind)) {
        numerics::LinearGrid grid(0.0, sample_span, samples);
        return [grid](double t) { return grid(t); };
    }
    return [comps = components](double t) {
        double v = 0.0;
        for (const auto& c : comps) {
            v += c.weight * std::sin(c.omega * t + c.phase);
        }
        return v;
    };
}

double Perturbation::max_omega() const noexcept {
    double w = 0.0;
    for (const auto& c : components) {
        w = std::max(w, std::abs(c.omega));
    }
    return w;
}

double eval_perturbation(const Perturbation& p, double t) {
    if (tabulated_kind(p.kind)) {
        if (p.samples.size() < 2) {
            throw RangeError("tabulated perturbation needs at least two samples");
        }
        return numerics::LinearGrid(0.0, p.sample_span, p.samples)(t);
    }
    double v = 0.0;
    for (const auto& c : p.components) {
        v += c.weight * std::sin(c.omega * t + c.phase);
    }
    return v;
}

bool ValidationReport::ok() const noexcept {
    return std::none_of(issues.begin(), issues.end(),
                        [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

bool ValidationReport::has_warnings() const noexcept {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == Severity::Warning; });
}

std::string ValidationReport::summary() const {
    if (issues.empty()) {
        return "OK";
    }
    std::ostringstream out;
    for (std::size_t k = 0; k < issues.size(); ++k) {
        if (k) {
            out << "; ";
        }
        out << (issues[k].severity == Severity::Error ? "error" : "warning") << " ["
            << issues[k].field << "] " << issues[k].message;
    }
    return out.str();
}

ValidationReport validate(const PhysicalParams& params) {
    ValidationReport report;
    auto positive = [&](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            report.issues.push_back({Severity::Error, field, std::string(field) + " > 0"});
        }
    };
    positive(params.mass, "mass");
    positive(params.omega0, "omega0");
    positive(params.distance, "distance");
    positive(params.duration, "duration");
    positive(params.hbar, "hbar");
    const double product = params.omega0 * params.duration;
    if (!std::isfinite(product) || product == 0.0) {
        report.issues.push_back(
            {Severity::Error, "omega0*duration", "omega0*duration finite and nonzero"});
    }
    return report;
}

ValidationReport validate(const PhysicalParams& params, const Perturbation& pert) {
    ValidationReport report = validate(params);
    const char* name = pert.is_frequency() ? "lambda" : "epsilon";
    const double a = pert.amplitude();
    // a = 0 is the unperturbed limit and allowed.
    if (!(a >= 0.0) || a > kAmplitudeCap) {
        report.issues.push_back({Severity::Error, name, std::string(name) + " in [0, 0.2]"});
    } else if (a > kAmplitudeWarn) {
        report.issues.push_back({Severity::Warning, name, "perturbative accuracy degraded"});
    }
    switch (pert.kind) {
        case PerturbationKind::FrequencySine:
        case PerturbationKind::PositionSine:
            if (pert.components.size() != 1 || pert.components[0].weight != 1.0 ||
                pert.components[0].phase != 0.0) {
                report.issues.push_back({Severity::Error, "components",
                                         "single sine needs one component, weight 1, phase 0"});
            }
            break;
        case PerturbationKind::FrequencySum:
            if (pert.components.empty()) {
                report.issues.push_back({Severity::Error, "components", "sum needs components"});
            }
            break;
        case PerturbationKind::FrequencyTabulated:
        case PerturbationKind::PositionTabulated:
            if (pert.samples.size() < 2) {
                report.issues.push_back({Severity::Error, "samples", "at least 2 samples"});
            }
            if (pert.sample_span < params.duration * (1.0 - 1e-12)) {
                report.issues.push_back({Severity::Error, "samples", "samples must cover [0, T]"});
            }
            break;
    }
    for (const auto& c : pert.components) {
        if (!std::isfinite(c.omega) || !std::isfinite(c.phase) || !std::isfinite(c.weight)) {
            report.issues.push_back({Severity::Error, "components", "non-finite component"});
        }
    }
    return report;
}

std::string to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::Polynomial5:
            return "polynomial5";
        case ProtocolKind::FourierSine:
            return "fourier_sine";
        case ProtocolKind::AuxFunction:
            return "aux_function";
        case ProtocolKind::OctExtremal:
            return "oct_extremal";
        case ProtocolKind::Tabulated:
            return "tabulated";
    }
    return "unknown";
}

double BoundaryReport::worst() const noexcept {
    double w = std::max({position_start, velocity_start, position_end, velocity_end});
    if (acceleration_checked) {
        w = std::max({w, acceleration_start, acceleration_end});
    }
    return w;
}

Protocol::Protocol(ProtocolKind kind, PhysicalParams params, std::vector<double> coefficients,
                   std::shared_ptr<const TrajectoryShape> shape)
    : kind_(kind),
      params_(params),
      coefficients_(std::move(coefficients)),
      shape_(std::move(shape)) {}

Protocol Protocol::polynomial5(const PhysicalParams& params) {
    return Protocol(ProtocolKind::Polynomial5, params, {10.0, -15.0, 6.0},
                    std::make_shared<Polynomial5Shape>(params.distance, params.duration));
}

Protocol Protocol::tabulated(const PhysicalParams& params, std::vector<double> position,
                             std::vector<double> velocity, std::vector<double> acceleration) {
    if (position.size() < 2 || velocity.size() != position.size() ||
        acceleration.size() != position.size()) {
        throw PreconditionError("tabulated protocol needs equal-length grids of >= 2 points");
    }
    return Protocol(ProtocolKind::Tabulated, params, {},
                    std::make_shared<TabulatedShape>(params.duration, std::move(position),
                                                     std::move(velocity),
                                                     std::move(acceleration)));
}

BoundaryReport Protocol::boundary_check() const {
    const double d = params_.distance;
    const double T = params_.duration;
    const Kinematics k0 = eval(0.0);
    const Kinematics k1 = eval(T);
    BoundaryReport r;
    r.position_start = std::abs(k0.position) / d;
    r.velocity_start = std::abs(k0.velocity) * T / d;
    r.acceleration_start = std::abs(k0.acceleration) * T * T / d;
    r.position_end = std::abs(k1.position - d) / d;
    r.velocity_end = std::abs(k1.velocity) * T / d;
    r.acceleration_end = std::abs(k1.acceleration) * T * T / d;
    r.acceleration_checked = kind_ != ProtocolKind::OctExtremal;
    return r;
}

}  // namespace shuttle

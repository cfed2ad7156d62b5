#pragma once

#include <stdexcept>
#include <string>

namespace shuttle {

/// Argument outside the domain a tabulated quantity is defined on.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A stated precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature, integration or linear-algebra failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the Ermakov/Newton integrator when rho leaves (0, inf).
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Trajectory design could not satisfy its constraints.
class DesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shuttle

#pragma once

#include "shuttle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace shuttle::numerics {

/// Uniform-grid samples on [t0, t1] with piecewise-linear evaluation.
class LinearGrid {
public:
    LinearGrid() = default;
    LinearGrid(double t0, double t1, std::vector<double> values)
        : t0_(t0), t1_(t1), values_(std::move(values)) {}

    double operator()(double t) const {
        const std::size_t n = values_.size();
        const double span = t1_ - t0_;
        const double slack = 1e-12 * std::abs(span);
        if (n < 2 || t < t0_ - slack || t > t1_ + slack) {
            throw RangeError("time outside tabulated range");
        }
        const double x = std::clamp((t - t0_) / span, 0.0, 1.0) * static_cast<double>(n - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(x), n - 2);
        const double w = x - static_cast<double>(k);
        return (1.0 - w) * values_[k] + w * values_[k + 1];
    }

    double start() const noexcept { return t0_; }
    double stop() const noexcept { return t1_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    double t0_ = 0.0;
    double t1_ = 0.0;
    std::vector<double> values_;
};

/// Cubic Hermite interpolation of y(t) from samples of y and dy/dt on a
/// uniform grid. Returns value and derivative.
class HermiteGrid {
public:
    HermiteGrid() = default;
    HermiteGrid(double t0, double t1, std::vector<double> y, std::vector<double> dy)
        : t0_(t0), t1_(t1), y_(std::move(y)), dy_(std::move(dy)) {}

    struct Sample {
        double value;
        double derivative;
    };

    Sample operator()(double t) const {
        const std::size_t n = y_.size();
        const double span = t1_ - t0_;
        const double slack = 1e-12 * std::abs(span);
        if (n < 2 || t < t0_ - slack || t > t1_ + slack) {
            throw RangeError("time outside tabulated range");
        }
        const double h = span / static_cast<double>(n - 1);
        const double x = std::clamp((t - t0_) / span, 0.0, 1.0) * static_cast<double>(n - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(x), n - 2);
        const double s = x - static_cast<double>(k);
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        const double value = h00 * y_[k] + h10 * h * dy_[k] + h01 * y_[k + 1] + h11 * h * dy_[k + 1];
        const double d00 = (6 * s2 - 6 * s) / h;
        const double d10 = 3 * s2 - 4 * s + 1;
        const double d01 = (-6 * s2 + 6 * s) / h;
        const double d11 = 3 * s2 - 2 * s;
        const double deriv = d00 * y_[k] + d10 * dy_[k] + d01 * y_[k + 1] + d11 * dy_[k + 1];
        return {value, deriv};
    }

private:
    double t0_ = 0.0;
    double t1_ = 0.0;
    std::vector<double> y_;
    std::vector<double> dy_;
};

}  // namespace shuttle::numerics

#pragma once

// Shared fixtures and independent oracles for the unit tests. The Simpson
// integrator here is deliberately unrelated to the library's Gauss-Legendre
// code so the two can check each other.

#include "shuttle/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

namespace testing {

/// 88Sr+ at 2 pi x 4 MHz, 50 um in 2 us.
inline shuttle::PhysicalParams fig1_params() {
    return {1.455e-25, shuttle::kTwoPi * 4e6, 50e-6, 2e-6};
}

inline double mhz(double v) { return shuttle::kTwoPi * v * 1e6; }

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Composite Simpson rule on `n` (even) intervals.
template <class F>
auto simpson(const F& f, double a, double b, std::size_t n) {
    if (n % 2) {
        ++n;
    }
    const double h = (b - a) / static_cast<double>(n);
    auto sum = f(a) + f(b);
    for (std::size_t k = 1; k < n; ++k) {
        const double w = (k % 2) ? 4.0 : 2.0;
        sum += w * f(a + h * static_cast<double>(k));
    }
    return sum * (h / 3.0);
}

/// Richardson-extrapolated Simpson (n and 2n intervals), error O(h^6).
template <class F>
auto simpson_rich(const F& f, double a, double b, std::size_t n) {
    const auto s1 = simpson(f, a, b, n);
    const auto s2 = simpson(f, a, b, 2 * n);
    return s2 + (s2 - s1) / 15.0;
}

/// int_0^T q''(t) e^{-i x t / T} dt for the quintic with d, T, by direct
/// antiderivative: (d/T) 60 [x^2 - 6ix + (-x^2 - 6ix + 12) e^{ix} - 12] e^{-ix} / x^4.
inline std::complex<double> quintic_acc_transform(double d, double T, double x) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> ex = std::exp(i * x);
    const std::complex<double> num = x * x - 6.0 * i * x + (-x * x - 6.0 * i * x + 12.0) * ex - 12.0;
    return (d / T) * 60.0 * num * std::exp(-i * x) / (x * x * x * x);
}

}  // namespace testing

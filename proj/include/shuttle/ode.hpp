#pragma once

#include <array>
#include <cstddef>

namespace shuttle::numerics {

template <std::size_t N>
using StateVec = std::array<double, N>;

/// One classical RK4 step of y' = rhs(t, y).
template <std::size_t N, class Rhs>
StateVec<N> rk4_step(const Rhs& rhs, double t, const StateVec<N>& y, double h) {
    auto axpy = [](const StateVec<N>& a, double s, const StateVec<N>& b) {
        StateVec<N> r;
        for (std::size_t i = 0; i < N; ++i) {
            r[i] = a[i] + s * b[i];
        }
        return r;
    };
    const StateVec<N> k1 = rhs(t, y);
    const StateVec<N> k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const StateVec<N> k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const StateVec<N> k4 = rhs(t + h, axpy(y, h, k3));
    StateVec<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

}  // namespace shuttle::numerics

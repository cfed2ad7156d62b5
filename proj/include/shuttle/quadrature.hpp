#pragma once

// Adaptive composite Gauss-Legendre quadrature.
//
// Each panel is integrated with an n-point Gauss-Legendre rule (n = 16 by
// default) and compared with the sum over its two halves. A panel is accepted
// once the difference falls below rel_tol * L1 * (panel width / interval),
// where L1 is the initial estimate of the integral of |f|. The accepted value
// is the two-half sum, so the realized error is typically far below rel_tol.

#include "shuttle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

namespace shuttle::numerics {

/// Nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Computes an n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // refresh derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

inline const GaussRule& gauss_legendre_16() {
    static const GaussRule rule = gauss_legendre(16);
    return rule;
}

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    /// Initial uniform panels; oscillatory callers pass a few per period.
    std::size_t initial_panels = 1;
    int max_depth = 30;
};

template <class V>
struct QuadratureResult {
    V value{};
    double error_estimate = 0.0;
    std::size_t panels = 0;
};

namespace detail {

template <class F>
auto panel_sum(const F& f, double a, double b, const GaussRule& rule) {
    using V = std::decay_t<decltype(f(a))>;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    V sum{};
    double l1 = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const V v = f(mid + half * rule.nodes[k]);
        sum += rule.weights[k] * v;
        l1 += rule.weights[k] * std::abs(v);
    }
    return std::pair<V, double>{sum * half, l1 * std::abs(half)};
}

}  // namespace detail

/// Integrates f over [a, b]; f may return double or std::complex<double>.
template <class F>
auto integrate_adaptive(const F& f, double a, double b, const QuadratureOptions& opts = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
    using V = std::decay_t<decltype(f(a))>;
    QuadratureResult<V> result;
    if (a == b) {
        return result;
    }
    const GaussRule& rule = gauss_legendre_16();
    const std::size_t n0 = opts.initial_panels == 0 ? 1 : opts.initial_panels;
    const double width = (b - a) / static_cast<double>(n0);

    struct Panel {
        double lo;
        double hi;
        V estimate;
        int depth;
    };
    std::vector<Panel> stack;
    stack.reserve(n0 + 64);
    double l1_total = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == n0) ? b : a + width * static_cast<double>(i + 1);
        auto [s, l1] = detail::panel_sum(f, lo, hi, rule);
        l1_total += l1;
        stack.push_back({lo, hi, s, 0});
    }
    const double span = std::abs(b - a);
    double worst_ratio = 0.0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.lo + p.hi);
        const V left = detail::panel_sum(f, p.lo, mid, rule).first;
        const V right = detail::panel_sum(f, mid, p.hi, rule).first;
        const V refined = left + right;
        const double err = std::abs(refined - p.estimate);
        const double share = std::abs(p.hi - p.lo) / span;
        const double tol = std::max(opts.rel_tol * l1_total, opts.abs_tol) * share;
        if (err <= tol || err == 0.0) {
            result.value += refined;
            result.error_estimate += err;
            ++result.panels;
            continue;
        }
        if (p.depth >= opts.max_depth) {
            worst_ratio = std::max(worst_ratio, tol > 0.0 ? err / tol : err);
            result.value += refined;
            result.error_estimate += err;
            ++result.panels;
            continue;
        }
        stack.push_back({p.lo, mid, left, p.depth + 1});
        stack.push_back({mid, p.hi, right, p.depth + 1});
    }
    if (worst_ratio > 0.0) {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge: achieved error estimate "
            << result.error_estimate << " against tolerance "
            << std::max(opts.rel_tol * l1_total, opts.abs_tol);
        throw NumericalError(msg.str());
    }
    return result;
}

/// Convenience wrapper returning only the value.
template <class F>
auto integrate(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
    return integrate_adaptive(f, a, b, opts).value;
}

/// Panel hint giving `per_period` panels per period of the fastest angular
/// frequency present in an integrand over [a, b].
inline std::size_t panels_for(double max_angular_frequency, double a, double b,
                              double per_period = 2.0) {
    const double periods = std::abs(max_angular_frequency * (b - a)) / (2.0 * std::numbers::pi);
    const double n = std::ceil(periods * per_period);
    return n < 4.0 ? std::size_t{4} : static_cast<std::size_t>(n);
}

}  // namespace shuttle::numerics

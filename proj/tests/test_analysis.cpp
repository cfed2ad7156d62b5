#include "support.hpp"

#include "shuttle/analysis.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/perturbation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace shuttle;
using testing::fig1_params;
using testing::mhz;
using testing::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

double time_integral_static(const PhysicalParams& p, double w, int n) {
    return second_order_energy_freq(p, Protocol::polynomial5(p), Perturbation::frequency_sine(0.01, w), n)
        .static_quanta;
}

}  // namespace

TEST_CASE("quintic kinematics") {
    const PhysicalParams p = fig1_params();
    const Protocol q = Protocol::polynomial5(p);
    for (double t : {0.0, 0.37e-6, 1.0e-6, 1.81e-6, 2e-6}) {
        const Kinematics a = polynomial_qc(p, t);
        const Kinematics b = q.eval(t);
        CHECK(a.position == doctest::Approx(b.position).epsilon(1e-14));
        CHECK(a.velocity == doctest::Approx(b.velocity).epsilon(1e-12));
        CHECK(a.acceleration == doctest::Approx(b.acceleration).epsilon(1e-13));
    }
    // q'' = 60 d / T^2 (s - 3 s^2 + 2 s^3)
    const double s = 0.3;
    CHECK(polynomial_qc(p, s * p.duration).acceleration ==
          doctest::Approx(60.0 * p.distance / (p.duration * p.duration) * (s - 3 * s * s + 2 * s * s * s)));
}

TEST_CASE("static closed form agrees with the time-integral form off the commensurate grid") {
    const PhysicalParams p = fig1_params();
    for (double f : {0.9, 2.7, 5.3, 7.77, 11.1}) {
        for (int n : {0, 1}) {
            CHECK(rel_diff(static_closed_form(p, mhz(f), n), time_integral_static(p, mhz(f), n)) < 1e-9);
        }
    }
    const PhysicalParams q = p.with_duration(0.731e-6);
    CHECK(rel_diff(static_closed_form(q, mhz(3.3), 0), time_integral_static(q, mhz(3.3), 0)) < 1e-9);
}

TEST_CASE("commensurate form is the closed form at omega T = k pi") {
    const PhysicalParams p = fig1_params().with_omega0(mhz(4.37));
    for (int k : {7, 20, 31}) {
        const double w = k * kPi / p.duration;
        CHECK(rel_diff(static_commensurate(p, w, 0), static_closed_form(p, w, 0)) < 1e-9);
    }
}

TEST_CASE("poles are rejected") {
    const PhysicalParams p = fig1_params();
    CHECK_THROWS_AS(static_closed_form(p, 2.0 * p.omega0, 0), PreconditionError);
    CHECK_THROWS_AS(static_commensurate(p, 2.0 * p.omega0 * (1 + 1e-9), 0), PreconditionError);
}

TEST_CASE("commensurability classes") {
    const PhysicalParams p = fig1_params();
    // omega T / pi = 24, 2 Omega0 T / pi = 32
    ConditionClass c = classify_commensurate(p, mhz(6.0));
    CHECK(c.kind == Commensurability::VanishEven);
    CHECK(c.i == 12);
    CHECK(c.j == 16);
    CHECK(c.vanishing());
    CHECK(static_closed_form(p, mhz(6.0), 0) < 1e-12);

    const PhysicalParams odd = p.with_omega0(17 * kPi / (2 * p.duration));
    c = classify_commensurate(odd, 25 * kPi / p.duration);
    CHECK(c.kind == Commensurability::VanishOdd);
    CHECK(c.i == 12);
    CHECK(c.j == 8);

    c = classify_commensurate(odd, 24 * kPi / p.duration);
    CHECK(c.kind == Commensurability::MaxEven);
    CHECK(c.maximal());
    c = classify_commensurate(p, 25 * kPi / p.duration);
    CHECK(c.kind == Commensurability::MaxOdd);
    CHECK(classify_commensurate(p, mhz(5.3)).kind == Commensurability::NonCommensurate);
    CHECK(classify_commensurate(p, mhz(5.3)).i == -1);
    CHECK(to_string(Commensurability::MaxOdd) == "max_odd");
}

TEST_CASE("maximal classes sit on the static envelope") {
    const PhysicalParams p = fig1_params();
    const double w = 25 * kPi / p.duration;
    const double bracket2 = 4.0 * w * w * p.omega0 * p.omega0 /
                            std::pow(w * w - 4 * p.omega0 * p.omega0, 2);
    CHECK(rel_diff(static_closed_form(p, w, 0), bracket2) < 1e-9);
    CHECK(rel_diff(envelope_static(p, w, p.duration, 0), bracket2) < 1e-12);
    CHECK(rel_diff(envelope_static(p, w, p.duration, 0, false), bracket2) < 1e-12);
}

TEST_CASE("static envelope bounds the commensurate values") {
    const PhysicalParams p = fig1_params().with_omega0(mhz(3.71));
    for (int k = 1; k < 60; ++k) {
        const double w = k * kPi / p.duration;
        if (std::abs(w - 2 * p.omega0) < 0.05 * p.omega0) {
            continue;
        }
        CHECK(static_commensurate(p, w, 0) <= envelope_static(p, w, p.duration, 0) * (1 + 1e-12));
    }
}

TEST_CASE("dynamical envelope formula") {
    const PhysicalParams p = fig1_params();
    const double w = mhz(5.3);
    const double T = 1.3e-6;
    const double W = p.omega0;
    const double expected = 57600.0 * p.mass * p.distance * p.distance * w * w * W * W *
                            (1 + std::abs(std::cos(W * T))) /
                            (std::pow(T, 6) * std::pow(W * W - w * w, 4)) / p.quantum();
    CHECK(rel_diff(envelope_dynamical(p, w, T), expected) < 1e-12);
    CHECK(rel_diff(envelope_dynamical(p, w, T, false), expected * 2 / (1 + std::abs(std::cos(W * T)))) <
          1e-12);
}

TEST_CASE("envelopes cross at T*") {
    const PhysicalParams p = fig1_params();
    for (double f : {1.3, 6.0, 9.5}) {
        const double w = mhz(f);
        const double W = p.omega0;
        const double ratio = (w * w - 4 * W * W) / std::pow(w * w - W * W, 2);
        const double oracle =
            std::pow(28800.0 * p.mass * p.distance * p.distance / (p.hbar * W) * ratio * ratio, 1.0 / 6.0);
        const double t = crossing_time(p, w);
        CHECK(rel_diff(t, oracle) < 1e-12);
        CHECK(rel_diff(envelope_static(p, w, t, 0, false), envelope_dynamical(p, w, t, false)) < 1e-9);
    }
}

TEST_CASE("acceleration projections against the analytic transform") {
    const PhysicalParams p = fig1_params();
    for (int K = 1; K <= 5; ++K) {
        const double oracle = std::abs(testing::quintic_acc_transform(p.distance, p.duration, 2 * kPi * K));
        CHECK(rel_diff(fourier_projection(p, K), oracle) < 1e-10);
        CHECK(rel_diff(oracle, 90.0 * p.distance / (std::pow(kPi, 3) * p.duration * K * K * K)) < 1e-12);
    }
    CHECK(fourier_projection(p, 0) < 1e-12 * p.distance / p.duration);
    CHECK(fourier_projection_closed_form(p, 0) == 0.0);
    CHECK(fourier_projection_closed_form(p, -2) == fourier_projection_closed_form(p, 2));
}

TEST_CASE("quintic trap path leaves the corridor only for short transports") {
    const PhysicalParams p = fig1_params();
    const Protocol q = Protocol::polynomial5(p);
    const CorridorReport inside = corridor_check(trap_from_classical(q, p), p, 2000);
    CHECK(inside.inside());

    const PhysicalParams fast = p.with_duration(2.2 / p.omega0);
    const CorridorReport out = corridor_check(trap_from_classical(Protocol::polynomial5(fast), fast), fast, 4000);
    CHECK_FALSE(out.inside());
    CHECK(out.above == doctest::Approx(out.below).epsilon(1e-6));
    CHECK(out.argmax_below > out.argmax_above);
    // independent: Q0(s) = d [P(s) + P''(s) / (Omega0 T)^2], dense scan
    const double k2 = 2.2 * 2.2;
    double lowest = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double s = i / 200000.0;
        const double P = 10 * s * s * s - 15 * s * s * s * s + 6 * std::pow(s, 5);
        const double P2 = 60 * (s - 3 * s * s + 2 * s * s * s);
        lowest = std::min(lowest, P + P2 / k2);
    }
    CHECK(out.below / p.distance == doctest::Approx(-lowest).epsilon(1e-5));
    CHECK_THROWS_AS(corridor_check(trap_from_classical(q, p), p, 999), PreconditionError);
}

TEST_CASE("corridor threshold") {
    const double a = corridor_threshold(fig1_params());
    CHECK(a == doctest::Approx(2.505).epsilon(0.005 / 2.505));
    CHECK(corridor_threshold(fig1_params().with_distance(7e-6)) == doctest::Approx(a).epsilon(1e-6));
}

TEST_CASE("local maxima") {
    const std::vector<double> v{0, 2, 1, 3, 3, 0, 5};
    const std::vector<std::size_t> m = local_maxima(v);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == 1);
    CHECK(m[1] == 3);
    const std::vector<double> g{0, 1, 2, 3, 4, 5, 6};
    CHECK(largest_local_maximum(g, v) == 3.0);
    CHECK(std::isnan(largest_local_maximum({0, 1, 2}, {1, 2, 3})));
}

TEST_CASE("grids") {
    const std::vector<double> a = linspace(1.0, 2.0, 5);
    REQUIRE(a.size() == 5);
    CHECK(a[1] == doctest::Approx(1.25));
    CHECK(a.back() == 2.0);
    const std::vector<double> b = logspace(1e-7, 1e-5, 3);
    CHECK(b[1] == doctest::Approx(1e-6));
    CHECK(b.back() == doctest::Approx(1e-5));
    CHECK(linspace(3.0, 4.0, 1).front() == 3.0);
}

TEST_CASE("omega scan locates both resonances") {
    const PhysicalParams p = fig1_params();
    const std::vector<double> w = linspace(0.2 * p.omega0, 3.8 * p.omega0, 600);
    const ComponentScan s = scan_omega(p, Protocol::polynomial5(p), w, 0);
    REQUIRE(s.static_quanta.size() == w.size());
    const double dyn = largest_local_maximum(w, s.dynamical_quanta);
    const double sta = largest_local_maximum(w, s.static_quanta);
    CHECK(std::abs(dyn - p.omega0) < kTwoPi / p.duration);
    CHECK(std::abs(sta - 2 * p.omega0) < kTwoPi / p.duration);
}

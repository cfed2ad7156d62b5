#include "support.hpp"

#include "shuttle/errors.hpp"
#include "shuttle/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace shuttle;
using testing::fig1_params;
using testing::mhz;

TEST_CASE("single sine perturbation values") {
    const double w = mhz(6.0);
    const Perturbation p = Perturbation::frequency_sine(0.01, w);
    CHECK(eval_perturbation(p, 0.0) == 0.0);
    CHECK(eval_perturbation(p, std::numbers::pi / (2.0 * w)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sum of sines at integer half periods") {
    const double w = mhz(6.0);
    const Perturbation p = Perturbation::frequency_sum(0.01, {{w, 0.0, 1.0}, {2.0 * w, 0.0, 0.5}});
    CHECK(std::abs(eval_perturbation(p, std::numbers::pi / w)) < 1e-15);
    const double t = 0.123e-6;
    CHECK(eval_perturbation(p, t) ==
          doctest::Approx(std::sin(w * t) + 0.5 * std::sin(2.0 * w * t)).epsilon(1e-15));
}

TEST_CASE("sine perturbation is periodic and pure") {
    const double w = mhz(6.0);
    const Perturbation p = Perturbation::frequency_sine(0.01, w);
    const double period = kTwoPi / w;
    for (double t : {0.0, 0.03e-6, 0.71e-6, 1.9e-6}) {
        CHECK(std::abs(eval_perturbation(p, t + period) - eval_perturbation(p, t)) < 1e-12);
        CHECK(eval_perturbation(p, t) == eval_perturbation(p, t));
    }
    const auto f = p.shape();
    CHECK(f(0.4e-6) == eval_perturbation(p, 0.4e-6));
}

TEST_CASE("tabulated perturbation interpolates linearly and rejects out-of-range times") {
    const Perturbation p = Perturbation::frequency_tabulated(0.01, {0.0, 1.0, 0.0}, 2e-6);
    CHECK(eval_perturbation(p, 0.5e-6) == doctest::Approx(0.5));
    CHECK(eval_perturbation(p, 1e-6) == doctest::Approx(1.0));
    CHECK(eval_perturbation(p, 2e-6) == doctest::Approx(0.0));
    CHECK_THROWS_AS(eval_perturbation(p, 2.1e-6), RangeError);
    CHECK_THROWS_AS(eval_perturbation(p, -1e-7), RangeError);
    const Perturbation h = Perturbation::position_tabulated(0.01, {1.0, 3.0}, 1e-6);
    CHECK(h.is_position());
    CHECK(eval_perturbation(h, 0.25e-6) == doctest::Approx(1.5));
}

TEST_CASE("validation of the reference parameters") {
    const PhysicalParams p = fig1_params();
    const ValidationReport r = validate(p, Perturbation::frequency_sine(0.01, mhz(6.0)));
    CHECK(r.ok());
    CHECK_FALSE(r.has_warnings());
    CHECK(r.summary() == "OK");
}

TEST_CASE("validation reports degenerate duration") {
    PhysicalParams p = fig1_params();
    p.duration = 0.0;
    const ValidationReport r = validate(p);
    CHECK_FALSE(r.ok());
    CHECK(r.summary().find("duration > 0") != std::string::npos);
}

TEST_CASE("validation warns above 0.05 and rejects above 0.2") {
    const PhysicalParams p = fig1_params();
    const ValidationReport warn = validate(p, Perturbation::frequency_sine(0.1, mhz(6.0)));
    CHECK(warn.ok());
    CHECK(warn.has_warnings());
    CHECK(warn.summary().find("perturbative accuracy degraded") != std::string::npos);
    CHECK_FALSE(validate(p, Perturbation::position_sine(0.3, mhz(6.0))).ok());
    CHECK_FALSE(validate(p, Perturbation::frequency_sine(-0.01, mhz(6.0))).ok());
}

TEST_CASE("single sine must keep unit weight and zero phase") {
    Perturbation p = Perturbation::frequency_sine(0.01, mhz(6.0));
    p.components[0].phase = 0.3;
    CHECK_FALSE(validate(fig1_params(), p).ok());
}

TEST_CASE("tabulated samples must cover the duration") {
    const Perturbation p = Perturbation::frequency_tabulated(0.01, {0.0, 1.0}, 1e-6);
    CHECK_FALSE(validate(fig1_params(), p).ok());
}

TEST_CASE("quintic protocol meets the six boundary conditions") {
    const PhysicalParams p = fig1_params();
    const Protocol q = Protocol::polynomial5(p);
    const BoundaryReport b = q.boundary_check();
    CHECK(b.compliant(1e-10));
    CHECK(b.acceleration_checked);
    CHECK(q.position(p.duration / 2) == doctest::Approx(p.distance / 2).epsilon(1e-14));
    CHECK(std::abs(q.acceleration(p.duration / 2)) < 1e-9);
    CHECK(to_string(q.kind()) == "polynomial5");
}

TEST_CASE("tabulated protocol reproduces its samples") {
    const PhysicalParams p = fig1_params();
    const Protocol ref = Protocol::polynomial5(p);
    const std::size_t n = 401;
    std::vector<double> q(n), v(n), a(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = p.duration * static_cast<double>(k) / (n - 1);
        const Kinematics s = ref.eval(t);
        q[k] = s.position;
        v[k] = s.velocity;
        a[k] = s.acceleration;
    }
    const Protocol tab = Protocol::tabulated(p, q, v, a);
    const double t = 0.7123e-6;
    CHECK(tab.position(t) == doctest::Approx(ref.position(t)).epsilon(1e-7));
    CHECK(tab.acceleration(t) == doctest::Approx(ref.acceleration(t)).epsilon(1e-3));
    CHECK(tab.boundary_check().compliant(1e-12));
    CHECK_THROWS_AS(Protocol::tabulated(p, {0.0}, {0.0}, {0.0}), PreconditionError);
}

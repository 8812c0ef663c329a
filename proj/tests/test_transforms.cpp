#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "focsim/errors.hpp"
#include "focsim/transforms.hpp"

using namespace focsim;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const AbcFrame& x, const AbcFrame& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c)});
}

}  // namespace

TEST_CASE("clarke examples") {
    const auto balanced = clarke({1.0, -0.5, -0.5});
    CHECK(balanced.alpha == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(balanced.beta) < 1e-15);
    CHECK(std::abs(balanced.zero) < 1e-15);

    const auto zero = clarke({0.0, 0.0, 0.0});
    CHECK(zero.alpha == 0.0);
    CHECK(zero.beta == 0.0);
    CHECK(zero.zero == 0.0);

    // Pure common mode lands entirely in the homopolar component.
    const auto common = clarke({0.5, 0.5, 0.5});
    CHECK(std::abs(common.alpha) < 1e-15);
    CHECK(std::abs(common.beta) < 1e-15);
    CHECK(common.zero == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("inverse_clarke examples") {
    const auto abc = inverse_clarke({1.0, 0.0, 0.0});
    CHECK(abc.a == 1.0);
    CHECK(abc.b == -0.5);
    CHECK(abc.c == -0.5);

    const auto z = inverse_clarke({0.0, 0.0, 0.0});
    CHECK(max_abs_diff(z, {0, 0, 0}) == 0.0);

    const AbcFrame x{2.0, -3.0, 1.0};
    CHECK(max_abs_diff(inverse_clarke(clarke(x)), x) < 1e-12);
}

TEST_CASE("park examples") {
    const auto at_zero = park({1.0, 0.0, 0.0}, ElectricalAngle(0.0));
    CHECK(at_zero.d == 1.0);
    CHECK(at_zero.q == 0.0);

    const auto quarter = park({1.0, 0.0, 0.0}, ElectricalAngle(kPi / 2.0));
    CHECK(std::abs(quarter.d) < 1e-15);
    CHECK(quarter.q == Approx(-1.0).epsilon(1e-15));

    for (double theta : {0.0, 0.3, 1.7, 3.0, 5.9}) {
        const auto dq = park({0.6, 0.8, 0.0}, ElectricalAngle(theta));
        CHECK(dq.d * dq.d + dq.q * dq.q == Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("inverse_park examples") {
    const auto a = inverse_park({1.0, 0.0}, ElectricalAngle(0.0));
    CHECK(a.alpha == 1.0);
    CHECK(a.beta == 0.0);

    const auto b = inverse_park({0.0, -1.0}, ElectricalAngle(kPi / 2.0));
    CHECK(b.alpha == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(b.beta) < 1e-15);

    const ElectricalAngle th(2.1);
    const auto back = park(inverse_park({0.3, -0.7}, th), th);
    CHECK(std::abs(back.d - 0.3) < 1e-12);
    CHECK(std::abs(back.q + 0.7) < 1e-12);
}

TEST_CASE("non-finite inputs are rejected") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(clarke({nan, 0, 0}), InvalidInput);
    CHECK_THROWS_AS(inverse_clarke({0, inf, 0}), InvalidInput);
    CHECK_THROWS_AS(park({nan, 0, 0}, ElectricalAngle(0.0)), InvalidInput);
    CHECK_THROWS_AS(inverse_park({0, inf}, ElectricalAngle(0.0)), InvalidInput);
    CHECK_THROWS_AS(ElectricalAngle{nan}, InvalidInput);
}

TEST_CASE("property: round trips, linearity, norm preservation") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> val(-50.0, 50.0);
    std::uniform_real_distribution<double> ang(-20.0, 20.0);
    for (int i = 0; i < 20000; ++i) {
        const AbcFrame x{val(rng), val(rng), val(rng)};
        const AbcFrame y{val(rng), val(rng), val(rng)};
        REQUIRE(max_abs_diff(inverse_clarke(clarke(x)), x) < 1e-12);

        const double lam = val(rng) / 10.0;
        const double mu = val(rng) / 10.0;
        const auto lhs = clarke({lam * x.a + mu * y.a, lam * x.b + mu * y.b, lam * x.c + mu * y.c});
        const auto cx = clarke(x);
        const auto cy = clarke(y);
        REQUIRE(std::abs(lhs.alpha - (lam * cx.alpha + mu * cy.alpha)) < 1e-11);
        REQUIRE(std::abs(lhs.beta - (lam * cx.beta + mu * cy.beta)) < 1e-11);
        REQUIRE(std::abs(lhs.zero - (lam * cx.zero + mu * cy.zero)) < 1e-11);

        const ElectricalAngle th(ang(rng));
        const AlphaBetaFrame ab{val(rng), val(rng), 0.0};
        const auto dq = park(ab, th);
        REQUIRE(std::hypot(dq.d, dq.q) == Approx(std::hypot(ab.alpha, ab.beta)).epsilon(1e-13));
        const auto back = inverse_park(dq, th);
        REQUIRE(std::abs(back.alpha - ab.alpha) < 1e-12);
        REQUIRE(std::abs(back.beta - ab.beta) < 1e-12);
    }
}

TEST_CASE("amplitude invariance for balanced sinusoids") {
    for (double peak : {0.1, 1.0, 42.0}) {
        double max_norm = 0.0;
        double min_norm = 1e300;
        for (int k = 0; k < 3600; ++k) {
            const double wt = 2.0 * kPi * k / 3600.0;
            const AbcFrame abc{peak * std::cos(wt), peak * std::cos(wt - 2.0 * kPi / 3.0),
                               peak * std::cos(wt + 2.0 * kPi / 3.0)};
            const auto ab = clarke(abc);
            const double n = std::hypot(ab.alpha, ab.beta);
            max_norm = std::max(max_norm, n);
            min_norm = std::min(min_norm, n);
        }
        CHECK(std::abs(max_norm - peak) < 1e-9);
        CHECK(std::abs(min_norm - peak) < 1e-9);
    }
}

TEST_CASE("angle normalization") {
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(kTwoPi) == 0.0);
    CHECK(normalize_angle(-kPi / 2.0) == Approx(1.5 * kPi));
    CHECK(normalize_angle(-1e-300) < kTwoPi);
    CHECK(normalize_angle(-0.0) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> wide(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double th = normalize_angle(wide(rng));
        REQUIRE(th >= 0.0);
        REQUIRE(th < kTwoPi);
        REQUIRE(normalize_angle(th) == th);
    }
}

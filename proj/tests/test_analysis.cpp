#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "focsim/analysis.hpp"
#include "focsim/errors.hpp"

using namespace focsim;
using doctest::Approx;

namespace {

const double kPi = std::acos(-1.0);

template <class F>
Waveform sampled(double dt, std::size_t n, F f) {
    Waveform w{"x", dt, {}};
    w.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) w.samples.push_back(f(k * dt));
    return w;
}

Waveform square_wave(double amplitude, double f, double dt, int periods) {
    const auto n = static_cast<std::size_t>(std::llround(periods / (f * dt)));
    // Half-sample offset keeps every sample off the discontinuities.
    return sampled(dt, n, [=](double t) {
        return std::sin(2.0 * kPi * f * (t + 0.5 * dt)) >= 0.0 ? amplitude : -amplitude;
    });
}

double square_thd(int max_order) {
    double sum = 0.0;
    for (int n = 3; n <= max_order; n += 2) sum += 1.0 / (n * n);
    return std::sqrt(sum);
}

// Largest torque over a dense (i_d, i_q) grid inside both limits.
double brute_force_torque(const MotorParams& p, double omega_m) {
    const double w = omega_m * p.pole_pairs;
    double best = 0.0;
    const int n = 1200;
    for (int i = 0; i <= n; ++i) {
        const double id = -p.i_max * i / n;
        const double iq_max = std::sqrt(std::max(0.0, p.i_max * p.i_max - id * id));
        for (int j = 0; j <= n; ++j) {
            const double iq = iq_max * j / n;
            if (steady_state_voltage(p, id, iq, w) > p.v_max) continue;
            best = std::max(best, electromagnetic_torque({id, iq, omega_m, 0.0}, p));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("spectrum examples") {
    const double f = 50.0;
    const double dt = 1e-5;
    SUBCASE("pure sinusoid") {
        const auto w = sampled(dt, 20000, [&](double t) { return 3.0 * std::sin(2 * kPi * f * t); });
        const Spectrum s = spectrum(w, f, 60);
        CHECK(s.magnitude(1) == Approx(3.0).epsilon(1e-12));
        for (int n = 0; n <= 60; ++n) {
            if (n != 1) REQUIRE(s.magnitude(n) < 1e-9);
        }
        CHECK(s.periods == 10);
    }
    SUBCASE("two tones") {
        const auto w = sampled(dt, 20000, [&](double t) {
            return 2.0 * std::sin(2 * kPi * f * t) + 0.4 * std::sin(2 * kPi * 5 * f * t);
        });
        const Spectrum s = spectrum(w, f, 20);
        CHECK(s.magnitude(1) == Approx(2.0).epsilon(1e-12));
        CHECK(s.magnitude(5) == Approx(0.4).epsilon(1e-12));
        CHECK(s.magnitude(3) < 1e-9);
    }
    SUBCASE("square wave") {
        const Spectrum s = spectrum(square_wave(1.5, f, 1e-6, 10), f, 10);
        for (int n : {1, 3, 5, 7}) {
            CHECK(s.magnitude(n) == Approx(4.0 * 1.5 / (kPi * n)).epsilon(0.01));
        }
        CHECK(s.magnitude(2) < 1e-6);
    }
    SUBCASE("takes whole periods from the tail") {
        // A transient in the first 2.5 periods is dropped when 5 are requested.
        const auto w = sampled(dt, 15000, [&](double t) {
            return (t < 0.05 ? 7.0 : 0.0) + std::cos(2 * kPi * f * t);
        });
        const Spectrum s = spectrum(w, f, 5, 5);
        CHECK(s.periods == 5);
        CHECK(s.magnitude(0) < 1e-9);
        CHECK(s.magnitude(1) == Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("non-integer samples per period") {
        const double dt_odd = 1.0 / (f * 200.5);
        const auto w = sampled(dt_odd, 4010, [&](double t) { return 2.0 * std::sin(2 * kPi * f * t); });
        const Spectrum s = spectrum(w, f, 10);
        CHECK(s.periods == 20);
        CHECK(s.magnitude(1) == Approx(2.0).epsilon(1e-9));
        CHECK(s.magnitude(3) < 1e-9);
    }
    const auto short_rec = sampled(dt, 8000, [&](double t) { return std::sin(2 * kPi * f * t); });
    CHECK_THROWS_AS(spectrum(short_rec, f), InsufficientData);
    CHECK_THROWS_AS(spectrum(Waveform{"x", dt, {1.0}}, f), InsufficientData);
    CHECK_THROWS_AS(spectrum(Waveform{"x", 0.0, {1.0, 2.0}}, f), InvalidInput);
}

TEST_CASE("thd examples") {
    const double f = 50.0;
    const auto sine = sampled(1e-5, 20000, [&](double t) { return std::sin(2 * kPi * f * t); });
    CHECK(thd(spectrum(sine, f, 50)) < 1e-9);

    const auto fifth = sampled(1e-5, 20000, [&](double t) {
        return std::sin(2 * kPi * f * t) + 0.1 * std::sin(2 * kPi * 5 * f * t + 0.3);
    });
    CHECK(thd(spectrum(fifth, f, 50)) == Approx(0.1).epsilon(1e-9));

    const double expected = square_thd(50);
    CHECK(expected == Approx(0.472971).epsilon(1e-6));
    CHECK(std::sqrt(kPi * kPi / 8.0 - 1.0) == Approx(0.4834).epsilon(1e-4));
    CHECK(thd(spectrum(square_wave(1.0, f, 1e-6, 10), f, 50)) == Approx(expected).epsilon(0.01));

    const auto flat = sampled(1e-5, 20000, [](double) { return 2.0; });
    CHECK_THROWS_AS(thd(spectrum(flat, f, 50)), UndefinedThd);
}

TEST_CASE("property: Parseval and scale invariance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        // Periodic random signal: 200 samples per period, 6 periods.
        std::vector<double> period(200);
        for (double& x : period) x = u(rng);
        Waveform w{"r", 1.0 / (50.0 * 200), {}};
        for (int k = 0; k < 6; ++k) w.samples.insert(w.samples.end(), period.begin(), period.end());
        const Spectrum s = spectrum(w, 50.0);
        double ms = 0.0;
        for (std::size_t k = w.samples.size() - s.window; k < w.samples.size(); ++k) {
            ms += w.samples[k] * w.samples[k];
        }
        ms /= static_cast<double>(s.window);
        CHECK(std::abs(s.mean_square() - ms) / ms < 1e-6);

        Waveform scaled = w;
        for (double& x : scaled.samples) x *= 37.5;
        CHECK(thd(spectrum(scaled, 50.0)) == Approx(thd(s)).epsilon(1e-12));
    }
    // Odd sample count per period: no Nyquist bin.
    Waveform odd{"o", 1.0 / (50.0 * 101), {}};
    for (int k = 0; k < 606; ++k) odd.samples.push_back(std::sin(0.3 * (k % 101) * (k % 101)));
    const Spectrum so = spectrum(odd, 50.0);
    double ms = 0.0;
    for (double x : odd.samples) ms += x * x;
    ms /= 606.0;
    CHECK(so.nyquist_order == 0);
    CHECK(std::abs(so.mean_square() - ms) / ms < 1e-6);
}

TEST_CASE("tracking_metrics examples") {
    const double dt = 1e-5;
    const std::size_t n = 100000;
    const auto ref = sampled(dt, n, [](double t) { return t >= 0.1 ? 1.0 : 0.0; });

    SUBCASE("exact tracking") {
        const TrackingMetrics m = tracking_metrics(ref, ref);
        CHECK(m.applicable);
        CHECK(m.steady_state_error == 0.0);
        CHECK(m.overshoot_pct == 0.0);
    }
    SUBCASE("first-order response") {
        const double tau = 0.01;
        const auto y = sampled(dt, n, [&](double t) {
            return t >= 0.1 ? 1.0 - std::exp(-(t - 0.1) / tau) : 0.0;
        });
        const TrackingMetrics m = tracking_metrics(ref, y);
        CHECK(m.rise_time == Approx(std::log(9.0) * tau).epsilon(1e-3));
        CHECK(m.overshoot_pct == Approx(0.0));
        CHECK(m.settling_time == Approx(-std::log(0.02) * tau).epsilon(1e-2));
    }
    SUBCASE("underdamped response peaking at 1.2") {
        const double zeta = -std::log(0.2) / std::sqrt(kPi * kPi + std::log(0.2) * std::log(0.2));
        const double wn = 200.0;
        const double wd = wn * std::sqrt(1.0 - zeta * zeta);
        const double phi = std::acos(zeta);
        const auto y = sampled(dt, n, [&](double t) {
            if (t < 0.1) return 0.0;
            const double s = t - 0.1;
            return 1.0 - std::exp(-zeta * wn * s) * std::sin(wd * s + phi) / std::sqrt(1.0 - zeta * zeta);
        });
        CHECK(tracking_metrics(ref, y).overshoot_pct == Approx(20.0).epsilon(1e-3));
    }
    SUBCASE("no step") {
        const auto flat = sampled(dt, n, [](double) { return 1.0; });
        CHECK_FALSE(tracking_metrics(flat, flat).applicable);
    }
    CHECK_THROWS_AS(tracking_metrics(ref, Waveform{"y", dt, {0.0, 1.0}}), InvalidInput);
}

TEST_CASE("envelope_sweep examples") {
    const MotorParams p = default_motor_params();
    const double wb = p.omega_base / p.pole_pairs;

    SUBCASE("constant torque below base speed") {
        const std::vector<double> speeds{0.1 * wb, 0.4 * wb, 0.7 * wb, 0.95 * wb};
        const auto env = envelope_sweep(p, speeds);
        const double gamma = max_torque_current_angle(p);
        const double t_ref = electromagnetic_torque(
            {-p.i_max * std::sin(gamma), p.i_max * std::cos(gamma), 0.0, 0.0}, p);
        for (const auto& e : env) {
            CHECK(e.feasible);
            CHECK(e.max_torque == Approx(t_ref).epsilon(1e-9));
            CHECK(e.power == Approx(e.max_torque * e.omega_m));
        }
    }
    SUBCASE("matches a brute-force grid search") {
        const std::vector<double> speeds{0.5 * wb, 1.2 * wb, 1.8 * wb, 2.5 * wb};
        const auto env = envelope_sweep(p, speeds);
        for (std::size_t i = 0; i < speeds.size(); ++i) {
            const double grid = brute_force_torque(p, speeds[i]);
            CHECK(env[i].max_torque >= grid * (1.0 - 1e-9));
            CHECK(env[i].max_torque == Approx(grid).epsilon(5e-3));
            CHECK(steady_state_voltage(p, env[i].i_d, env[i].i_q, speeds[i] * p.pole_pairs) <=
                  p.v_max * (1.0 + 1e-9));
            CHECK(std::hypot(env[i].i_d, env[i].i_q) <= p.i_max * (1.0 + 1e-12));
        }
    }
    SUBCASE("non-salient power holds near its base value") {
        const MotorParams ns = non_salient_variant(p);
        const double wbn = ns.omega_base / ns.pole_pairs;
        std::vector<double> speeds;
        for (int k = 0; k <= 100; ++k) speeds.push_back(wbn * (1.0 + k / 100.0));
        const auto env = envelope_sweep(ns, speeds);
        const double p_base = env.front().power;
        for (const auto& e : env) {
            REQUIRE(e.feasible);
            REQUIRE(std::abs(e.power - p_base) <= 0.15 * p_base);
        }
    }
    SUBCASE("torque non-increasing above base speed") {
        for (const MotorParams& m : {p, non_salient_variant(p)}) {
            std::vector<double> speeds;
            for (int k = 0; k <= 400; ++k) speeds.push_back(wb * (1.0 + 3.0 * k / 400.0));
            const auto env = envelope_sweep(m, speeds);
            for (std::size_t i = 1; i < env.size(); ++i) {
                REQUIRE(env[i].max_torque <= env[i - 1].max_torque * (1.0 + 1e-9) + 1e-12);
                REQUIRE(env[i].max_torque >= 0.0);
            }
        }
    }
    SUBCASE("demagnetization boundary") {
        // With i_max = psi/l_d the circle edge is the point of zero flux; the
        // torque headroom shrinks to nothing as speed grows.
        MotorParams m = non_salient_variant(p);
        m.i_max = m.psi_m / m.l_d;
        std::vector<double> speeds{1e3, 1e4, 1e5, 1e6};
        const auto env = envelope_sweep(m, speeds);
        for (std::size_t i = 0; i < env.size(); ++i) {
            CHECK(env[i].feasible);
            if (i > 0) CHECK(env[i].max_torque < env[i - 1].max_torque);
        }
        CHECK(env.back().max_torque < 2e-3 * env.front().max_torque);
        CHECK(env.back().i_d == Approx(-m.psi_m / m.l_d).epsilon(1e-6));
    }
    SUBCASE("infeasible speed flags a zero-torque point") {
        const std::vector<double> speeds{10.0 * wb};
        const auto env = envelope_sweep(non_salient_variant(p), speeds);
        CHECK_FALSE(env[0].feasible);
        CHECK(env[0].max_torque == 0.0);
        CHECK(env[0].power == 0.0);
    }
    const std::vector<double> unsorted{10.0, 5.0};
    const std::vector<double> negative{-1.0, 5.0};
    CHECK_THROWS_AS(envelope_sweep(p, unsorted), InvalidInput);
    CHECK_THROWS_AS(envelope_sweep(p, negative), InvalidInput);
}

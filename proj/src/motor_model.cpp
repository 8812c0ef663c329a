#include "focsim/motor_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "focsim/errors.hpp"
#include "focsim/golden_section.hpp"

namespace focsim {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("motor parameter ") + name + " must be positive and finite");
    }
}

using StateVec = std::array<double, 4>;

StateVec to_vec(const MotorState& s) { return {s.i_d, s.i_q, s.omega_m, s.theta_e}; }

MotorState to_state(const StateVec& v) { return {v[0], v[1], v[2], v[3]}; }

StateVec to_vec(const MotorDerivative& d) { return {d.di_d, d.di_q, d.domega_m, d.dtheta_e}; }

StateVec axpy(const StateVec& y, const StateVec& k, double h) {
    StateVec out{};
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[i] + h * k[i];
    }
    return out;
}

template <typename Deriv>
MotorState rk4(const MotorState& s, double dt, Deriv&& f) {
    const StateVec y = to_vec(s);
    const StateVec k1 = f(y);
    const StateVec k2 = f(axpy(y, k1, dt / 2.0));
    const StateVec k3 = f(axpy(y, k2, dt / 2.0));
    const StateVec k4 = f(axpy(y, k3, dt));
    StateVec next{};
    for (std::size_t i = 0; i < y.size(); ++i) {
        next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    static constexpr std::array<const char*, 4> kNames{"i_d", "i_q", "omega_m", "theta_e"};
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!std::isfinite(next[i])) {
            throw DivergenceError(0.0, kNames[i]);
        }
    }
    MotorState out = to_state(next);
    out.theta_e = normalize_angle(out.theta_e);
    return out;
}

void check_step(const MotorParams& p, double dt, double dt_max) {
    p.validate();
    if (!(dt > 0.0) || !(dt <= dt_max)) {
        throw ConfigError("integration step " + std::to_string(dt) + " s outside (0, " +
                          std::to_string(dt_max) + "]");
    }
}

}  // namespace

void MotorParams::validate() const {
    require_positive(r_s, "r_s");
    require_positive(l_d, "l_d");
    require_positive(l_q, "l_q");
    require_positive(psi_m, "psi_m");
    require_positive(inertia, "inertia");
    require_positive(v_max, "v_max");
    require_positive(i_max, "i_max");
    require_positive(omega_base, "omega_base");
    if (pole_pairs < 1) {
        throw ConfigError("motor parameter pole_pairs must be >= 1");
    }
    if (!(friction >= 0.0) || !std::isfinite(friction)) {
        throw ConfigError("motor parameter friction must be >= 0");
    }
    if (l_q < l_d) {
        throw ConfigError("interior PM machine requires l_q >= l_d");
    }
}

MotorParams default_motor_params() {
    MotorParams p;
    p.r_s = 0.2;
    p.l_d = 1.0e-3;
    p.l_q = 1.5e-3;
    p.psi_m = 0.1;
    p.pole_pairs = 4;
    p.inertia = 0.002;
    p.friction = 1e-4;
    p.v_max = 100.0;
    p.i_max = 55.0;
    p.omega_base = corner_speed(p, p.v_max);
    return p;
}

MotorParams non_salient_variant(MotorParams p) {
    p.l_q = p.l_d;
    p.omega_base = corner_speed(p, p.v_max);
    return p;
}

LoadProfile::LoadProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (!(segments_[i].t_start_s > segments_[i - 1].t_start_s)) {
            throw ConfigError("load profile segments must be strictly time-ordered");
        }
    }
}

LoadTorque LoadProfile::at(double t) const {
    LoadTorque active;
    for (const auto& seg : segments_) {
        if (seg.t_start_s > t) {
            break;
        }
        active = seg.load;
    }
    return active;
}

double electromagnetic_torque(const MotorState& s, const MotorParams& p) {
    return 1.5 * p.pole_pairs * (p.psi_m * s.i_q + (p.l_d - p.l_q) * s.i_d * s.i_q);
}

namespace {

MotorDerivative derivatives_unchecked(const MotorState& s, double v_d, double v_q,
                                      const LoadTorque& load, const MotorParams& p) {
    const double omega_e = s.omega_e(p);
    MotorDerivative d;
    d.di_d = (v_d - p.r_s * s.i_d + omega_e * p.l_q * s.i_q) / p.l_d;
    d.di_q = (v_q - p.r_s * s.i_q - omega_e * (p.l_d * s.i_d + p.psi_m)) / p.l_q;
    d.domega_m =
        (electromagnetic_torque(s, p) - load.at(s.omega_m) - p.friction * s.omega_m) / p.inertia;
    d.dtheta_e = omega_e;
    return d;
}

}  // namespace

MotorDerivative derivatives(const MotorState& s, double v_d, double v_q,
                            const LoadTorque& load, const MotorParams& p) {
    p.validate();
    return derivatives_unchecked(s, v_d, v_q, load, p);
}

MotorState step(const MotorState& s, double v_d, double v_q, const LoadTorque& load,
                const MotorParams& p, double dt, double dt_max) {
    check_step(p, dt, dt_max);
    return rk4(s, dt, [&](const StateVec& y) {
        return to_vec(derivatives_unchecked(to_state(y), v_d, v_q, load, p));
    });
}

MotorState step_stationary(const MotorState& s, const AlphaBetaFrame& v_ab,
                           const LoadTorque& load, const MotorParams& p, double dt,
                           double dt_max) {
    check_step(p, dt, dt_max);
    return rk4(s, dt, [&](const StateVec& y) {
        const MotorState st = to_state(y);
        // theta_e is unwrapped inside the stages; cos/sin do not care.
        const double c = std::cos(st.theta_e);
        const double sn = std::sin(st.theta_e);
        const double v_d = v_ab.alpha * c + v_ab.beta * sn;
        const double v_q = -v_ab.alpha * sn + v_ab.beta * c;
        return to_vec(derivatives_unchecked(st, v_d, v_q, load, p));
    });
}

double steady_state_voltage(const MotorParams& p, double i_d, double i_q, double omega_e) {
    const double flux_d = p.psi_m + p.l_d * i_d;
    const double flux_q = p.l_q * i_q;
    return std::abs(omega_e) * std::hypot(flux_d, flux_q);
}

double max_torque_current_angle(const MotorParams& p) {
    const auto torque_at = [&](double gamma) {
        MotorState s;
        s.i_d = -p.i_max * std::sin(gamma);
        s.i_q = p.i_max * std::cos(gamma);
        return electromagnetic_torque(s, p);
    };
    return golden_section_max(torque_at, 0.0, std::numbers::pi / 2.0, 1e-9);
}

double corner_speed(const MotorParams& p, double v_limit) {
    const double gamma = max_torque_current_angle(p);
    const double i_d = -p.i_max * std::sin(gamma);
    const double i_q = p.i_max * std::cos(gamma);
    return v_limit / steady_state_voltage(p, i_d, i_q, 1.0);
}

double electrical_power(const MotorState& s, double v_d, double v_q) {
    return 1.5 * (v_d * s.i_d + v_q * s.i_q);
}

double copper_loss(const MotorState& s, const MotorParams& p) {
    return 1.5 * p.r_s * (s.i_d * s.i_d + s.i_q * s.i_q);
}

double magnetic_energy(const MotorState& s, const MotorParams& p) {
    return 1.5 * 0.5 * (p.l_d * s.i_d * s.i_d + p.l_q * s.i_q * s.i_q);
}

}  // namespace focsim

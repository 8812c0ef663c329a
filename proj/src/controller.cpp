#include "focsim/controller.hpp"

#include <algorithm>
#include <cmath>

#include "focsim/errors.hpp"

namespace focsim {

void PiGains::validate() const {
    if (!(kp >= 0.0) || !(ki >= 0.0)) {
        throw ConfigError("PI gains must be non-negative");
    }
    if (!(out_min < out_max)) {
        throw ConfigError("PI output bounds must satisfy out_min < out_max");
    }
}

PiResult pi_step(const PiGains& gains, PiState st, double error, double dt) {
    if (!(dt > 0.0)) {
        throw ConfigError("PI step requires dt > 0");
    }
    const double proportional = gains.kp * error;
    const double candidate = st.integrator + gains.ki * error * dt;
    const double unclamped = proportional + candidate;

    const bool pushing_high = unclamped > gains.out_max && error > 0.0;
    const bool pushing_low = unclamped < gains.out_min && error < 0.0;
    if (!pushing_high && !pushing_low) {
        st.integrator = candidate;
    }

    const double raw = proportional + st.integrator;
    PiResult r;
    r.output = std::clamp(raw, gains.out_min, gains.out_max);
    r.saturated = raw != r.output;
    r.state = st;
    return r;
}

PiResult speed_loop(double omega_ref, double omega_m, const PiGains& gains, PiState st,
                    double dt) {
    return pi_step(gains, st, omega_ref - omega_m, dt);
}

CurrentReference field_weakening_reference(double omega_e, double iq_demand,
                                           const MotorParams& p, double v_margin) {
    if (!std::isfinite(omega_e) || !std::isfinite(iq_demand)) {
        throw InvalidInput("field_weakening_reference: non-finite input");
    }
    const double v_lim = v_margin * p.v_max;
    const double w = std::abs(omega_e);
    const double iq = std::clamp(iq_demand, -p.i_max, p.i_max);

    if (w * std::hypot(p.psi_m, p.l_q * iq) <= v_lim) {
        return {0.0, iq};
    }

    const double flux_budget = v_lim / w;
    const double q_flux = p.l_q * iq;
    const double d_flux = std::sqrt(std::max(0.0, flux_budget * flux_budget - q_flux * q_flux));
    const double id_floor = std::max(-p.psi_m / p.l_d, -p.i_max);
    const double id = std::clamp((-p.psi_m + d_flux) / p.l_d, id_floor, 0.0);

    // q current headroom on the circle and on the voltage ellipse.
    const double iq_circle = std::sqrt(std::max(0.0, p.i_max * p.i_max - id * id));
    const double flux_d = p.psi_m + p.l_d * id;
    const double iq_ellipse =
        std::sqrt(std::max(0.0, flux_budget * flux_budget - flux_d * flux_d)) / p.l_q;
    const double iq_limit = std::min(iq_circle, iq_ellipse);
    return {id, std::clamp(iq, -iq_limit, iq_limit)};
}

CurrentLoopOutput current_loops(const CurrentReference& ref, const DqFrame& meas,
                                const PiGains& gains_d, const PiGains& gains_q,
                                const CurrentLoopStates& states, double omega_e,
                                const MotorParams& p, double dt) {
    const PiResult pid = pi_step(gains_d, states.d, ref.id_ref - meas.d, dt);
    const PiResult piq = pi_step(gains_q, states.q, ref.iq_ref - meas.q, dt);

    CurrentLoopOutput out;
    out.v_d = pid.output - omega_e * p.l_q * meas.q;
    out.v_q = piq.output + omega_e * (p.l_d * meas.d + p.psi_m);
    out.states = {pid.state, piq.state};

    const double mag = std::hypot(out.v_d, out.v_q);
    if (mag > p.v_max) {
        const double scale = p.v_max / mag;
        out.v_d *= scale;
        out.v_q *= scale;
        out.limited = true;
        // Only let an integrator move toward zero while the vector is limited.
        if (std::abs(pid.state.integrator) > std::abs(states.d.integrator)) {
            out.states.d = states.d;
        }
        if (std::abs(piq.state.integrator) > std::abs(states.q.integrator)) {
            out.states.q = states.q;
        }
    }
    return out;
}

GainSet tune_gains(const MotorParams& p, double bandwidth_current, double bandwidth_speed) {
    p.validate();
    if (!(bandwidth_current > 0.0) || !(bandwidth_speed > 0.0)) {
        throw ConfigError("loop bandwidths must be positive");
    }
    if (bandwidth_speed > bandwidth_current / 10.0) {
        throw ConfigError("speed bandwidth must not exceed current bandwidth / 10");
    }
    GainSet g;
    g.current_d = {p.l_d * bandwidth_current, p.r_s * bandwidth_current, -p.v_max, p.v_max};
    g.current_q = {p.l_q * bandwidth_current, p.r_s * bandwidth_current, -p.v_max, p.v_max};
    const double kp_speed = p.inertia * bandwidth_speed / (1.5 * p.pole_pairs * p.psi_m);
    g.speed = {kp_speed, kp_speed * bandwidth_speed / 10.0, -p.i_max, p.i_max};
    return g;
}

FocController::FocController(MotorParams p, GainSet gains, double v_margin)
    : params_(p), gains_(gains), v_margin_(v_margin) {
    params_.validate();
    gains_.speed.validate();
    gains_.current_d.validate();
    gains_.current_q.validate();
    if (!(v_margin > 0.0 && v_margin <= 1.0)) {
        throw ConfigError("v_margin must lie in (0, 1]");
    }
}

CurrentReference FocController::update_reference(double omega_ref, double omega_m, double dt) {
    const PiResult speed = speed_loop(omega_ref, omega_m, gains_.speed, speed_state_, dt);
    speed_state_ = speed.state;
    last_iq_demand_ = speed.output;
    return field_weakening_reference(params_.pole_pairs * omega_m, speed.output, params_,
                                     v_margin_);
}

FocController::Sample FocController::update(double omega_ref, double omega_m,
                                            const DqFrame& i_meas, double dt) {
    Sample s;
    s.ref = update_reference(omega_ref, omega_m, dt);
    s.iq_demand = last_iq_demand_;
    const CurrentLoopOutput v =
        current_loops(s.ref, i_meas, gains_.current_d, gains_.current_q, current_states_,
                      params_.pole_pairs * omega_m, params_, dt);
    current_states_ = v.states;
    s.v_d = v.v_d;
    s.v_q = v.v_q;
    s.voltage_limited = v.limited;
    return s;
}

}  // namespace focsim

#pragma once

// Cascaded field-oriented controller: PI speed loop -> field-weakening
// current reference -> decoupled PI current loops.

#include "focsim/motor_model.hpp"
#include "focsim/transforms.hpp"

namespace focsim {

struct PiGains {
    double kp = 0.0;
    double ki = 0.0;  // 1/s
    double out_min = 0.0;
    double out_max = 0.0;

    void validate() const;
};

struct PiState {
    double integrator = 0.0;
};

struct PiResult {
    double output = 0.0;
    bool saturated = false;
    PiState state;
};

// Forward-Euler PI with conditional integration: the integrator is frozen
// while the unclamped output is past a bound and the error pushes further.
PiResult pi_step(const PiGains& gains, PiState st, double error, double dt);

// Returns the q-current demand in amperes; gains bounds are +-i_max.
PiResult speed_loop(double omega_ref, double omega_m, const PiGains& gains, PiState st,
                    double dt);

struct CurrentReference {
    double id_ref = 0.0;
    double iq_ref = 0.0;
};

inline constexpr double kDefaultVoltageMargin = 0.95;

// Feed-forward flux weakening from the steady-state voltage ellipse. Below
// base speed the demand passes through with id_ref = 0. Above it id_ref is
// the negative d current that puts the operating point on the ellipse scaled
// by v_margin, limited to [max(-psi_m/l_d, -i_max), 0]; iq_ref then takes
// what is left of both the current circle and the voltage ellipse.
CurrentReference field_weakening_reference(double omega_e, double iq_demand,
                                           const MotorParams& p,
                                           double v_margin = kDefaultVoltageMargin);

struct CurrentLoopStates {
    PiState d;
    PiState q;
};

struct CurrentLoopOutput {
    double v_d = 0.0;
    double v_q = 0.0;
    bool limited = false;  // (v_d, v_q) was scaled down to v_max
    CurrentLoopStates states;
};

CurrentLoopOutput current_loops(const CurrentReference& ref, const DqFrame& meas,
                                const PiGains& gains_d, const PiGains& gains_q,
                                const CurrentLoopStates& states, double omega_e,
                                const MotorParams& p, double dt);

struct GainSet {
    PiGains speed;
    PiGains current_d;
    PiGains current_q;
};

// Pole-placement tuning. Bandwidths in rad/s; the speed loop must be at
// least a decade slower than the current loops.
GainSet tune_gains(const MotorParams& p, double bandwidth_current, double bandwidth_speed);

// Stateful wrapper that runs one controller sample.
class FocController {
public:
    struct Sample {
        double iq_demand = 0.0;
        CurrentReference ref;
        double v_d = 0.0;
        double v_q = 0.0;
        bool voltage_limited = false;
    };

    FocController(MotorParams p, GainSet gains, double v_margin = kDefaultVoltageMargin);

    // Outer loops only (speed PI and field weakening).
    CurrentReference update_reference(double omega_ref, double omega_m, double dt);

    // Full cascade: reference, then current loops.
    Sample update(double omega_ref, double omega_m, const DqFrame& i_meas, double dt);

    const GainSet& gains() const { return gains_; }
    double v_margin() const { return v_margin_; }

private:
    MotorParams params_;
    GainSet gains_;
    double v_margin_;
    PiState speed_state_;
    CurrentLoopStates current_states_;
    double last_iq_demand_ = 0.0;
};

}  // namespace focsim

#pragma once

// dq-frame model of an interior permanent-magnet machine with a lumped
// rotor inertia, advanced by fixed-step fourth-order Runge-Kutta.

#include <vector>

#include "focsim/transforms.hpp"

namespace focsim {

struct MotorParams {
    double r_s = 0.0;         // ohm
    double l_d = 0.0;         // H
    double l_q = 0.0;         // H
    double psi_m = 0.0;       // Wb
    int pole_pairs = 0;
    double inertia = 0.0;     // kg m^2
    double friction = 0.0;    // N m s / rad
    double v_max = 0.0;       // peak phase voltage available from the inverter, V
    double i_max = 0.0;       // peak phase current limit, A
    double omega_base = 0.0;  // electrical rad/s

    double saliency() const { return l_q / l_d; }

    // Throws ConfigError naming the first violated invariant.
    void validate() const;
};

// Small-EV demo machine. omega_base is filled in with corner_speed().
MotorParams default_motor_params();

// Same machine with l_q forced equal to l_d.
MotorParams non_salient_variant(MotorParams p);

struct MotorState {
    double i_d = 0.0;
    double i_q = 0.0;
    double omega_m = 0.0;  // mechanical rad/s
    double theta_e = 0.0;  // electrical rad, [0, 2*pi)

    double omega_e(const MotorParams& p) const { return p.pole_pairs * omega_m; }
};

struct MotorDerivative {
    double di_d = 0.0;
    double di_q = 0.0;
    double domega_m = 0.0;
    double dtheta_e = 0.0;
};

// Load torque opposing the rotor: torque_nm + torque_per_rad_s * omega_m.
struct LoadTorque {
    double torque_nm = 0.0;
    double torque_per_rad_s = 0.0;

    LoadTorque() = default;
    LoadTorque(double constant) : torque_nm(constant) {}  // NOLINT: implicit on purpose
    LoadTorque(double constant, double per_rad_s)
        : torque_nm(constant), torque_per_rad_s(per_rad_s) {}

    double at(double omega_m) const { return torque_nm + torque_per_rad_s * omega_m; }
};

// Piecewise load profile. Each segment applies from its start time until the
// next one begins; before the first segment the load is zero.
class LoadProfile {
public:
    struct Segment {
        double t_start_s = 0.0;
        LoadTorque load;
    };

    LoadProfile() = default;
    explicit LoadProfile(std::vector<Segment> segments);

    LoadTorque at(double t) const;
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<Segment> segments_;
};

double electromagnetic_torque(const MotorState& s, const MotorParams& p);

MotorDerivative derivatives(const MotorState& s, double v_d, double v_q,
                            const LoadTorque& load, const MotorParams& p);

inline constexpr double kDefaultMaxStep = 1e-3;

// One RK4 step with (v_d, v_q) held constant in the rotor frame.
MotorState step(const MotorState& s, double v_d, double v_q, const LoadTorque& load,
                const MotorParams& p, double dt, double dt_max = kDefaultMaxStep);

// One RK4 step with the voltage held constant in the stationary frame, as a
// switching inverter applies it. The dq voltage rotates with theta_e inside
// the step.
MotorState step_stationary(const MotorState& s, const AlphaBetaFrame& v_ab,
                           const LoadTorque& load, const MotorParams& p, double dt,
                           double dt_max = kDefaultMaxStep);

// Steady-state helpers (resistance neglected, as in the voltage-limit ellipse).
double steady_state_voltage(const MotorParams& p, double i_d, double i_q, double omega_e);

// Current angle gamma in [0, pi/2] (measured from +q toward -d) that
// maximises torque on the current-limit circle.
double max_torque_current_angle(const MotorParams& p);

// Highest electrical speed at which the current-limited maximum-torque point
// still satisfies the steady-state voltage limit v_limit.
double corner_speed(const MotorParams& p, double v_limit);

// Power terms of the energy balance (amplitude-invariant frames, hence 3/2).
double electrical_power(const MotorState& s, double v_d, double v_q);
double copper_loss(const MotorState& s, const MotorParams& p);
double magnetic_energy(const MotorState& s, const MotorParams& p);

}  // namespace focsim

#include "focsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "focsim/controller.hpp"
#include "focsim/errors.hpp"
#include "focsim/inverter.hpp"

namespace focsim {

const Waveform& SimulationResult::signal(const std::string& name) const {
    for (const auto& w : signals) {
        if (w.name == name) {
            return w;
        }
    }
    throw InvalidInput("no recorded signal named '" + name + "'");
}

namespace {

struct Segment {
    double duration = 0.0;
    SwitchState gates;
};

AlphaBetaFrame stator_current(const MotorState& x) {
    return inverse_park({x.i_d, x.i_q}, ElectricalAngle(x.theta_e));
}

void require_finite_state(const MotorState& x, double t) {
    if (!std::isfinite(x.i_d)) throw DivergenceError(t, "i_d");
    if (!std::isfinite(x.i_q)) throw DivergenceError(t, "i_q");
    if (!std::isfinite(x.omega_m)) throw DivergenceError(t, "omega_m");
    if (!std::isfinite(x.theta_e)) throw DivergenceError(t, "theta_e");
}

}  // namespace

SimulationResult simulate(const Scenario& s) {
    s.validate();
    const MotorParams& p = s.motor;
    const double dt = s.plant_dt_s;
    const double v_dc = s.v_dc();
    const auto steps = static_cast<long long>(std::llround(s.duration_s / dt));
    const auto ctrl_every = static_cast<long long>(std::llround(1.0 / (s.controller.rate_hz * dt)));
    const auto carrier_steps =
        static_cast<long long>(std::llround(1.0 / (s.modulator.carrier_hz * dt)));
    const double ctrl_period = static_cast<double>(ctrl_every) * dt;
    const double carrier_period = static_cast<double>(carrier_steps) * dt;
    const bool use_svm = s.modulator.kind == ModulatorKind::svm;

    FocController ctrl(p, s.gains(), s.controller.v_margin);
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto measure = [&](const AbcFrame& true_abc) {
        if (s.current_noise_std_a == 0.0) {
            return true_abc;
        }
        const double sd = s.current_noise_std_a;
        return AbcFrame{true_abc.a + sd * noise(rng), true_abc.b + sd * noise(rng),
                        true_abc.c + sd * noise(rng)};
    };

    std::map<std::string, std::vector<double>> rec;
    for (const auto& name : available_signals()) {
        rec[name].reserve(static_cast<std::size_t>(steps));
    }

    SimulationResult result;
    result.scenario = s.name;
    result.modulator = s.modulator.kind;
    result.dt = dt;

    MotorState x = s.initial;
    x.theta_e = normalize_angle(x.theta_e);
    CurrentReference ref;
    FocController::Sample cmd;
    double iq_demand = 0.0;
    CarrierPattern pattern = svm_carrier_pattern(SvmDuties{});
    SwitchState applied;  // gates currently on the bridge
    long long transitions = 0;
    const double e_mag0 = magnetic_energy(x, p);

    std::vector<Segment> segments;
    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double omega_ref = s.speed.at(t);
        const ElectricalAngle theta(x.theta_e);
        const AbcFrame i_abc = inverse_clarke(stator_current(x));

        if (k % ctrl_every == 0) {
            ++result.controller_samples;
            if (use_svm) {
                const AbcFrame meas = measure(i_abc);
                const DqFrame i_dq = park(clarke(meas), theta);
                cmd = ctrl.update(omega_ref, x.omega_m, i_dq, ctrl_period);
                ref = cmd.ref;
                iq_demand = cmd.iq_demand;
                if (k % carrier_steps == 0) {
                    // Rotate the command to the middle of the carrier period it applies to.
                    const double theta_mid =
                        x.theta_e + x.omega_e(p) * carrier_period / 2.0;
                    const AlphaBetaFrame v_ab =
                        inverse_park({cmd.v_d, cmd.v_q}, ElectricalAngle(theta_mid));
                    const SvmDuties duties = svm_duties(v_ab.alpha, v_ab.beta, v_dc);
                    if (duties.overmodulated) {
                        ++result.overmodulated_periods;
                    }
                    pattern = svm_carrier_pattern(duties);
                }
            } else {
                ref = ctrl.update_reference(omega_ref, x.omega_m, ctrl_period);
            }
        }

        segments.clear();
        if (use_svm) {
            const auto pos = k % carrier_steps;
            const double ph0 = static_cast<double>(pos) / static_cast<double>(carrier_steps);
            const double ph1 = static_cast<double>(pos + 1) / static_cast<double>(carrier_steps);
            for (std::size_t i = 0; i < pattern.states.size(); ++i) {
                const double a = std::max(pattern.edges[i], ph0);
                const double b = std::min(pattern.edges[i + 1], ph1);
                if (b > a) {
                    segments.push_back({(b - a) * carrier_period, pattern.states[i]});
                }
            }
        } else {
            const AbcFrame meas = measure(i_abc);
            const AlphaBetaFrame ref_ab = inverse_park({ref.id_ref, ref.iq_ref}, theta);
            const SwitchState g =
                hysteresis_step(inverse_clarke(ref_ab), meas, s.modulator.hysteresis_band_a, applied);
            segments.push_back({dt, g});
        }

        const LoadTorque load = s.load.at(t);
        const MotorState x_start = x;
        AbcFrame v_avg;
        DqFrame v_dq_avg;
        for (const auto& seg : segments) {
            if (seg.duration <= 0.0) {
                continue;
            }
            transitions += leg_transitions(applied, seg.gates);
            applied = seg.gates;
            const AbcFrame v_abc = phase_voltages(seg.gates, v_dc);
            const AlphaBetaFrame v_ab = clarke(v_abc);
            const AlphaBetaFrame i0 = stator_current(x);
            const double cu0 = copper_loss(x, p);
            const double pm0 = electromagnetic_torque(x, p) * x.omega_m;
            const DqFrame v_dq0 = park(v_ab, ElectricalAngle(x.theta_e));

            MotorState next;
            try {
                next = step_stationary(x, v_ab, load, p, seg.duration, dt * (1.0 + 1e-9));
            } catch (const DivergenceError& e) {
                throw DivergenceError(t, e.signal());
            }

            const AlphaBetaFrame i1 = stator_current(next);
            const double h = seg.duration;
            result.energy.input += 1.5 * h *
                                   (v_ab.alpha * 0.5 * (i0.alpha + i1.alpha) +
                                    v_ab.beta * 0.5 * (i0.beta + i1.beta));
            result.energy.copper += 0.5 * h * (cu0 + copper_loss(next, p));
            result.energy.mechanical +=
                0.5 * h * (pm0 + electromagnetic_torque(next, p) * next.omega_m);

            const double w = h / dt;
            v_avg.a += w * v_abc.a;
            v_avg.b += w * v_abc.b;
            v_avg.c += w * v_abc.c;
            v_dq_avg.d += w * v_dq0.d;
            v_dq_avg.q += w * v_dq0.q;
            x = next;
        }
        require_finite_state(x, t + dt);

        rec["omega_ref"].push_back(omega_ref);
        rec["omega_m"].push_back(x_start.omega_m);
        rec["theta_e"].push_back(x_start.theta_e);
        rec["i_d"].push_back(x_start.i_d);
        rec["i_q"].push_back(x_start.i_q);
        rec["i_a"].push_back(i_abc.a);
        rec["i_b"].push_back(i_abc.b);
        rec["i_c"].push_back(i_abc.c);
        rec["id_ref"].push_back(ref.id_ref);
        rec["iq_ref"].push_back(ref.iq_ref);
        rec["iq_demand"].push_back(use_svm ? iq_demand : ref.iq_ref);
        rec["v_d_cmd"].push_back(use_svm ? cmd.v_d : 0.0);
        rec["v_q_cmd"].push_back(use_svm ? cmd.v_q : 0.0);
        rec["v_cmd_mag"].push_back(use_svm ? std::hypot(cmd.v_d, cmd.v_q) : 0.0);
        rec["v_a"].push_back(v_avg.a);
        rec["v_b"].push_back(v_avg.b);
        rec["v_c"].push_back(v_avg.c);
        rec["v_d"].push_back(v_dq_avg.d);
        rec["v_q"].push_back(v_dq_avg.q);
        rec["torque"].push_back(electromagnetic_torque(x_start, p));
        rec["load_torque"].push_back(load.at(x_start.omega_m));
    }

    result.energy.magnetic_delta = magnetic_energy(x, p) - e_mag0;
    const double residual = result.energy.input - result.energy.copper -
                            result.energy.mechanical - result.energy.magnetic_delta;
    result.energy.residual =
        result.energy.input != 0.0 ? std::abs(residual) / std::abs(result.energy.input) : 0.0;
    result.switching_freq_hz =
        static_cast<double>(transitions) / (3.0 * s.duration_s * 2.0);

    for (const auto& name : available_signals()) {
        result.signals.push_back({name, dt, std::move(rec[name])});
    }
    return result;
}

}  // namespace focsim

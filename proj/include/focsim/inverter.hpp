#pragma once

// Ideal two-level voltage-source inverter with a space-vector modulator and
// a hysteresis (bang-bang) current modulator.

#include <array>
#include <cstdint>

#include "focsim/transforms.hpp"

namespace focsim {

// High-side gate of each leg. The low-side gate is always the complement,
// so a shorted leg cannot be expressed.
struct SwitchState {
    bool a = false;
    bool b = false;
    bool c = false;

    // Vector number V0..V7: V1 = (1,0,0) at 0 degrees, counterclockwise.
    int vector_index() const;
    static SwitchState from_vector_index(int k);

    friend bool operator==(const SwitchState&, const SwitchState&) = default;
};

// Number of legs that change state between two switch states.
int leg_transitions(const SwitchState& from, const SwitchState& to);

struct SvmDuties {
    int sector = 1;  // 1..6
    double d1 = 0.0;  // first active vector of the sector (V_sector)
    double d2 = 0.0;  // second active vector (V_sector+1)
    double d0 = 1.0;  // split between V0 and V7
    bool overmodulated = false;
};

// Sector of an alpha/beta reference: sector k covers angles
// ((k-1)*60deg, k*60deg], with angle 0 in sector 1.
int svm_sector(double v_alpha, double v_beta);

SvmDuties svm_duties(double v_alpha, double v_beta, double v_dc);

struct PwmTimebase {
    double carrier_freq = 10e3;  // Hz

    double period() const { return 1.0 / carrier_freq; }
    // Fraction of the current carrier period elapsed at time t, in [0, 1).
    double phase_at(double t) const;
};

// One carrier period of the centre-aligned sequence
// V0 - Vx - Vy - V7 - Vy - Vx - V0, where Vx is the active vector with a
// single high leg. edges[i]..edges[i+1] (fractions of the period) carry
// states[i].
struct CarrierPattern {
    std::array<double, 8> edges{};
    std::array<SwitchState, 7> states{};

    SwitchState at_phase(double phase) const;
};

CarrierPattern svm_carrier_pattern(const SvmDuties& duties);

SwitchState svm_gate_pattern(const SvmDuties& duties, const PwmTimebase& timebase, double t);

// Per-leg bang-bang law: error above +band turns the high side on, below
// -band turns it off, otherwise the previous state is held.
SwitchState hysteresis_step(const AbcFrame& i_ref, const AbcFrame& i_meas, double band,
                            const SwitchState& prev);

// Line-to-neutral voltages of a balanced star-connected load.
AbcFrame phase_voltages(const SwitchState& s, double v_dc);

}  // namespace focsim

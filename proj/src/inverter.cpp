#include "focsim/inverter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "focsim/errors.hpp"

namespace focsim {

namespace {

// Gate patterns indexed by vector number.
constexpr std::array<SwitchState, 8> kVectors{{
    {false, false, false},  // V0
    {true, false, false},   // V1
    {true, true, false},    // V2
    {false, true, false},   // V3
    {false, true, true},    // V4
    {false, false, true},   // V5
    {true, false, true},    // V6
    {true, true, true},     // V7
}};

constexpr double kSectorWidth = std::numbers::pi / 3.0;

int high_legs(const SwitchState& s) { return int(s.a) + int(s.b) + int(s.c); }

}  // namespace

int SwitchState::vector_index() const {
    for (int k = 0; k < 8; ++k) {
        if (kVectors[k] == *this) {
            return k;
        }
    }
    return -1;  // unreachable: all 8 combinations are listed
}

SwitchState SwitchState::from_vector_index(int k) {
    if (k < 0 || k > 7) {
        throw InvalidInput("switch vector index out of range");
    }
    return kVectors[k];
}

int leg_transitions(const SwitchState& from, const SwitchState& to) {
    return int(from.a != to.a) + int(from.b != to.b) + int(from.c != to.c);
}

int svm_sector(double v_alpha, double v_beta) {
    if (!std::isfinite(v_alpha) || !std::isfinite(v_beta)) {
        throw InvalidInput("svm_sector: non-finite reference");
    }
    if (v_alpha == 0.0 && v_beta == 0.0) {
        return 1;
    }
    const double angle = normalize_angle(std::atan2(v_beta, v_alpha));
    double pos = angle / kSectorWidth;
    // Snap references that sit on a boundary up to rounding; the boundary
    // belongs to the lower sector.
    if (std::abs(pos - std::round(pos)) < 1e-12) {
        pos = std::round(pos);
    }
    const int sector = static_cast<int>(std::ceil(pos));
    return std::clamp(sector, 1, 6);
}

SvmDuties svm_duties(double v_alpha, double v_beta, double v_dc) {
    if (!(v_dc > 0.0)) {
        throw ConfigError("svm_duties: v_dc must be positive");
    }
    SvmDuties out;
    out.sector = svm_sector(v_alpha, v_beta);

    // Solve v = d1 * V_k + d2 * V_k+1 with |V| = 2/3 v_dc (Cramer's rule).
    const double mag = 2.0 / 3.0 * v_dc;
    const double a1 = (out.sector - 1) * kSectorWidth;
    const double a2 = out.sector * kSectorWidth;
    const double x1 = mag * std::cos(a1);
    const double y1 = mag * std::sin(a1);
    const double x2 = mag * std::cos(a2);
    const double y2 = mag * std::sin(a2);
    const double det = x1 * y2 - x2 * y1;
    double d1 = (v_alpha * y2 - x2 * v_beta) / det;
    double d2 = (x1 * v_beta - v_alpha * y1) / det;
    d1 = std::max(0.0, d1);
    d2 = std::max(0.0, d2);

    const double active = d1 + d2;
    if (active > 1.0) {
        d1 /= active;
        d2 /= active;
        out.overmodulated = true;
    }
    out.d1 = d1;
    out.d2 = d2;
    out.d0 = std::max(0.0, 1.0 - d1 - d2);
    return out;
}

double PwmTimebase::phase_at(double t) const {
    if (!(carrier_freq > 0.0)) {
        throw ConfigError("carrier frequency must be positive");
    }
    const double cycles = t * carrier_freq;
    double phase = cycles - std::floor(cycles);
    if (phase >= 1.0) {
        phase = 0.0;
    }
    return phase;
}

CarrierPattern svm_carrier_pattern(const SvmDuties& duties) {
    SwitchState vx = kVectors[duties.sector];
    SwitchState vy = kVectors[duties.sector % 6 + 1];
    double dx = duties.d1;
    double dy = duties.d2;
    if (high_legs(vx) != 1) {
        std::swap(vx, vy);
        std::swap(dx, dy);
    }

    const std::array<double, 7> widths{duties.d0 / 4.0, dx / 2.0, dy / 2.0, duties.d0 / 2.0,
                                       dy / 2.0,        dx / 2.0, duties.d0 / 4.0};
    CarrierPattern p;
    p.states = {kVectors[0], vx, vy, kVectors[7], vy, vx, kVectors[0]};
    p.edges[0] = 0.0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        p.edges[i + 1] = p.edges[i] + widths[i];
    }
    p.edges[7] = 1.0;
    return p;
}

SwitchState CarrierPattern::at_phase(double phase) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (phase < edges[i + 1]) {
            return states[i];
        }
    }
    return states.back();
}

SwitchState svm_gate_pattern(const SvmDuties& duties, const PwmTimebase& timebase, double t) {
    return svm_carrier_pattern(duties).at_phase(timebase.phase_at(t));
}

SwitchState hysteresis_step(const AbcFrame& i_ref, const AbcFrame& i_meas, double band,
                            const SwitchState& prev) {
    if (!(band > 0.0)) {
        throw ConfigError("hysteresis band must be positive");
    }
    const auto leg = [band](double error, bool held) {
        if (error > band) {
            return true;
        }
        if (error < -band) {
            return false;
        }
        return held;
    };
    return {leg(i_ref.a - i_meas.a, prev.a), leg(i_ref.b - i_meas.b, prev.b),
            leg(i_ref.c - i_meas.c, prev.c)};
}

AbcFrame phase_voltages(const SwitchState& s, double v_dc) {
    const double a = s.a ? 1.0 : 0.0;
    const double b = s.b ? 1.0 : 0.0;
    const double c = s.c ? 1.0 : 0.0;
    return {v_dc * (2.0 * a - b - c) / 3.0, v_dc * (2.0 * b - a - c) / 3.0,
            v_dc * (2.0 * c - a - b) / 3.0};
}

}  // namespace focsim

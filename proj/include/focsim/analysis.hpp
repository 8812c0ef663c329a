#pragma once

// Waveform post-processing: harmonic spectrum, THD, step-response metrics
// and the steady-state torque/power envelope.

#include <span>
#include <string>
#include <vector>

#include "focsim/motor_model.hpp"

namespace focsim {

struct Waveform {
    std::string name;
    double dt = 0.0;  // s
    std::vector<double> samples;

    void validate() const;
    double duration() const { return dt * static_cast<double>(samples.size()); }
};

struct Spectrum {
    double fundamental_freq = 0.0;  // Hz
    // Peak amplitude per harmonic order; index 0 is the DC level (absolute).
    std::vector<double> magnitudes;
    // Order that sits exactly on the Nyquist bin, or 0 if none was computed.
    int nyquist_order = 0;
    int periods = 0;        // whole fundamental periods analysed
    std::size_t window = 0;  // samples analysed

    double magnitude(int order) const;
    // Mean square of the harmonic content; equals the signal's mean square
    // when every order up to Nyquist is present and the signal is periodic.
    double mean_square() const;
};

inline constexpr int kMinSpectrumPeriods = 5;

// Analyses the last whole number of fundamental periods in the record
// (`periods` of them, or as many as fit when 0). max_order = 0 computes every
// order up to Nyquist.
Spectrum spectrum(const Waveform& w, double fundamental_hz, int max_order = 0, int periods = 0);

inline constexpr int kDefaultThdOrder = 50;

double thd(const Spectrum& s, int max_order = kDefaultThdOrder);

struct TrackingMetrics {
    bool applicable = false;  // false when the reference contains no step
    double rise_time = 0.0;   // s, 10% to 90%
    double overshoot_pct = 0.0;
    double settling_time = 0.0;       // s after the step, 2% band
    double steady_state_error = 0.0;  // mean |ref - actual| over the final 10%
    double steady_state_error_rel = 0.0;
};

TrackingMetrics tracking_metrics(const Waveform& ref, const Waveform& actual);

struct EnvelopePoint {
    double omega_m = 0.0;     // rad/s
    double max_torque = 0.0;  // N m
    double power = 0.0;       // W
    double i_d = 0.0;         // optimal operating point, A
    double i_q = 0.0;
    bool feasible = true;
};

inline constexpr double kEnvelopeAngleTolerance = 1e-6;

// Maximum steady-state torque at each mechanical speed under the current
// circle (i_max) and the steady-state voltage ellipse (v_max).
std::vector<EnvelopePoint> envelope_sweep(const MotorParams& p, std::span<const double> speeds);

}  // namespace focsim

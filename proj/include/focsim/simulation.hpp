#pragma once

// Fixed-step co-simulation of controller, modulator, inverter and motor,
// plus the report-producing runs behind the CLI.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "focsim/analysis.hpp"
#include "focsim/scenario.hpp"

namespace focsim {

struct EnergyBalance {
    double input = 0.0;       // J, 3/2 (v.i) at the terminals
    double copper = 0.0;      // J
    double mechanical = 0.0;  // J, T_e * omega_m
    double magnetic_delta = 0.0;  // J, change in stored inductive energy
    double residual = 0.0;    // |in - copper - mech - magnetic| / |in|
};

inline constexpr double kEnergyResidualLimit = 0.005;

struct SimulationResult {
    std::string scenario;
    ModulatorKind modulator = ModulatorKind::svm;
    double dt = 0.0;
    std::vector<Waveform> signals;  // every entry of available_signals()
    EnergyBalance energy;
    double switching_freq_hz = 0.0;  // leg transitions per second per leg / 2
    long long controller_samples = 0;
    long long overmodulated_periods = 0;

    const Waveform& signal(const std::string& name) const;
};

// Runs the closed loop. Throws ConfigError before stepping if the scenario
// is invalid and DivergenceError if the state stops being finite.
SimulationResult simulate(const Scenario& s);

struct ThdEntry {
    std::string label;  // e.g. "svm" / "hysteresis"
    std::string signal;
    double fundamental_hz = 0.0;
    double thd = 0.0;
    double switching_freq_hz = 0.0;
    std::vector<double> magnitudes;  // orders 0..thd_max_order
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> csv_paths;
    std::vector<std::filesystem::path> plot_paths;
    std::filesystem::path report_path;
    std::optional<TrackingMetrics> speed_metrics;
    std::vector<ThdEntry> thd_table;
    std::optional<EnergyBalance> energy;
    std::vector<EnvelopePoint> envelope;
    double envelope_base_speed = 0.0;  // rad/s mechanical
    std::optional<double> hysteresis_band_a;
    std::vector<std::string> warnings;

    bool energy_ok() const {
        return !energy || energy->residual < kEnergyResidualLimit;
    }
};

// Computes the THD entry of a finished run, or nullopt (with a warning
// appended) when the record cannot support it.
std::optional<ThdEntry> thd_entry(const Scenario& s, const SimulationResult& r,
                                  const std::string& label, std::vector<std::string>& warnings);

RunReport run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

struct BandSearchResult {
    double band_a = 0.0;
    double switching_freq_hz = 0.0;
    bool matched = false;  // within 10% of the target
    SimulationResult run;
};

// Bisects the hysteresis band (log scale) until the average switching
// frequency is within 2% of target_hz, or the iteration budget runs out.
BandSearchResult match_hysteresis_band(const Scenario& s, double target_hz);

RunReport run_comparison(const Scenario& s, const std::filesystem::path& out_dir);

// Sweep over [0.1, 3] * omega_base.
RunReport run_envelope(const Scenario& s, int n_points, const std::filesystem::path& out_dir);

}  // namespace focsim
